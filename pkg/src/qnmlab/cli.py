"""Command-line front end: CSV data files plus a JSON manifest per run.

Subcommands: spectrum (mode table), sweep (decay-rate minima vs W),
wavefunction (mode profile), scatter (phase shift / delay / enhancement),
evolve (time-domain amplitude), map (laboratory-parameter report) and
verify (cross-module consistency suite).

Every run writes its data files into --out-dir plus a manifest.json
recording the command, the exact parameters used, tool version, ISO-8601
timestamp, the list of emitted files and any warnings. Numeric CSV cells
carry 17 significant digits, so reruns with identical flags are
byte-identical and values round-trip to double precision.

Exit codes: 0 success; 1 usage or invalid parameters (message on stderr);
2 partial results (some points failed, see warnings); 3 verification or
internal-consistency failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .dynamics import DdeConfig, FitWindowError, evolve_atom, pole_check
from .model import DimensionlessParams
from .platforms import (FLUX_QUANTUM, RamanSpec, SquidSpec, raman_coupling,
                        squid_coupling, squid_level_spacing)
from .qnm import (ApproximationRangeError, ContourBox, ContourError,
                  characteristic, count_roots_in_box, find_modes, refine_root,
                  seed_mode, slowest_mode, sweep_decay)
from .scattering import enhancement_scan, qnm_wavefunction

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2
EXIT_VERIFY = 3

#: Seed for the randomized pole-identity check (fixed: reruns must agree).
_VERIFY_SEED = 1302

#: evolve warns when t_max * expected decay rate falls below this.
_DECAY_COVERAGE = 3.0


class _UsageError(Exception):
    """Raised for bad flags/values; mapped to exit code 1."""


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports usage problems via _UsageError."""

    def error(self, message: str) -> None:  # noqa: D102 - argparse hook
        raise _UsageError(f"{self.prog}: {message}")


@dataclass
class _Run:
    """Collects outputs and warnings while a command executes."""

    command: str
    parameters: dict
    out_dir: str
    outputs: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def write_csv(self, name: str, header: str, rows) -> None:
        path = self.path(name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(",".join(_cell(v) for v in row) + "\n")
        self.outputs.append(path)

    def write_json(self, name: str, payload: dict) -> None:
        path = self.path(name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.outputs.append(path)

    def write_manifest(self) -> None:
        manifest = {
            "command": self.command,
            "parameters": self.parameters,
            "tool_version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "outputs": self.outputs,
            "warnings": self.warnings,
        }
        manifest.update(self.extras)
        path = self.path("manifest.json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _workers() -> int:
    raw = os.environ.get("QNMLAB_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise _UsageError(f"QNMLAB_THREADS must be a positive integer, "
                          f"got {raw!r}") from None
    if n < 1:
        raise _UsageError(f"QNMLAB_THREADS must be a positive integer, "
                          f"got {raw!r}")
    return n


def _ensure_out_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _params_of(args: argparse.Namespace) -> dict:
    skip = {"func", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------- commands


def _cmd_spectrum(args: argparse.Namespace, run: _Run) -> int:
    d = DimensionlessParams(kappa=args.kappa, W=args.w)
    modes = find_modes(d, j_min=args.j_min, j_max=args.j_max, tol=args.tol,
                       workers=_workers())
    rows = [(m.j, m.theta.theta.real, m.theta.theta.imag, m.residual,
             m.lifetime, m.converged) for m in modes]
    run.write_csv("modes.csv", "j,re_theta,im_theta,residual,lifetime,converged",
                  rows)
    bad = [m for m in modes if not m.converged]
    for m in bad:
        run.warnings.append(f"mode j={m.j} not converged: {m.note or 'no note'}")
    return EXIT_PARTIAL if bad else EXIT_OK


def _cmd_sweep(args: argparse.Namespace, run: _Run) -> int:
    if args.steps < 1:
        raise _UsageError("--steps must be >= 1")
    d = DimensionlessParams(kappa=args.kappa, W=1.0)  # W comes per point
    ws = np.linspace(args.w_min, args.w_max, args.steps)
    points = sweep_decay(d, ws, tol=args.tol, workers=_workers())
    rows = [(p.w, p.im_theta_min, p.j_used) for p in points]
    run.write_csv("sweep.csv", "w,im_theta_min,j_used", rows)
    gaps = [p for p in points if not p.converged]
    for p in gaps:
        run.warnings.append(f"W={p.w:.17g}: no converged root "
                            f"({p.note or 'no note'})")
    return EXIT_PARTIAL if gaps else EXIT_OK


def _cmd_wavefunction(args: argparse.Namespace, run: _Run) -> int:
    if args.samples < 2:
        raise _UsageError("--samples must be >= 2")
    if args.x_max <= 0:
        raise _UsageError("--x-max must be positive")
    d = DimensionlessParams(kappa=args.kappa, W=args.w)
    mode = refine_root(seed_mode(args.j, d), d, tol=args.tol)
    if not mode.converged:
        run.warnings.append(f"mode j={args.j} did not converge "
                            f"(residual {mode.residual:.3e}); no samples")
        return EXIT_PARTIAL
    xs = np.linspace(0.0, args.x_max, args.samples)
    samples = qnm_wavefunction(mode, xs)
    rows = [(s.x, s.value.real, s.value.imag, s.magnitude) for s in samples]
    run.write_csv("wavefunction.csv", "x,re_phi,im_phi,abs_phi", rows)
    run.extras["mode"] = {"j": mode.j, "re_theta": mode.theta.theta.real,
                          "im_theta": mode.theta.theta.imag}
    return EXIT_OK


def _cmd_scatter(args: argparse.Namespace, run: _Run) -> int:
    if args.samples < 2:
        raise _UsageError("--samples must be >= 2")
    if not 0 < args.theta_min < args.theta_max:
        raise _UsageError("need 0 < --theta-min < --theta-max")
    d = DimensionlessParams(kappa=args.kappa, W=args.w)
    thetas = np.linspace(args.theta_min, args.theta_max, args.samples)
    points = enhancement_scan(d, thetas)
    rows = [(p.theta, p.delta, p.delay, p.enhancement) for p in points]
    run.write_csv("scatter.csv", "theta,delta,delay,enhancement", rows)
    for p in points:
        if p.note:
            run.warnings.append(f"theta={p.theta:.17g}: {p.note}")
    return EXIT_OK


def _cmd_evolve(args: argparse.Namespace, run: _Run) -> int:
    d = DimensionlessParams(kappa=args.kappa, W=args.w)
    cfg = DdeConfig(d=d, t_max=args.t_max, dt=args.dt)
    window = None
    if (args.fit_start is None) != (args.fit_end is None):
        raise _UsageError("give both --fit-start and --fit-end or neither")
    if args.fit_start is not None:
        window = (args.fit_start, args.fit_end)
    coverage_note = ""
    if d.kappa > 1.0:
        gamma_expected = abs(slowest_mode(d, tol=args.tol).theta.theta.imag)
        if args.t_max * gamma_expected < _DECAY_COVERAGE:
            coverage_note = (
                f"t_max*gamma_expected = {args.t_max * gamma_expected:.3g} "
                f"< {_DECAY_COVERAGE:g}: the slowest mode (expected decay "
                f"rate {gamma_expected:.3g}) barely decays over this run; "
                f"fitted rates will be unreliable")
            run.warnings.append(coverage_note)
    try:
        result = evolve_atom(cfg, fit_window=window)
    except FitWindowError as exc:
        hint = f" ({coverage_note})" if coverage_note else ""
        raise _UsageError(
            f"decay fit failed: {exc}{hint}; increase --t-max or pass a "
            f"later --fit-start/--fit-end") from exc
    rows = [(s, wv.real, wv.imag, abs(wv))
            for s, wv in zip(result.times, result.w)]
    run.write_csv("evolve.csv", "s,re_w,im_w,abs_w", rows)
    run.extras["fit"] = {"omega_fit": result.omega_fit,
                         "gamma_fit": result.gamma_fit,
                         "fit_residual": result.fit_residual,
                         "dt_used": result.dt_used}
    return EXIT_OK


def _squid_from_args(args: argparse.Namespace, scale: float) -> SquidSpec:
    for name in ("e_j", "c_g", "c_j", "c_sigma", "phi_x", "l", "c_line",
                 "omega_mode", "mixing_angle"):
        if getattr(args, name) is None:
            raise _UsageError(f"--{name.replace('_', '-')} is required "
                              f"for --platform squid")
    if (args.v_g_gate is None) == (args.n_g is None):
        raise _UsageError("give exactly one of --v-g-gate or --n-g")
    phi_0 = args.phi_0 if args.phi_0 is not None else FLUX_QUANTUM
    return SquidSpec(E_J=args.e_j * scale, C_g=args.c_g, C_J=args.c_j,
                     C_Sigma=args.c_sigma, Phi_x=args.phi_x,
                     L=args.l, c_line=args.c_line,
                     omega_mode=args.omega_mode * scale,
                     mixing_angle=args.mixing_angle,
                     V_g=args.v_g_gate, n_g=args.n_g, Phi_0=phi_0)


def _cmd_map(args: argparse.Namespace, run: _Run) -> int:
    scale = 2.0 * math.pi if args.frequency_unit == "ordinary" else 1.0
    if args.platform == "squid":
        s = _squid_from_args(args, scale)
        levels = squid_level_spacing(s)
        coupling = squid_coupling(s)
        if coupling.note:
            run.warnings.append(coupling.note)
        report = {
            "platform": "squid",
            "level_spacing": {
                "omega_rad_per_s": levels.omega,
                "b_z_rad_per_s": levels.b_z,
                "b_x_rad_per_s": levels.b_x,
                "e_c_rad_per_s": levels.e_c,
                "n_g": levels.n_g,
                "flag": asdict(levels.flag),
            },
            "coupling": {
                "v_rad_per_s": coupling.v,
                "flag": asdict(coupling.flag),
                "note": coupling.note,
            },
        }
    else:
        for name in ("g", "big_g", "delta"):
            if getattr(args, name) is None:
                raise _UsageError(f"--{name.replace('_', '-')} is required "
                                  f"for --platform raman")
        r = RamanSpec(g=args.g * scale, G=args.big_g * scale,
                      Delta=args.delta * scale)
        report = {
            "platform": "raman",
            "j_eff_rad_per_s": raman_coupling(r),
        }
    run.write_json("map_report.json", report)
    return EXIT_OK


# ------------------------------------------------------------------ verify


def _check_pole_identity(n_points: int) -> tuple[bool, str]:
    rng = np.random.default_rng(_VERIFY_SEED)
    d = DimensionlessParams(kappa=200.0, W=5.0)
    thetas = (rng.uniform(-5.0, 20.0, n_points)
              + 1j * rng.uniform(-1.0, 0.5, n_points))
    worst = 0.0
    for theta in thetas:
        theta = complex(theta)
        f_abs = abs(characteristic(theta, d))
        gap = abs(pole_check(d, theta) - f_abs) / (1.0 + f_abs)
        worst = max(worst, gap)
    return worst <= 1e-12, f"max normalized gap {worst:.3e} over {n_points} points"


def _check_root_count(tol: float) -> tuple[bool, str]:
    d = DimensionlessParams(kappa=200.0, W=5.0)
    box = ContourBox(re_min=0.5, re_max=4.5 * math.pi,
                     im_min=-0.05, im_max=0.001)
    counted = count_roots_in_box(d, box)
    modes = [m for m in find_modes(d, j_min=1, j_max=6, tol=tol)
             if m.converged
             and box.re_min <= m.theta.theta.real <= box.re_max
             and box.im_min <= m.theta.theta.imag <= box.im_max]
    found = len(modes)
    return counted == found, (f"argument principle counts {counted}, "
                              f"refinement found {found} distinct roots")


def _check_dde_agreement(full: bool, tol: float) -> tuple[bool, str]:
    configs = [(50.0, 2.0)] + ([(200.0, 5.0)] if full else [])
    details = []
    ok = True
    for kappa, w in configs:
        d = DimensionlessParams(kappa=kappa, W=w)
        star = slowest_mode(d, tol=tol).theta.theta
        gamma = abs(star.imag)
        t_max = max(40.0, 2.0 * math.ceil(3.2 / gamma / 2.0))
        result = evolve_atom(DdeConfig(d=d, t_max=t_max),
                             fit_window=(t_max / 2.0, t_max))
        err_w = abs(result.omega_fit - star.real) / abs(star.real)
        err_g = abs(result.gamma_fit - gamma) / gamma
        details.append(f"({kappa:g},{w:g}): omega off {err_w:.2e}, "
                       f"gamma off {err_g:.2e}")
        ok = ok and err_w <= 0.01 and err_g <= 0.01
    return ok, "; ".join(details)


def _check_bound_state(tol: float) -> tuple[bool, str]:
    d = DimensionlessParams(kappa=200.0, W=math.pi)
    mode = refine_root(seed_mode(1, d), d, tol=tol)
    im = abs(mode.theta.theta.imag)
    return (mode.converged and im <= 1e-12,
            f"W=pi root Im magnitude {im:.3e}")


def _cmd_verify(args: argparse.Namespace, run: _Run) -> int:
    full = args.full
    checks = [
        ("pole_identity", *_check_pole_identity(1000 if full else 200)),
        ("root_count_certification", *_check_root_count(args.tol)),
        ("dde_vs_root", *_check_dde_agreement(full, args.tol)),
        ("bound_state_in_continuum", *_check_bound_state(args.tol)),
    ]
    payload = [{"name": name, "passed": passed, "detail": detail}
               for name, passed, detail in checks]
    run.write_json("verify_report.json", {"checks": payload})
    run.extras["checks"] = payload
    failed = [name for name, passed, _ in checks if not passed]
    for name in failed:
        run.warnings.append(f"check failed: {name}")
    return EXIT_VERIFY if failed else EXIT_OK


# ------------------------------------------------------------- entry point


def _build_parser() -> _Parser:
    parser = _Parser(prog="qnmlab",
                     description="Quasi-normal modes of an atom-terminated "
                                 "half-waveguide: spectra, scattering, "
                                 "dynamics and platform maps.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out-dir", default=".",
                       help="directory for CSV/JSON outputs (default: .)")
        return p

    p = add("spectrum", _cmd_spectrum, "refined mode table -> modes.csv")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--j-min", type=int, default=1)
    p.add_argument("--j-max", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-12)

    p = add("sweep", _cmd_sweep, "decay-rate minima vs W -> sweep.csv")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--w-min", type=float, required=True)
    p.add_argument("--w-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-12)

    p = add("wavefunction", _cmd_wavefunction,
            "mode profile -> wavefunction.csv")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--x-max", type=float, required=True)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-12)

    p = add("scatter", _cmd_scatter,
            "phase shift / delay / enhancement -> scatter.csv")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--theta-min", type=float, required=True)
    p.add_argument("--theta-max", type=float, required=True)
    p.add_argument("--samples", type=int, default=2000)

    p = add("evolve", _cmd_evolve, "time-domain amplitude -> evolve.csv")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--fit-start", type=float, default=None)
    p.add_argument("--fit-end", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-12)

    p = add("map", _cmd_map, "laboratory parameters -> map_report.json")
    p.add_argument("--platform", choices=("squid", "raman"), required=True)
    p.add_argument("--frequency-unit", choices=("angular", "ordinary"),
                   default="angular",
                   help="how E_J, omega-mode, g, G, Delta are given "
                        "(ordinary multiplies by 2*pi)")
    p.add_argument("--e-j", type=float, default=None)
    p.add_argument("--c-g", type=float, default=None)
    p.add_argument("--c-j", type=float, default=None)
    p.add_argument("--c-sigma", type=float, default=None)
    p.add_argument("--phi-x", type=float, default=None)
    p.add_argument("--phi-0", type=float, default=None)
    p.add_argument("--l", type=float, default=None)
    p.add_argument("--c-line", type=float, default=None)
    p.add_argument("--omega-mode", type=float, default=None)
    p.add_argument("--mixing-angle", type=float, default=None)
    p.add_argument("--v-g-gate", type=float, default=None,
                   help="gate voltage (V); alternative to --n-g")
    p.add_argument("--n-g", type=float, default=None)
    p.add_argument("--g", type=float, default=None)
    p.add_argument("--big-g", type=float, default=None,
                   help="Raman drive coupling G")
    p.add_argument("--delta", type=float, default=None)

    p = add("verify", _cmd_verify,
            "cross-module consistency suite -> verify_report.json")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--quick", action="store_true", default=True)
    group.add_argument("--full", action="store_true", default=False)
    p.add_argument("--tol", type=float, default=1e-12)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    try:
        out_dir = _ensure_out_dir(args.out_dir)
        run = _Run(command=args.command, parameters=_params_of(args),
                   out_dir=out_dir)
        code = args.func(args, run)
        run.write_manifest()
        return code
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (ApproximationRangeError, FitWindowError, ValueError) as exc:
        print(f"qnmlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ContourError, RuntimeError) as exc:
        print(f"qnmlab {args.command}: internal consistency failure: {exc}",
              file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"qnmlab {args.command}: cannot write outputs: {exc}",
              file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
