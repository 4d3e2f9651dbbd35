"""Quasi-normal mode solver for the atom-terminated half-waveguide.

A photon of dimensionless energy theta sees the atom as a semi-transparent
mirror at x = 1 and the hard mirror at x = 0; the emergent cavity between
them supports leaky modes at the complex zeros of the characteristic function

    f(theta) = kappa * sin(theta) * exp(i theta) - (W - theta),

which is entire, so standard Newton iteration and argument-principle counting
apply without branch-cut bookkeeping. (The transcendental form
tan(theta) = 1 / (kappa/(W - theta) + i) has the same zeros: multiplying it
through by (W - theta) * cos(theta) * exp(i theta) gives f up to a factor
that never vanishes; both forms are tested against each other.) The
derivative is closed-form:

    f'(theta) = kappa * exp(2 i theta) + 1.

For kappa > 1 an expansion of f around theta = j*pi gives the analytic seed

    theta_seed = j*pi + (W - j*pi)(kappa - 1)/kappa**2
                 - i (W - j*pi)**2 / kappa**2,

accurate to O(1/kappa**3), from which Newton converges in a handful of steps.
A mode with Im(theta) < 0 decays; W = j*pi puts a zero exactly at theta = j*pi
(the photon decouples and the lifetime diverges).
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import ComplexFrequency, DimensionlessParams

#: Modes with |Im theta| below this are reported as non-decaying (infinite
#: lifetime): the bound-state-in-continuum marker.
BOUND_STATE_IM_CUTOFF = 1e-14

#: Two refined roots closer than this are duplicates of the same mode.
DEDUP_RADIUS = 1e-6

LOW_ENERGY_NOTE = "low-energy regime (j <= 0), physical validity uncertain"


class ApproximationRangeError(ValueError):
    """Raised when inputs are outside the validity range of the seed formula."""


class ContourError(RuntimeError):
    """Raised when an argument-principle contour cannot be certified."""


@dataclass(frozen=True)
class QnmMode:
    """One refined quasi-normal mode.

    j           mode index, round(Re(theta)/pi)
    theta       complex mode energy
    residual    |f(theta)| at the returned point
    iterations  Newton iterations consumed
    converged   True when residual met the requested tolerance
    lifetime    1/|Im theta|, or math.inf below the bound-state cutoff
    note        metadata flag, e.g. for the uncertain j <= 0 branch
    """

    j: int
    theta: ComplexFrequency
    residual: float
    iterations: int
    converged: bool
    lifetime: float
    note: str = ""

    def __post_init__(self) -> None:
        if self.residual < 0 or math.isnan(self.residual):
            raise ValueError(f"residual must be >= 0, got {self.residual}")
        if not (self.lifetime > 0):
            raise ValueError(f"lifetime must be positive, got {self.lifetime}")

    @property
    def omega_tilde(self) -> float:
        return self.theta.omega_tilde

    @property
    def gamma_tilde(self) -> float:
        return self.theta.gamma_tilde


@dataclass(frozen=True)
class ContourBox:
    """Axis-aligned rectangle in the complex theta plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self) -> None:
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"degenerate contour box {self}")

    def inflated(self, factor: float) -> "ContourBox":
        cre = 0.5 * (self.re_min + self.re_max)
        cim = 0.5 * (self.im_min + self.im_max)
        hre = 0.5 * (self.re_max - self.re_min) * factor
        him = 0.5 * (self.im_max - self.im_min) * factor
        return ContourBox(cre - hre, cre + hre, cim - him, cim + him)


@dataclass(frozen=True)
class SweepPoint:
    """One row of a decay-rate sweep over the level spacing W."""

    w: float
    im_theta_min: float
    j_used: int
    converged: bool
    note: str = ""


def characteristic(theta: complex, d: DimensionlessParams) -> complex:
    """Evaluate f(theta) = kappa sin(theta) e^{i theta} - (W - theta)."""
    return _char(theta, d.kappa, d.W)


def characteristic_derivative(theta: complex, d: DimensionlessParams) -> complex:
    """Evaluate f'(theta) = kappa e^{2 i theta} + 1."""
    return d.kappa * cmath.exp(2j * theta) + 1.0


def _char(theta: complex, kappa: float, w: complex) -> complex:
    return kappa * cmath.sin(theta) * cmath.exp(1j * theta) - (w - theta)


def _char_np(theta: np.ndarray, kappa: float, w: complex) -> np.ndarray:
    return kappa * np.sin(theta) * np.exp(1j * theta) - (w - theta)


def _seed(j: int, kappa: float, w: complex) -> complex:
    delta = w - j * math.pi
    return (j * math.pi + delta * (kappa - 1.0) / kappa**2
            - 1j * delta * delta / kappa**2)


def seed_mode(j: int, d: DimensionlessParams) -> complex:
    """Analytic seed for the mode near theta = j*pi. Requires kappa > 1."""
    if d.kappa <= 1.0:
        raise ApproximationRangeError(
            f"seed formula needs kappa > 1 (atom more reflective than "
            f"transparent), got kappa = {d.kappa}")
    return _seed(j, d.kappa, d.W)


def _newton(seed: complex, kappa: float, w: complex, tol: float,
            max_iter: int) -> tuple[complex, float, int, bool]:
    """Newton iteration on f with analytic derivative.

    Returns (theta, |f(theta)|, iterations, converged). Once |f| <= tol the
    iterate is polished with up to three further steps as long as each one
    strictly reduces |f|; this drives the residual to its floating-point
    floor instead of stopping at the first sub-tolerance value.
    """
    theta = seed
    resid = abs(_char(theta, kappa, w))
    iterations = 0
    perturbations = 0
    while resid > tol and iterations < max_iter:
        deriv = kappa * cmath.exp(2j * theta) + 1.0
        if abs(deriv) < 1e-300:
            if perturbations >= 3:
                return theta, resid, iterations, False
            theta += 1e-6 * (1.0 + 1.0j)
            perturbations += 1
            resid = abs(_char(theta, kappa, w))
            continue
        theta = theta - _char(theta, kappa, w) / deriv
        resid = abs(_char(theta, kappa, w))
        iterations += 1
    if resid > tol:
        return theta, resid, iterations, False
    for _ in range(3):
        deriv = kappa * cmath.exp(2j * theta) + 1.0
        if abs(deriv) < 1e-300:
            break
        candidate = theta - _char(theta, kappa, w) / deriv
        cand_resid = abs(_char(candidate, kappa, w))
        if cand_resid < resid:
            theta, resid = candidate, cand_resid
            iterations += 1
        else:
            break
    return theta, resid, iterations, True


def _mode_note(j: int) -> str:
    return LOW_ENERGY_NOTE if j <= 0 else ""


def refine_root(seed: complex, d: DimensionlessParams, tol: float = 1e-12,
                max_iter: int = 50) -> QnmMode:
    """Refine a seed to a characteristic zero by Newton iteration.

    The mode index is assigned afterwards as j = round(Re(theta)/pi). A mode
    that converged onto the upper half plane (growing solution, impossible
    for this system) is returned unconverged and flagged.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    theta, resid, iterations, ok = _newton(seed, d.kappa, d.W, tol, max_iter)
    j = int(round(theta.real / math.pi))
    note = _mode_note(j)
    if ok and theta.imag > tol:
        ok = False
        note = (note + "; " if note else "") + "converged to a growing mode"
    return QnmMode(
        j=j,
        theta=ComplexFrequency(theta),
        residual=resid,
        iterations=iterations,
        converged=ok,
        lifetime=lifetime_from_theta(theta),
        note=note,
    )


def lifetime_from_theta(theta: complex) -> float:
    """Decay lifetime 1/|Im theta|; math.inf below the bound-state cutoff."""
    if abs(theta.imag) < BOUND_STATE_IM_CUTOFF:
        return math.inf
    return 1.0 / abs(theta.imag)


def lifetime(mode: QnmMode) -> float:
    """Lifetime of a converged mode (natural units of a/v_g)."""
    if not mode.converged:
        raise ValueError(f"mode j={mode.j} is not converged; its lifetime "
                         f"is not meaningful")
    return mode.lifetime


def count_roots_in_box(d: DimensionlessParams, box: ContourBox,
                       samples_per_edge: int = 2000) -> int:
    """Count characteristic zeros inside a rectangle by the argument principle.

    The winding number of f around the rectangle equals the enclosed zero
    count (f is entire, so there are no poles). The accumulated argument uses
    principal-value increments between consecutive samples; if the total is
    not close to a multiple of 2*pi, or any single increment approaches pi
    (aliasing risk from a zero close to the contour), the sampling is doubled.
    If |f| nearly vanishes on the contour the box is inflated by 1% and
    retried a few times before giving up.
    """
    if samples_per_edge < 8:
        raise ValueError(f"samples_per_edge too small: {samples_per_edge}")
    current = box
    for _ in range(6):
        count = _winding_or_none(d, current, samples_per_edge)
        if count is not None:
            return count
        current = current.inflated(1.01)
    raise ContourError(
        f"could not certify contour for {box}: |f| vanishes near every "
        f"inflated contour tried")


def _winding_or_none(d: DimensionlessParams, box: ContourBox,
                     samples_per_edge: int) -> int | None:
    """Winding number for one box, or None if a root sits on the contour."""
    samples = samples_per_edge
    for _ in range(8):
        pts = _box_boundary(box, samples)
        vals = _char_np(pts, d.kappa, d.W)
        if np.min(np.abs(vals)) <= 1e-9:
            return None
        increments = np.angle(vals[1:] / vals[:-1])
        total = float(np.sum(increments))
        winding = total / (2.0 * math.pi)
        if abs(total - 2.0 * math.pi * round(winding)) <= 0.1 \
                and float(np.max(np.abs(increments))) < 2.8:
            rounded = int(round(winding))
            if rounded < 0:
                raise ContourError(
                    f"negative winding {rounded} for {box}: f is entire, "
                    f"this indicates undersampling")
            return rounded
        samples *= 2
    raise ContourError(
        f"winding did not settle on an integer for {box}; pass a larger "
        f"samples_per_edge")


def _box_boundary(box: ContourBox, samples_per_edge: int) -> np.ndarray:
    n = samples_per_edge
    bottom = np.linspace(box.re_min, box.re_max, n, endpoint=False) \
        + 1j * box.im_min
    right = box.re_max + 1j * np.linspace(box.im_min, box.im_max, n,
                                          endpoint=False)
    top = np.linspace(box.re_max, box.re_min, n, endpoint=False) \
        + 1j * box.im_max
    left = box.re_min + 1j * np.linspace(box.im_max, box.im_min, n,
                                         endpoint=False)
    loop = np.concatenate([bottom, right, top, left])
    return np.append(loop, loop[0])


def _certification_box(theta: complex) -> ContourBox:
    """A tight rectangle around one root, clear of its neighbours (~pi away)."""
    margin_im = max(0.05, 2.0 * abs(theta.imag))
    return ContourBox(
        re_min=theta.real - 0.05,
        re_max=theta.real + 0.05,
        im_min=theta.imag - margin_im,
        im_max=max(1e-3, theta.imag + margin_im),
    )


def find_modes(d: DimensionlessParams, j_min: int = 1, j_max: int = 6,
               tol: float = 1e-12, workers: int = 1) -> list[QnmMode]:
    """Seed, refine, deduplicate and certify modes for j in [j_min, j_max].

    Each converged root is certified by an argument-principle count of 1 in
    a tight box around it; a failed certification demotes the mode to
    unconverged rather than aborting the batch. Results are sorted by
    Re(theta). Workers > 1 evaluates seeds concurrently (the result order is
    normalised afterwards, so the output is identical either way).
    """
    if j_max < j_min:
        raise ValueError(f"empty index range [{j_min}, {j_max}]")
    indices = list(range(j_min, j_max + 1))
    seeds = [seed_mode(j, d) for j in indices]

    def _refine(seed: complex) -> QnmMode:
        return refine_root(seed, d, tol=tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            modes = list(pool.map(_refine, seeds))
    else:
        modes = [_refine(seed) for seed in seeds]

    deduped: list[QnmMode] = []
    for mode in sorted(modes, key=lambda m: m.theta.theta.real):
        if any(abs(mode.theta.theta - kept.theta.theta) < DEDUP_RADIUS
               for kept in deduped):
            continue
        deduped.append(mode)

    certified: list[QnmMode] = []
    for mode in deduped:
        if not mode.converged:
            certified.append(mode)
            continue
        try:
            count = count_roots_in_box(d, _certification_box(mode.theta.theta))
        except ContourError as exc:
            count = -1
            detail = f"certification failed: {exc}"
        if count == 1:
            certified.append(mode)
        else:
            if count >= 0:
                detail = f"certification counted {count} roots, expected 1"
            certified.append(QnmMode(
                j=mode.j, theta=mode.theta, residual=mode.residual,
                iterations=mode.iterations, converged=False,
                lifetime=mode.lifetime,
                note=(mode.note + "; " if mode.note else "") + detail,
            ))
    return certified


def sweep_decay(d: DimensionlessParams, w_values, tol: float = 1e-12,
                workers: int = 1) -> list[SweepPoint]:
    """Decay rate of the slowest mode as W is swept at fixed kappa.

    For each W the mode with j = round(W/pi) is refined (that index minimises
    |W - j*pi|, hence the decay rate); the row records |Im theta|. W within
    1e-9 of a positive multiple of pi is recorded as exactly 0 without
    solving: theta = j*pi is an exact zero there. Failed points come back
    flagged as gaps instead of aborting the sweep.
    """
    w_list = [float(w) for w in w_values]

    def _solve(w: float) -> SweepPoint:
        if w < 0 or not math.isfinite(w):
            return SweepPoint(w=w, im_theta_min=math.nan, j_used=0,
                              converged=False, note="invalid W")
        j = int(round(w / math.pi))
        if j >= 1 and abs(w - j * math.pi) < 1e-9:
            return SweepPoint(w=w, im_theta_min=0.0, j_used=j, converged=True,
                              note="exact bound state in the continuum")
        d_point = DimensionlessParams(kappa=d.kappa, W=w,
                                      gamma_ext=d.gamma_ext)
        try:
            mode = refine_root(seed_mode(j, d_point), d_point, tol=tol)
        except (ApproximationRangeError, ValueError) as exc:
            return SweepPoint(w=w, im_theta_min=math.nan, j_used=j,
                              converged=False, note=str(exc))
        return SweepPoint(w=w, im_theta_min=abs(mode.theta.theta.imag),
                          j_used=mode.j, converged=mode.converged,
                          note=mode.note)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_solve, w_list))
    return [_solve(w) for w in w_list]


def slowest_mode(d: DimensionlessParams, tol: float = 1e-12) -> QnmMode:
    """The mode with the smallest decay rate: floor(W/pi) vs ceil(W/pi).

    The lifetime maximum sits at the j minimising |W - j*pi|, which is one of
    the two neighbours; both are refined and compared on |Im theta|. Indices
    below 1 are included but carry the low-energy validity note.
    """
    j_lo = int(math.floor(d.W / math.pi))
    j_hi = j_lo + 1
    candidates = []
    for j in (j_lo, j_hi):
        mode = refine_root(seed_mode(j, d), d, tol=tol)
        if mode.converged:
            candidates.append(mode)
    if not candidates:
        raise ApproximationRangeError(
            f"no converged mode near W = {d.W} for kappa = {d.kappa}")
    return min(candidates, key=lambda m: abs(m.theta.theta.imag))
