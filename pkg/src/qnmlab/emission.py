"""Spontaneous emission of the atom inside the emergent leaky cavity.

An atom that also decays into channels other than the waveguide (rate
gamma_ext) is handled by continuing the level spacing to W_c = W -
i*gamma_ext in the characteristic equation and re-solving for the mode.
The total decay rate of the dressed atom is gamma_t = |Im theta| of that
root. For kappa >> 1 the closed form

    gamma_t ~= ((W - j*pi) / kappa)^2 + gamma_ext/kappa - gamma_ext/kappa^2

is the imaginary part of the analytic seed evaluated at W_c, dropping the
O(gamma_ext^2/kappa^2) term; both routes are reported side by side, with
the numeric root treated as ground truth. Near W = j*pi and for large
kappa, gamma_t is far below the bare gamma_ext: the half-cavity suppresses
the atom's decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import DimensionlessParams
from .qnm import ApproximationRangeError, _newton, _seed, seed_mode


@dataclass(frozen=True)
class EmissionReport:
    """Closed-form and numeric total decay rates, with suppression ratio.

    suppression_ratio = gamma_t_numeric / gamma_ext; it is +inf when
    gamma_ext = 0 (nothing to suppress).
    """

    j: int
    gamma_t_formula: float
    gamma_t_numeric: float
    suppression_ratio: float

    def __post_init__(self) -> None:
        if self.j < 1:
            raise ValueError(f"mode index must be >= 1, got {self.j}")
        for name in ("gamma_t_formula", "gamma_t_numeric"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, "
                                 f"got {getattr(self, name)}")
        if not self.suppression_ratio >= 0:
            raise ValueError(f"suppression_ratio must be >= 0, "
                             f"got {self.suppression_ratio}")


def modified_emission_formula(d: DimensionlessParams, j: int) -> float:
    """Closed-form total decay rate near the j-th mode. Requires kappa > 1.

    Returns (W - j*pi)^2/kappa^2 + gamma_ext/kappa - gamma_ext/kappa^2,
    with the first term evaluated in the same operation order as the seed
    formula so that the gamma_ext = 0 reduction to the bare seed linewidth
    is exact, not merely close.
    """
    if j < 1:
        raise ValueError(f"mode index must be >= 1, got {j}")
    if d.kappa <= 1.0:
        raise ApproximationRangeError(
            f"closed form is a strong-coupling expansion and needs "
            f"kappa > 1, got kappa = {d.kappa}")
    detuning = d.W - j * math.pi
    return (detuning * detuning / d.kappa**2
            + d.gamma_ext / d.kappa
            - d.gamma_ext / d.kappa**2)


def modified_emission_numeric(d: DimensionlessParams, j: int,
                              tol: float = 1e-12) -> EmissionReport:
    """Total decay rate from the root of f with W continued to W - i*gamma_ext.

    The seed is the bare-mode seed evaluated at the complex level spacing,
    then refined by the same Newton iteration used for ordinary modes; the
    numeric rate is |Im theta| of the converged root.
    """
    formula = modified_emission_formula(d, j)  # also validates j, kappa
    w_c = complex(d.W, -d.gamma_ext)
    if d.gamma_ext == 0.0:
        seed = seed_mode(j, d)
    else:
        seed = _seed(j, d.kappa, w_c)
    theta, resid, _iters, ok = _newton(seed, d.kappa, w_c, tol, 50)
    if not ok:
        raise RuntimeError(
            f"complex-W root search did not converge for j={j}, "
            f"kappa={d.kappa}, W={d.W}, gamma_ext={d.gamma_ext} "
            f"(residual {resid:.3e})")
    gamma_numeric = abs(theta.imag)
    ratio = math.inf if d.gamma_ext == 0.0 else gamma_numeric / d.gamma_ext
    return EmissionReport(j=j, gamma_t_formula=formula,
                          gamma_t_numeric=gamma_numeric,
                          suppression_ratio=ratio)
