"""Parameter containers and unit conversions for the atom-terminated waveguide.

The physical system is a semi-infinite 1D waveguide with a perfect mirror at
x = 0 and a two-level atom side-coupled at x = a. Everything downstream works
in natural units v_g = a = 1 (and hbar = 1), where a photon of energy E is
described by the dimensionless number theta = E a / v_g and the system is
fully characterised by

    kappa = 2 J**2 a / v_g**2      (dimensionless coupling weight)
    W     = Omega a / v_g          (dimensionless atomic level spacing)

plus, optionally, gamma_ext = Gamma_ext a / v_g for emission into channels
other than the waveguide. Physical units enter and leave through the two
conversion functions in this module only.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


def _require_finite(**fields: float) -> None:
    for name, value in fields.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """Lab-frame parameters.

    v_g        photon group velocity (length/time), > 0
    a          mirror-atom distance (length), > 0
    J          atom-field coupling amplitude; only J**2 enters observables,
               so a negative J is normalised to |J| at construction
    Omega      atomic level spacing (angular frequency), >= 0
    Gamma_ext  decay rate into non-waveguide channels, >= 0
    """

    v_g: float
    a: float
    J: float
    Omega: float
    Gamma_ext: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(v_g=self.v_g, a=self.a, J=self.J, Omega=self.Omega,
                        Gamma_ext=self.Gamma_ext)
        if self.v_g <= 0:
            raise ValueError(f"v_g must be positive, got {self.v_g}")
        if self.a <= 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if self.J < 0:
            object.__setattr__(self, "J", -self.J)
        if self.Omega < 0:
            raise ValueError(f"Omega must be non-negative, got {self.Omega}")
        if self.Gamma_ext < 0:
            raise ValueError(
                f"Gamma_ext must be non-negative, got {self.Gamma_ext}")


@dataclass(frozen=True)
class DimensionlessParams:
    """Natural-unit parameters (v_g = a = 1): kappa, W and gamma_ext."""

    kappa: float
    W: float
    gamma_ext: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(kappa=self.kappa, W=self.W, gamma_ext=self.gamma_ext)
        if self.kappa < 0:
            raise ValueError(f"kappa must be non-negative, got {self.kappa}")
        if self.W < 0:
            raise ValueError(f"W must be non-negative, got {self.W}")
        if self.gamma_ext < 0:
            raise ValueError(
                f"gamma_ext must be non-negative, got {self.gamma_ext}")


@dataclass(frozen=True)
class ComplexFrequency:
    """A complex mode energy theta = omega_tilde - i * gamma_tilde.

    The sign convention is fixed once and for all here: a decaying mode has
    Im(theta) < 0, so gamma_tilde = -Im(theta) >= 0 is the decay rate and the
    time dependence is exp(-i * theta * s) = exp(-i * omega_tilde * s)
    * exp(-gamma_tilde * s).
    """

    theta: complex

    def __post_init__(self) -> None:
        if not cmath.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta!r}")

    @property
    def omega_tilde(self) -> float:
        """Oscillation frequency, Re(theta)."""
        return self.theta.real

    @property
    def gamma_tilde(self) -> float:
        """Decay rate, -Im(theta)."""
        return -self.theta.imag


def to_dimensionless(p: PhysicalParams) -> DimensionlessParams:
    """Map lab-frame parameters onto (kappa, W, gamma_ext).

    kappa = 2 J**2 a / v_g**2, W = Omega a / v_g, gamma_ext = Gamma_ext a / v_g.
    """
    return DimensionlessParams(
        kappa=2.0 * p.J * p.J * p.a / (p.v_g * p.v_g),
        W=p.Omega * p.a / p.v_g,
        gamma_ext=p.Gamma_ext * p.a / p.v_g,
    )


def to_physical(d: DimensionlessParams, v_g: float, a: float) -> PhysicalParams:
    """Invert :func:`to_dimensionless` for a chosen velocity and distance."""
    _require_finite(v_g=v_g, a=a)
    if v_g <= 0 or a <= 0:
        raise ValueError(f"v_g and a must be positive, got {v_g}, {a}")
    return PhysicalParams(
        v_g=v_g,
        a=a,
        J=v_g * math.sqrt(d.kappa / (2.0 * a)),
        Omega=d.W * v_g / a,
        Gamma_ext=d.gamma_ext * v_g / a,
    )
