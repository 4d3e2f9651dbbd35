"""Single-photon scattering off the atom-terminated half-waveguide.

For a real photon energy theta the stationary wave is sin(theta x) between
the mirror and the atom and C sin(theta x + delta) outside; the atom acts as
a delta potential of weight g = kappa / (W - theta), giving the derivative
jump phi'(1+) - phi'(1-) = -theta g phi(1) and the closed-form phase shift

    cot(theta + delta) = cot(theta) - g
    <=>  tan(delta) = g sin^2(theta) / (1 - g sin(theta) cos(theta)),

evaluated as delta = atan2(g sin^2 theta, 1 - g sin theta cos theta) so that
delta -> 0 continuously as the coupling is switched off. The intensity
enhancement inside the emergent cavity is |A/C|^2 = sin^2(theta + delta) /
sin^2(theta) and peaks at the quasi-normal-mode positions; the Wigner delay
d(delta)/d(theta) peaks there too, with height 1/|Im theta*|.

qnm_wavefunction evaluates the leaky-mode profile itself at complex theta*:
sin(theta* x) inside, sin(theta*) exp(i theta* (x-1)) outside, which grows
exponentially with x as every quasi-normal mode does.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import DimensionlessParams
from .qnm import QnmMode

#: theta this close to a positive multiple of pi is treated as degenerate
#: (the enhancement becomes 0/0) and evaluated by a small offset instead.
DEGENERATE_TOL = 1e-12

#: Offset used to evaluate degenerate points by their limit.
DEGENERATE_OFFSET = 1e-9

#: Step for the central-difference Wigner delay.
DELAY_STEP = 1e-6

NODE_DEGENERACY_NOTE = "degenerate theta = j*pi, evaluated by +/-1e-9 offset"
MIRROR_LIMIT_NOTE = "theta = W: perfect-mirror limit"


@dataclass(frozen=True)
class PotentialDescriptor:
    """Effective delta-mirror at the atom: position, weight and divergence.

    position is the atom's location (1 in natural units). At probe energy
    theta = W the weight diverges and the singular flag is set.
    """

    position: float
    strength: float
    singular: bool

    def __post_init__(self) -> None:
        if self.singular != math.isinf(self.strength):
            raise ValueError("singular flag must match an infinite strength")


@dataclass(frozen=True)
class ScatterPoint:
    """Phase shift, Wigner delay and cavity enhancement at one energy."""

    theta: float
    delta: float
    delay: float
    enhancement: float
    note: str = ""

    def __post_init__(self) -> None:
        if self.enhancement < 0:
            raise ValueError(
                f"enhancement must be >= 0, got {self.enhancement}")


@dataclass(frozen=True)
class WaveSample:
    """Mode wavefunction sample: phi(x) and |phi(x)|."""

    x: float
    value: complex
    magnitude: float


def potential_weight(theta: float, d: DimensionlessParams) -> PotentialDescriptor:
    """Weight g = kappa / (W - theta) of the atom's effective delta mirror.

    A decoupled atom (kappa = 0) has zero weight at every energy, including
    theta = W where the coupled weight would diverge.
    """
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if d.kappa == 0.0:
        return PotentialDescriptor(position=1.0, strength=0.0, singular=False)
    if abs(d.W - theta) < DEGENERATE_TOL:
        return PotentialDescriptor(position=1.0, strength=math.inf,
                                   singular=True)
    return PotentialDescriptor(position=1.0,
                               strength=d.kappa / (d.W - theta),
                               singular=False)


def _delta_branch(theta: float, d: DimensionlessParams) -> float:
    """Phase shift on the branch that is continuous in theta with delta(g=0)=0.

    At theta = W the weight g diverges and the atom reflects perfectly; the
    g -> +/-inf limit of the atan2 expression is taken explicitly there.
    With kappa = 0 the weight is identically zero and so is the phase.
    """
    if d.kappa == 0.0:
        return 0.0
    sin_t = math.sin(theta)
    cos_t = math.cos(theta)
    if abs(d.W - theta) < DEGENERATE_TOL:
        return math.atan2(sin_t * sin_t, -sin_t * cos_t)
    g = d.kappa / (d.W - theta)
    return math.atan2(g * sin_t * sin_t, 1.0 - g * sin_t * cos_t)


def _wrap_half_pi(x: float) -> float:
    """Map x into (-pi/2, pi/2] by removing multiples of pi."""
    return x - math.pi * round(x / math.pi)


def _delay(theta: float, d: DimensionlessParams) -> float:
    """Wigner delay d(delta)/d(theta) by a central difference.

    The raw difference is reduced mod pi: the physical phase is defined mod
    pi and the atan2 branch can jump by pi across theta = W, while the true
    local change over 2e-6 stays far below pi/2 even on resonance.
    """
    lo = max(theta - DELAY_STEP, DEGENERATE_TOL)
    hi = theta + DELAY_STEP
    diff = _wrap_half_pi(_delta_branch(hi, d) - _delta_branch(lo, d))
    return diff / (hi - lo)


def _enhancement(theta: float, delta: float) -> float:
    num = math.sin(theta + delta)
    den = math.sin(theta)
    return (num / den) ** 2


def phase_shift(theta: float, d: DimensionlessParams) -> ScatterPoint:
    """Scattering point (delta, delay, enhancement) at real energy theta.

    theta within 1e-12 of a positive multiple of pi makes the enhancement
    0/0; such points are evaluated as the average of the two +/-1e-9 offset
    points and flagged. theta = W is the perfect-mirror limit: the outside
    wave has a node at the atom and the enhancement vanishes.
    """
    if not (theta > 0 and math.isfinite(theta)):
        raise ValueError(f"theta must be positive and finite, got {theta}")
    j_near = round(theta / math.pi)
    if j_near >= 1 and abs(theta - j_near * math.pi) < DEGENERATE_TOL:
        lo = phase_shift(theta - DEGENERATE_OFFSET, d)
        hi = phase_shift(theta + DEGENERATE_OFFSET, d)
        return ScatterPoint(
            theta=theta,
            delta=0.5 * (lo.delta + hi.delta),
            delay=0.5 * (lo.delay + hi.delay),
            enhancement=0.5 * (lo.enhancement + hi.enhancement),
            note=NODE_DEGENERACY_NOTE,
        )
    delta = _delta_branch(theta, d)
    delay = _delay(theta, d)
    if d.kappa > 0.0 and abs(d.W - theta) < DEGENERATE_TOL:
        # sin(theta + delta) -> 0 exactly in this limit: field node at the atom
        return ScatterPoint(theta=theta, delta=delta, delay=delay,
                            enhancement=0.0, note=MIRROR_LIMIT_NOTE)
    return ScatterPoint(theta=theta, delta=delta, delay=delay,
                        enhancement=_enhancement(theta, delta))


def enhancement_scan(d: DimensionlessParams, thetas) -> list[ScatterPoint]:
    """Scan phase_shift over a grid, unwrapping delta continuously.

    The pointwise branch is continuous except for pi jumps where the atan2
    output wraps (and across theta = W); unwrapping with period pi restores
    one smooth branch. Enhancement and delay are invariant under shifts of
    delta by multiples of pi, so only delta is rewritten.
    """
    points = [phase_shift(float(t), d) for t in thetas]
    if len(points) > 1:
        deltas = np.unwrap(np.array([p.delta for p in points]),
                           period=math.pi)
        points = [ScatterPoint(theta=p.theta, delta=float(dl), delay=p.delay,
                               enhancement=p.enhancement, note=p.note)
                  for p, dl in zip(points, deltas)]
    return points


def qnm_wavefunction(mode: QnmMode, xs) -> list[WaveSample]:
    """Quasi-normal-mode profile phi(x) for a refined mode, A = 1 inside.

    phi(x) = sin(theta x) on 0 <= x <= 1 and sin(theta) exp(i theta (x - 1))
    beyond the atom; with Im(theta) < 0 the outgoing tail grows like
    exp(|Im theta| (x - 1)), the expected quasi-normal-mode divergence.
    """
    if not mode.converged:
        raise ValueError(f"mode j={mode.j} is not converged; refusing to "
                         f"evaluate its wavefunction")
    theta = mode.theta.theta
    samples = []
    for x in xs:
        x = float(x)
        if x < 0:
            raise ValueError(f"x must be >= 0, got {x}")
        if x <= 1.0:
            value = cmath.sin(theta * x)
        else:
            value = cmath.sin(theta) * cmath.exp(1j * theta * (x - 1.0))
        samples.append(WaveSample(x=x, value=value, magnitude=abs(value)))
    return samples
