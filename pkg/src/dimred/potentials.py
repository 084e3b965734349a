"""Pair weights U(t) of squared distance t, and their derivatives.

Two families are provided: the hard step U(t) = step(t - R^2), whose
derivative is a surface delta and is never evaluated pointwise, and the
quintic smooth step, a C^2 monotone ramp with a closed-form derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .errors import UnsupportedOperationError

HARD = "hard-step"
SMOOTH = "smooth-step"


@dataclass(frozen=True)
class QuinticRamp:
    """Profile moving from ``start`` to ``end`` as t crosses [lo, hi].

    Uses the C^2 smoothstep 6u^5 - 15u^4 + 10u^3 with u = (t - lo)/(hi - lo),
    so the value and its first two derivatives are continuous everywhere.
    """

    lo: float
    hi: float
    start: float = 0.0
    end: float = 1.0

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("ramp needs hi > lo")

    @property
    def kinks(self) -> Tuple[float, float]:
        return (self.lo, self.hi)

    def _u(self, t):
        return np.clip((np.asarray(t, dtype=float) - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def __call__(self, t):
        u = self._u(t)
        s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
        out = self.start + (self.end - self.start) * s
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, t):
        u = self._u(t)
        ds = 30.0 * u * u * (1.0 - u) ** 2 / (self.hi - self.lo)
        out = (self.end - self.start) * ds
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class PairPotential:
    """Weight U(t) with t the squared separation.

    For the hard step ``radius`` is the contact distance and U(R^2) = 1
    (touching is allowed).  For the smooth step ``width`` is eps and the
    ramp occupies t in [1 - eps, 1 + eps].
    """

    kind: str
    radius: float = 1.0
    width: float = 0.0
    _ramp: QuinticRamp | None = field(default=None, repr=False, compare=False)

    @property
    def surface_derivative(self) -> bool:
        """True when U' is a delta on |y| = R (hard step)."""
        return self.kind == HARD

    @property
    def kinks(self) -> Tuple[float, ...]:
        """Values of t where U is not smooth."""
        if self.kind == HARD:
            return (self.radius ** 2,)
        return self._ramp.kinks

    @property
    def range_sq(self) -> float:
        """Smallest t beyond which U == 1."""
        return max(self.kinks)

    def __call__(self, t):
        if self.kind == HARD:
            out = (np.asarray(t, dtype=float) >= self.radius ** 2).astype(float)
            return float(out) if np.ndim(out) == 0 else out
        return self._ramp(t)

    evaluate = __call__

    def derivative(self, t):
        if self.kind == HARD:
            raise UnsupportedOperationError(
                "hard-step derivative is a surface delta; use surface-measure integration")
        return self._ramp.derivative(t)


def make_hard_sphere(radius: float) -> PairPotential:
    if not radius > 0:
        raise ValueError("radius must be positive")
    return PairPotential(HARD, radius=float(radius))


def make_smooth_step(eps: float) -> PairPotential:
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    return PairPotential(SMOOTH, radius=1.0, width=float(eps),
                         _ramp=QuinticRamp(1.0 - eps, 1.0 + eps, 0.0, 1.0))


def sphere_area(d: int, radius: float = 1.0) -> float:
    """Surface area of the (d-1)-sphere of the given radius in R^d."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0) * radius ** (d - 1)


@dataclass(frozen=True)
class SpeciesTable:
    n_species: int
    radii: Tuple[Tuple[float, ...], ...]
    potentials: Tuple[Tuple[PairPotential, ...], ...]
    activities: Tuple[float, ...]

    def potential(self, a: int, b: int) -> PairPotential:
        return self.potentials[a][b]

    def radius(self, a: int, b: int) -> float:
        return self.radii[a][b]


def make_species_table(radii, activities) -> SpeciesTable:
    """Hard-core table U^{ab}(t) = step(t - R_ab^2); species are 0-based."""
    r = np.asarray(radii, dtype=float)
    if r.ndim == 0:
        r = r.reshape(1, 1)
    k = r.shape[0]
    if r.shape != (k, k):
        raise ValueError("radii must be a square matrix")
    if not np.array_equal(r, r.T):
        raise ValueError("radii must be symmetric")
    if np.any(r <= 0):
        raise ValueError("radii must be positive")
    acts = tuple(float(a) for a in np.atleast_1d(activities))
    if len(acts) != k:
        raise ValueError("need one activity per species")
    rad = tuple(tuple(float(x) for x in row) for row in r)
    pots = tuple(tuple(make_hard_sphere(x) for x in row) for row in rad)
    return SpeciesTable(k, rad, pots, acts)
