"""Direct numerical check of the forest integral identity for small n.

For f(t) depending on t_i = |z_i|^2 and t_ij = |z_i - z_j|^2, z_i in C,

    f(0) = sum over (F, R) of  integral over C^n of  f^{(F,R)} prod_i d^2z_i / (-pi),

where (F, R) runs over forests with one root per tree and f^{(F,R)}
differentiates in t_ij for ij in F and in t_i for i in R.  Test functions are
products of quintic ramps, so every partial derivative is available in closed
form and no numerical differentiation is involved.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import integrate as _sp_integrate

from .errors import SizeError
from .graphs import RootedForest, enumerate_rooted_forests
from .integrate import MCEstimate, mc_integrate, radial_two_point
from .potentials import QuinticRamp


@dataclass(frozen=True)
class SymmetricTestFunction:
    """f = prod_i g(t_i) * prod_{i<j} u(t_ij).

    ``root_profile`` must vanish beyond its ramp so f has compact support;
    ``pair_profile`` of None means f has no pair dependence.
    """

    n: int
    root_profile: QuinticRamp
    pair_profile: Optional[QuinticRamp] = None
    pairs: Tuple[Tuple[int, int], ...] = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one point")
        if self.root_profile.end != 0.0:
            raise ValueError("root profile must vanish at large t for compact support")
        object.__setattr__(self, "pairs", tuple(itertools.combinations(range(1, self.n + 1), 2)))

    @property
    def support(self) -> float:
        """t beyond which the root profile is zero."""
        return self.root_profile.hi

    def at_zero(self) -> float:
        val = self.root_profile(0.0) ** self.n
        if self.pair_profile is not None:
            val *= self.pair_profile(0.0) ** len(self.pairs)
        return val

    def forest_terms(self) -> List[RootedForest]:
        terms = enumerate_rooted_forests(self.n, cap=max(self.n, 6))
        if self.pair_profile is None:
            # u' = 0, so only the edgeless forest rooted everywhere survives
            terms = [t for t in terms if not t.edges]
        return terms

    def partial(self, term: RootedForest, t_root: np.ndarray, t_pair: np.ndarray) -> np.ndarray:
        """f^{(F,R)} on arrays t_root (k, n) and t_pair (k, n_pairs)."""
        g = self.root_profile
        out = np.ones(t_root.shape[0])
        for i in range(self.n):
            prof = g.derivative if (i + 1) in term.roots else g
            out = out * prof(t_root[:, i])
        if self.pair_profile is not None:
            u = self.pair_profile
            for k, pair in enumerate(self.pairs):
                prof = u.derivative if pair in term.edges else u
                out = out * prof(t_pair[:, k])
        return out


def ramp_test_function(n: int, with_pair: bool = True, g0: float = 1.0,
                       u0: float = 0.5) -> SymmetricTestFunction:
    """Standard test family: g ramps g0 -> 0 over t in [0.5, 1.5], u ramps u0 -> 1 over [0.2, 0.8]."""
    g = QuinticRamp(0.5, 1.5, g0, 0.0)
    u = QuinticRamp(0.2, 0.8, u0, 1.0) if with_pair else None
    return SymmetricTestFunction(n, g, u)


def lhs(f: SymmetricTestFunction) -> float:
    return f.at_zero()


def _rhs_quad(f: SymmetricTestFunction, tol: float) -> float:
    g = f.root_profile
    if f.n == 1:
        val, _ = _sp_integrate.quad(g.derivative, 0.0, f.support, points=list(g.kinks),
                                    epsabs=tol * 1e-2, epsrel=0.0, limit=200)
        # d^2z / (-pi) = -dt after the angular integral
        return -val
    if f.n == 2:
        terms = f.forest_terms()
        u = f.pair_profile

        def h(t1, t2, t12):
            t1, t2, t12 = np.broadcast_arrays(t1, t2, t12)
            shape = t12.shape
            tr = np.stack([t1.ravel(), t2.ravel()], axis=1)
            tp = t12.reshape(-1, 1)
            total = sum(f.partial(term, tr, tp) for term in terms)
            return total.reshape(shape)

        pair_kinks = u.kinks if u is not None else ()
        return radial_two_point(h, f.support, g.kinks, pair_kinks, tol=tol * 1e-2) / math.pi ** 2
    raise SizeError("quadrature route supports n <= 2; use method='mc' for larger n")


def _rhs_mc(f: SymmetricTestFunction, samples: int, seed: int, partitions: int,
            workers: int) -> MCEstimate:
    if f.n > 4:
        raise SizeError("Monte Carlo route supports n <= 4")
    terms = f.forest_terms()
    radius = math.sqrt(f.support)
    n = f.n
    pairs = f.pairs
    # each z_i uniform on the disk |z|^2 <= support: d^2z/(-pi) has mass -support there
    weight = (-f.support) ** n

    def sampler(rng, k):
        r = radius * np.sqrt(rng.random((k, n)))
        theta = 2.0 * math.pi * rng.random((k, n))
        return r * np.exp(1j * theta), weight

    root_masks = np.array([[(i + 1) in term.roots for i in range(n)] for term in terms])
    edge_masks = np.array([[pair in term.edges for pair in pairs] for term in terms]).reshape(len(terms), len(pairs))
    g, u = f.root_profile, f.pair_profile

    def integrand(z):
        t_root = np.abs(z) ** 2
        gv, gd = g(t_root), g.derivative(t_root)
        if pairs and u is not None:
            t_pair = np.stack([np.abs(z[:, i - 1] - z[:, j - 1]) ** 2 for i, j in pairs], axis=1)
            uv, ud = u(t_pair), u.derivative(t_pair)
        total = np.zeros(z.shape[0])
        for rmask, emask in zip(root_masks, edge_masks):
            term = np.prod(np.where(rmask, gd, gv), axis=1)
            if pairs and u is not None:
                term = term * np.prod(np.where(emask, ud, uv), axis=1)
            total += term
        return total

    return mc_integrate(integrand, sampler, samples, seed, partitions=partitions, workers=workers)


def rhs(f: SymmetricTestFunction, method: str = "quad", samples: int = 10 ** 6,
        seed: int = 0, tol: float = 1e-8, partitions: int = 1, workers: int = 1):
    """Forest-root sum; float for method 'quad', MCEstimate for 'mc'."""
    if method == "quad":
        return _rhs_quad(f, tol)
    if method == "mc":
        return _rhs_mc(f, samples, seed, partitions, workers)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class ForestRootReport:
    n: int
    method: str
    lhs: float
    rhs: float
    error: float
    stderr: Optional[float]
    tol: float
    n_terms: int
    passed: bool


def check_identity(f: SymmetricTestFunction, method: str = "quad", samples: int = 10 ** 6,
                   seed: int = 0, tol: float = 1e-8, partitions: int = 1,
                   workers: int = 1) -> ForestRootReport:
    """Compare f(0) with the forest-root sum: |diff| <= tol (quad) or 3 stderr (mc)."""
    left = lhs(f)
    right = rhs(f, method, samples=samples, seed=seed, tol=tol, partitions=partitions,
                workers=workers)
    n_terms = len(enumerate_rooted_forests(f.n, cap=max(f.n, 6)))
    if isinstance(right, MCEstimate):
        err = abs(left - right.value)
        return ForestRootReport(f.n, method, left, right.value, err, right.stderr,
                                3.0 * right.stderr, n_terms, err <= 3.0 * right.stderr)
    err = abs(left - right)
    return ForestRootReport(f.n, method, left, right, err, None, tol, n_terms, err <= tol)
