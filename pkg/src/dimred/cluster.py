"""Gas cluster coefficients, polymer tree integrals and the reduction checks.

Gas side: b_N = (1/N!) sum over connected graphs G on 1..N of the integral of
prod_{ij in G} (U_ij - 1) with particle 1 pinned at the origin.  Polymer
side: a_N = (1/N!) sum over trees T of the integral of
prod_{ij in T} 2U'_ij prod_{ij not in T} U_ij.  The reduction states
b_N = (-1)^(N+1) (2 pi)^(1-N) a_N between gas dimension D and polymer
dimension D + 2.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate as _sp_integrate

from .errors import SizeError, UnsupportedOperationError
from .graphs import AnchoredForest, LabeledTree, connected_graphs, enumerate_anchored_forests, \
    enumerate_trees
from .integrate import MCEstimate, mc_integrate, pair_sq_distances, radial_two_point, \
    sample_ramp_edges, sample_tree_positions, uniform_directions
from .potentials import HARD, PairPotential, SpeciesTable, make_hard_sphere, sphere_area
from .series import TruncatedSeries

SMOOTH_NODES = 20


@dataclass(frozen=True)
class GasCoefficients:
    dimension: int
    potential: PairPotential
    order: int
    b: TruncatedSeries


@dataclass(frozen=True)
class PolymerCoefficients:
    """a[N] is a float when known in closed form and an MCEstimate otherwise.

    ``partial`` is set when the sample budget ran out before ``order``;
    ``a`` then stops at the last order that could be estimated.
    """

    dimension: int
    potential: PairPotential
    order: int
    a: Tuple
    partial: bool = False


@dataclass(frozen=True)
class OrderCheck:
    order: int
    gas: float
    polymer: float
    stderr: Optional[float]
    error: float
    tol: float
    exact: bool
    passed: bool


def _pairs(n: int) -> List[Tuple[int, int]]:
    return list(itertools.combinations(range(1, n + 1), 2))


@functools.lru_cache(maxsize=None)
def _graph_columns(n: int) -> Tuple[Tuple[int, ...], ...]:
    col = {p: k for k, p in enumerate(_pairs(n))}
    return tuple(tuple(col[e] for e in g) for g in connected_graphs(n))


def connected_sum(f: np.ndarray, n: int) -> np.ndarray:
    """sum over connected graphs on 1..n of prod of bond columns f[:, pair]."""
    total = np.zeros(f.shape[0])
    for cols in _graph_columns(n):
        term = np.ones(f.shape[0])
        for c in cols:
            term = term * f[:, c]
        total += term
    return total


def _x_kinks(pot: PairPotential) -> Tuple[float, ...]:
    return tuple(math.sqrt(t) for t in pot.kinks if t > 0)


def _signed_sums(kinks: Sequence[float], terms: int) -> np.ndarray:
    vals = {0.0}
    frontier = {0.0}
    for _ in range(terms):
        frontier = {v + s * k for v in frontier for k in kinks for s in (1.0, -1.0)}
        vals |= frontier
    return np.array(sorted(vals))


def line_integral(integrand: Callable[[np.ndarray], np.ndarray], n: int,
                  kinks: Sequence[float], reach: float, nodes: int) -> float:
    """Integral over x_2..x_n in R of ``integrand(x)`` with x_1 = 0.

    ``integrand`` maps positions of shape (m, n) to m values and must vanish
    unless every |x_k| < (n-1) * reach.  It may jump or kink only where some
    |x_i - x_j| lies in ``kinks``.  Each variable is integrated by composite
    Gauss-Legendre on segments cut at x_j + (signed sums of up to n-1 kinks),
    which are all the places the partially integrated function can bend.
    """
    shifts = _signed_sums(kinks, n - 1)
    lo, hi = -(n - 1) * reach, (n - 1) * reach
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    pts = np.zeros((1, 1))
    w = np.ones(1)
    for _ in range(1, n):
        m = pts.shape[0]
        cand = np.clip((pts[:, :, None] + shifts).reshape(m, -1), lo, hi)
        edge = np.ones((m, 1))
        breaks = np.sort(np.concatenate([lo * edge, cand, hi * edge], axis=1), axis=1)
        half = 0.5 * (breaks[:, 1:] - breaks[:, :-1])
        mid = 0.5 * (breaks[:, 1:] + breaks[:, :-1])
        row, seg = np.nonzero(half > 0)
        x = (mid[row, seg][:, None] + half[row, seg][:, None] * xg).ravel()
        ww = (w[row][:, None] * half[row, seg][:, None] * wg).ravel()
        pts = np.concatenate([np.repeat(pts[row], nodes, axis=0), x[:, None]], axis=1)
        w = ww
    return float(np.dot(w, integrand(pts)))


def _check_potential(potential: PairPotential):
    if not isinstance(potential, PairPotential):
        raise TypeError("expected a PairPotential")


def _bond_matrix_1d(pots: Sequence[PairPotential], n: int):
    pairs = _pairs(n)
    i = np.array([p[0] - 1 for p in pairs], dtype=int)
    j = np.array([p[1] - 1 for p in pairs], dtype=int)

    def integrand(x):
        t = (x[:, i] - x[:, j]) ** 2
        f = np.empty_like(t)
        for k, pot in enumerate(pots):
            f[:, k] = pot(t[:, k]) - 1.0
        return connected_sum(f, n)

    return integrand


def _gas_integral_1d(pots: Sequence[PairPotential], n: int) -> float:
    """Connected-graph integral (not yet divided by n!) for per-pair potentials."""
    if n == 1:
        return 1.0
    kinks = sorted({k for p in pots for k in _x_kinks(p)})
    reach = max(math.sqrt(p.range_sq) for p in pots)
    hard = all(p.kind == HARD for p in pots)
    # piecewise-constant bonds make each level a polynomial of degree < n
    nodes = max(n, 2) if hard else SMOOTH_NODES
    return line_integral(_bond_matrix_1d(pots, n), n, kinks, reach, nodes)


def _radial_f_integral(potential: PairPotential) -> float:
    """integral over R^2 of U(|x|^2) - 1, as pi * int_0^inf (U(t) - 1) dt."""
    top = potential.range_sq
    pts = [k for k in potential.kinks if 0 < k < top]
    val, _ = _sp_integrate.quad(lambda t: potential(t) - 1.0, 0.0, top, points=pts or None,
                                epsabs=1e-13, epsrel=1e-13, limit=200)
    return math.pi * val


def mayer_coefficients(potential: PairPotential, D: int, N_max: int) -> GasCoefficients:
    """Pressure coefficients b_0..b_{N_max} of the D-dimensional gas."""
    _check_potential(potential)
    if D not in (0, 1, 2):
        raise SizeError("gas dimension must be 0, 1 or 2")
    if not 1 <= N_max <= 4:
        raise SizeError("N_max must lie in 1..4")
    if D == 2 and N_max > 3:
        raise SizeError("the two-dimensional gas is supported through N_max = 3")
    if D == 1 and potential.kind != HARD and N_max > 3:
        raise SizeError("smooth one-dimensional coefficients are supported through N_max = 3")

    if D == 0:
        # every particle sits at the single site: all bonds equal U(0) - 1
        f0 = Fraction(potential(0.0)) - 1
        coeffs = [Fraction(0)]
        for n in range(1, N_max + 1):
            total = sum(f0 ** len(g) for g in connected_graphs(n))
            coeffs.append(Fraction(total) / math.factorial(n))
        return GasCoefficients(D, potential, N_max, TruncatedSeries(coeffs, exact=True))

    coeffs = [0.0, 1.0]
    if D == 1:
        for n in range(2, N_max + 1):
            pots = [potential] * (n * (n - 1) // 2)
            coeffs.append(_gas_integral_1d(pots, n) / math.factorial(n))
    else:
        big_f = _radial_f_integral(potential)
        if N_max >= 2:
            coeffs.append(big_f / 2.0)
        if N_max >= 3:
            def h(t1, t2, t12):
                return (potential(t1) - 1.0) * (potential(t2) - 1.0) * (potential(t12) - 1.0)

            kinks = potential.kinks
            triangle = radial_two_point(h, potential.range_sq, kinks, kinks)
            coeffs.append((3.0 * big_f ** 2 + triangle) / 6.0)
    return GasCoefficients(D, potential, N_max, TruncatedSeries(coeffs[: N_max + 1], exact=False))


def _edge_weight_exact(potential: PairPotential, d: int) -> float:
    """integral over R^d of 2 U'(|y|^2) dy."""
    if potential.kind == HARD:
        # 2U'(|y|^2) = delta(|y| - R) / R
        return sphere_area(d, potential.radius) / potential.radius
    lo, hi = potential.kinks
    val, _ = _sp_integrate.quad(lambda t: t ** ((d - 2) / 2.0) * potential.derivative(t), lo, hi,
                                epsabs=1e-13, epsrel=1e-13, limit=200)
    return sphere_area(d) * val


def _stream_id(order: int, group: int, tree: int) -> int:
    return (order << 40) | (group << 20) | tree


def tree_integral(tree: LabeledTree, d: int, pair_potential: Callable[[Tuple[int, int]], PairPotential],
                  samples: int, seed: int, stream: int) -> MCEstimate:
    """MC estimate of int prod_{T} 2U'_ij prod_{not T} U_ij over y_2..y_N.

    Hard edges are placed on their contact sphere (surface measure); smooth
    edges are drawn from the ramp shell with importance weights.
    """
    n = tree.n_vertices
    others = [p for p in _pairs(n) if p not in tree.edges]
    edge_pots = {e: pair_potential(e) for e in tree.edges}
    other_pots = [pair_potential(p) for p in others]
    kinds = {p.kind for p in edge_pots.values()}
    if len(kinds) > 1:
        raise UnsupportedOperationError("a tree must use a single potential family")
    hard = kinds == {HARD}
    if hard:
        radii = {e: p.radius for e, p in edge_pots.items()}
        scale = 1.0 / math.prod(radii.values())

        def sampler(rng, k):
            pos, w = sample_tree_positions(tree, d, radii, rng, k)
            return pos, w * scale
    else:
        if len(set(edge_pots.values())) > 1:
            raise UnsupportedOperationError("smooth trees need one common potential")
        pot = next(iter(edge_pots.values()))

        def sampler(rng, k):
            return sample_ramp_edges(tree, d, pot, rng, k)

    def f(pos):
        if not others:
            return np.ones(pos.shape[0])
        t = pair_sq_distances(pos, others)
        out = np.ones(pos.shape[0])
        for k, pot in enumerate(other_pots):
            out = out * pot(t[:, k])
        return out

    return mc_integrate(f, sampler, samples, seed, stream=stream)


def _combine(estimates: Sequence[MCEstimate], factor: float, seed: int) -> MCEstimate:
    value = math.fsum(e.value for e in estimates) * factor
    stderr = math.sqrt(math.fsum(e.stderr ** 2 for e in estimates)) * abs(factor)
    return MCEstimate(value, stderr, sum(e.n_samples for e in estimates), seed)


def bp_coefficients(potential: PairPotential, d: int, N_max: int, budget: int = 10 ** 6,
                    seed: int = 0) -> PolymerCoefficients:
    """Polymer coefficients a_0..a_{N_max}; ``budget`` samples per MC order."""
    _check_potential(potential)
    if d not in (2, 3):
        raise SizeError("polymer dimension must be 2 or 3")
    if not 1 <= N_max <= 5:
        raise SizeError("N_max must lie in 1..5")
    a: list = [0.0, 1.0]
    if N_max >= 2:
        a.append(_edge_weight_exact(potential, d) / 2.0)
    partial = False
    for n in range(3, N_max + 1):
        trees = enumerate_trees(n)
        per_tree = budget // len(trees)
        if per_tree < 2:
            partial = True
            break
        ests = [tree_integral(t, d, lambda e: potential, per_tree, seed, _stream_id(n, 0, k))
                for k, t in enumerate(trees)]
        a.append(_combine(ests, 1.0 / math.factorial(n), seed))
    return PolymerCoefficients(d, potential, N_max, tuple(a), partial)


def _value(x) -> Tuple[float, Optional[float]]:
    if isinstance(x, MCEstimate):
        return x.value, x.stderr
    return float(x), None


def _compare(order: int, gas, polymer, tol: float) -> OrderCheck:
    g, p = float(gas), polymer
    pv, se = _value(p)
    factor = (-1) ** (order + 1) * (2.0 * math.pi) ** (1 - order)
    reduced = factor * pv
    err = abs(g - reduced)
    if se is None:
        return OrderCheck(order, g, reduced, None, err, tol, True, err <= tol)
    se = se * abs(factor)
    return OrderCheck(order, g, reduced, se, err, 3.0 * se, False, err <= 3.0 * se)


def check_reduction(D: int, potential: PairPotential, N_max: int, budget: int = 10 ** 6,
                    seed: int = 0, tol: float = 1e-12) -> List[OrderCheck]:
    """Order-by-order b_N against (-1)^(N+1) (2 pi)^(1-N) a_N in d = D + 2.

    Closed-form orders must agree to ``tol``; Monte Carlo orders to 3 stderr.
    """
    if D not in (0, 1):
        raise SizeError("reduction checks are available for D = 0 and D = 1")
    gas = mayer_coefficients(potential, D, N_max)
    poly = bp_coefficients(potential, D + 2, N_max, budget, seed)
    return [_compare(n, gas.b[n], poly.a[n], tol) for n in range(1, len(poly.a))]


@dataclass(frozen=True)
class PairOrderCheck:
    order: int
    gas: float
    polymer_exact: float
    polymer_mc: Optional[MCEstimate]
    error: float
    mc_error: Optional[float]
    tol: float
    passed: bool


def _cap_fraction(r: float, radius: float = 1.0) -> float:
    """Share of the contact sphere about one anchor lying outside the other's core (d = 3)."""
    if r >= 2.0 * radius:
        return 1.0
    return 0.5 + r / (4.0 * radius)


def gas_pair_coefficient(r: float, order: int, potential: PairPotential | None = None) -> float:
    """Coefficient of z^order in the 1-D gas two-point function g(0, r; z)."""
    pot = potential or make_hard_sphere(1.0)
    u12 = pot(r * r)
    if order == 2:
        return u12
    if order == 3:
        reach = math.sqrt(pot.range_sq)
        pts = sorted({s * k + c for k in _x_kinks(pot) for s in (1, -1) for c in (0.0, r)})
        val, _ = _sp_integrate.quad(lambda y: pot(y * y) * pot((y - r) ** 2) - 1.0,
                                    -reach - 1.0, r + reach + 1.0, points=pts,
                                    epsabs=1e-13, epsrel=0.0, limit=200)
        return u12 * val
    raise SizeError("pair coefficients are available for orders 2 and 3")


def _forest_mc(forest: AnchoredForest, r: float, samples: int, seed: int, stream: int,
               potential: PairPotential) -> MCEstimate:
    """integral over free vertices of prod_F 2U' prod_{not F} U, anchors at 0 and r e_1 (d = 3)."""
    n, d = forest.n_vertices, 3
    adj = {v: [] for v in range(1, n + 1)}
    for i, j in sorted(forest.edges):
        adj[i].append(j)
        adj[j].append(i)
    order = []
    seen = set(range(1, forest.n_anchors + 1))
    queue = list(range(1, forest.n_anchors + 1))
    while queue:
        nxt = []
        for v in queue:
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    order.append((v, w))
                    nxt.append(w)
        queue = nxt
    rad = potential.radius
    weight = (sphere_area(d, rad) / rad) ** len(order)
    others = [p for p in _pairs(n) if p not in forest.edges]

    def sampler(rng, k):
        pos = np.zeros((k, n, d))
        pos[:, 1, 0] = r
        for parent, child in order:
            pos[:, child - 1] = pos[:, parent - 1] + rad * uniform_directions(rng, k, d)
        return pos, weight

    def f(pos):
        t = pair_sq_distances(pos, others)
        return np.prod(potential(t), axis=1)

    return mc_integrate(f, sampler, samples, seed, stream=stream)


def pair_correlation_reduction_check(r: float, order: int = 3, budget: int = 10 ** 6,
                                     seed: int = 0, tol: float = 1e-3) -> List[PairOrderCheck]:
    """Gas g(0, r; z) coefficients against (-2 pi)^2 g_BP(r; -z / 2 pi) in d = 3.

    Polymer orders z^(p+2) come from anchored forests with p free vertices,
    in closed form (spherical caps) and by Monte Carlo.
    """
    if not 1.0 < r < 2.0:
        raise ValueError("separation must lie in (1, 2)")
    if order not in (2, 3):
        raise SizeError("order must be 2 or 3")
    pot = make_hard_sphere(1.0)
    out = []
    for m in range(2, order + 1):
        p = m - 2
        gas = gas_pair_coefficient(r, m, pot)
        prefactor = (-1.0 / (2.0 * math.pi)) ** p / math.factorial(p)
        if p == 0:
            exact = pot(r * r)
            mc = None
        else:
            forests = enumerate_anchored_forests(2, 2 + p)
            exact = prefactor * len(forests) * 4.0 * math.pi * _cap_fraction(r)
            per = budget // len(forests)
            ests = [_forest_mc(fo, r, per, seed, _stream_id(m, 1, k), pot)
                    for k, fo in enumerate(forests)]
            mc = _combine(ests, prefactor, seed)
        err = abs(gas - exact)
        if mc is None:
            out.append(PairOrderCheck(m, gas, exact, None, err, None, tol, err <= tol))
        else:
            mc_err = abs(gas - mc.value)
            ok = err <= tol and mc_err <= 3.0 * mc.stderr
            out.append(PairOrderCheck(m, gas, exact, mc, err, mc_err, tol, ok))
    return out


@dataclass(frozen=True)
class WardCheck:
    r: float
    derivative: float
    half_two_point: float
    error: float
    tol: float
    passed: bool


def ward_check(r: float, step: float = 1e-5, tol: float = 1e-6) -> WardCheck:
    """d/dt of the order-u^3 anchored-forest value against half the u^3 tree value, t = r^2.

    The forest value is 4 pi (1 + r/2) from two spherical caps; the tree value
    is the contact-circle measure 2 pi / r of a point touching both anchors.
    """
    if not 1.0 < r < 2.0:
        raise ValueError("separation must lie in (1, 2)")

    def forest(t):
        return 2.0 * 4.0 * math.pi * _cap_fraction(math.sqrt(t))

    t = r * r
    deriv = (forest(t + step) - forest(t - step)) / (2.0 * step)
    half = 0.5 * (2.0 * math.pi / r)
    err = abs(deriv - half)
    return WardCheck(r, deriv, half, err, tol, err <= tol)


def _assignments(k: int, n: int):
    return itertools.product(range(k), repeat=n)


def multispecies_gas(table: SpeciesTable, N_max: int) -> List[float]:
    """b_1..b_N at z_alpha = w_alpha z for a 1-D hard-core species table.

    Every species assignment is visited; assignments inducing the same
    pair-radius pattern share one integral.
    """
    w = table.activities
    out = []
    for n in range(1, N_max + 1):
        groups: Dict[Tuple[float, ...], float] = {}
        for assign in _assignments(table.n_species, n):
            key = tuple(table.radius(assign[i - 1], assign[j - 1]) for i, j in _pairs(n))
            groups[key] = groups.get(key, 0.0) + math.prod(w[a] for a in assign)
        total = 0.0
        for key, weight in groups.items():
            pots = [make_hard_sphere(rad) for rad in key]
            total += weight * _gas_integral_1d(pots, n)
        out.append(total / math.factorial(n))
    return out


def multispecies_polymer(table: SpeciesTable, N_max: int, budget: int = 10 ** 6,
                         seed: int = 0) -> List:
    """a_1..a_N in d = 3 with per-pair hard-core radii; floats or MCEstimates."""
    w = table.activities
    out: list = []
    for n in range(1, N_max + 1):
        groups: Dict[Tuple[float, ...], float] = {}
        for assign in _assignments(table.n_species, n):
            key = tuple(table.radius(assign[i - 1], assign[j - 1]) for i, j in _pairs(n))
            groups[key] = groups.get(key, 0.0) + math.prod(w[a] for a in assign)
        if n == 1:
            out.append(sum(groups.values()))
            continue
        if n == 2:
            out.append(math.fsum(wt * _edge_weight_exact(make_hard_sphere(key[0]), 3)
                                 for key, wt in groups.items()) / 2.0)
            continue
        trees = enumerate_trees(n)
        per = budget // (len(trees) * len(groups))
        if per < 2:
            raise SizeError("sample budget too small for this order")
        ests = []
        for g, (key, wt) in enumerate(groups.items()):
            radius_of = dict(zip(_pairs(n), key))
            for k, tree in enumerate(trees):
                e = tree_integral(tree, 3, lambda p: make_hard_sphere(radius_of[p]), per, seed,
                                  _stream_id(n, g, k))
                ests.append(e.scaled(wt))
        out.append(_combine(ests, 1.0 / math.factorial(n), seed))
    return out


def multispecies_reduction_check(table: SpeciesTable, N_max: int = 3, budget: int = 10 ** 6,
                                 seed: int = 0, tol: float = 1e-6) -> List[OrderCheck]:
    """Multispecies 1-D gas coefficients against 3-D polymer tree sums, order by order."""
    if not 1 <= N_max <= 3:
        raise SizeError("N_max must lie in 1..3")
    gas = multispecies_gas(table, N_max)
    poly = multispecies_polymer(table, N_max, budget, seed)
    return [_compare(n, gas[n - 1], poly[n - 1], tol) for n in range(1, N_max + 1)]
