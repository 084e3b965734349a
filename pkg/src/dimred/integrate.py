"""Deterministic quadrature and seeded Monte Carlo.

Random streams come from Philox4x64 keyed by (master seed, stream index);
the generator's counter starts at zero.  Monte Carlo work is split into a
fixed number of partitions, partition p drawing from stream
``(stream << 32) | p``.  Partition results are merged in index order, so the
value depends on (integrand, n_samples, seed, stream, partitions) only and
not on how many workers ran the partitions.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Tuple

import numpy as np
from scipy import integrate as _sp_integrate

from .errors import AccuracyError, UnsupportedOperationError
from .graphs import LabeledTree
from .potentials import sphere_area

MASK64 = (1 << 64) - 1


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for (master seed, stream index)."""
    key = np.array([int(seed) & MASK64, int(stream) & MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sub_stream(stream: int, partition: int) -> int:
    return ((int(stream) << 32) | int(partition)) & MASK64


@dataclass(frozen=True)
class MCEstimate:
    value: float
    stderr: float
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("an estimate needs at least one sample")
        if self.stderr < 0:
            raise ValueError("stderr must be non-negative")

    def scaled(self, factor: float) -> "MCEstimate":
        return MCEstimate(self.value * factor, self.stderr * abs(factor), self.n_samples, self.seed)


def _chunk_moments(f, sampler, n, rng, chunk):
    """Count, mean and sum of squared deviations over n draws."""
    count, mean, m2 = 0, 0.0, 0.0
    while count < n:
        k = min(chunk, n - count)
        points, weight = sampler(rng, k)
        vals = np.asarray(f(points), dtype=float) * weight
        if vals.shape != (k,):
            vals = np.broadcast_to(vals, (k,))
        cm = float(np.mean(vals))
        cm2 = float(np.sum((vals - cm) ** 2))
        total = count + k
        delta = cm - mean
        mean += delta * k / total
        m2 += cm2 + delta * delta * count * k / total
        count = total
    return count, mean, m2


def mc_integrate(f: Callable, sampler: Callable, n_samples: int, seed: int,
                 partitions: int = 1, stream: int = 0, workers: int = 1,
                 chunk: int = 1 << 18) -> MCEstimate:
    """Estimate E[f(X) * w(X)] for draws ``points, w = sampler(rng, k)``.

    ``sampler`` returns k points and the matching weights (1/density, or
    any importance weight); ``f`` maps the points to k values.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if partitions < 1:
        raise ValueError("partitions must be positive")
    partitions = min(partitions, n_samples)
    sizes = [n_samples // partitions + (1 if p < n_samples % partitions else 0)
             for p in range(partitions)]

    def run(p):
        rng = make_rng(seed, sub_stream(stream, p))
        return _chunk_moments(f, sampler, sizes[p], rng, chunk)

    if workers > 1 and partitions > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(partitions)))
    else:
        parts = [run(p) for p in range(partitions)]

    count, mean, m2 = 0, 0.0, 0.0
    for c, m, s in parts:
        total = count + c
        delta = m - mean
        mean += delta * c / total
        m2 += s + delta * delta * count * c / total
        count = total
    var = m2 / (count - 1) if count > 1 else 0.0
    return MCEstimate(mean, math.sqrt(var / count), count, int(seed) & MASK64)


def quad_integrate(f: Callable, box: Sequence[Tuple[float, float]], tol: float = 1e-10,
                   points: Sequence[Sequence[float]] | None = None, limit: int = 200) -> float:
    """Adaptive cubature of ``f(x1, ..., xk)`` over a box of at most 4 dims.

    Infinite bounds are allowed (QUADPACK maps them internally).  Raises
    AccuracyError, carrying the best estimate, if QUADPACK reports that the
    subdivision limit was hit or the error estimate exceeds ``tol``.
    """
    box = [(float(a), float(b)) for a, b in box]
    if not 1 <= len(box) <= 4:
        raise ValueError("quad_integrate handles 1 to 4 dimensions")
    opts = []
    for k in range(len(box)):
        o = {"limit": limit, "epsabs": tol, "epsrel": 0.0}
        if points is not None and points[k]:
            a, b = box[k]
            if math.isfinite(a) and math.isfinite(b):
                o["points"] = [p for p in points[k] if a < p < b]
        opts.append(o)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", _sp_integrate.IntegrationWarning)
        value, err = _sp_integrate.nquad(f, box, opts=opts)
    trouble = [w for w in caught if issubclass(w.category, _sp_integrate.IntegrationWarning)]
    if trouble or err > tol:
        raise AccuracyError(f"quadrature did not reach tol={tol} (error estimate {err:.3g})",
                            estimate=value, error=err)
    return value


def gauss_legendre_segments(breaks, nodes: int):
    """Nodes and weights of a composite Gauss-Legendre rule over sorted breaks."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[:-1], breaks[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    xs = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return xs, ws


def _graded_segments(breaks, nodes: int):
    """Composite rule with t = a + (b - a) * smoothstep5(u) on each segment.

    The map flattens square-root endpoint behaviour, which the angular
    integral in ``radial_two_point`` shows wherever a kink curve starts.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    u = 0.5 * (x + 1.0)
    shape = u ** 3 * (10.0 + u * (-15.0 + 6.0 * u))
    jac = 15.0 * u * u * (1.0 - u) ** 2 * w
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[:-1], breaks[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    xs = (a[:, None] + (b - a)[:, None] * shape).ravel()
    ws = ((b - a)[:, None] * jac).ravel()
    return xs, ws


def uniform_directions(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """n unit vectors uniform on the (d-1)-sphere, from normalized Gaussians."""
    g = rng.standard_normal((n, d))
    norm = np.sqrt(np.einsum("ij,ij->i", g, g))
    return g / norm[:, None]


@dataclass(frozen=True)
class TreeConfiguration:
    dimension: int
    positions: np.ndarray
    weight: float


def _edge_radius(radius, edge):
    if isinstance(radius, Mapping):
        return float(radius[edge])
    if callable(radius):
        return float(radius(edge))
    return float(radius)


def sample_tree_positions(tree: LabeledTree, d: int, radius, rng: np.random.Generator,
                          n: int) -> Tuple[np.ndarray, float]:
    """Batch of n placements with every tree edge of exact length.

    ``radius`` is a float or a map from sorted edge to its length.  Returns
    positions of shape (n, N, d) with vertex 1 at the origin and the weight
    prod over edges of the sphere area S_{d-1}(R_e).
    """
    if d < 2:
        raise UnsupportedOperationError("surface sampling needs dimension >= 2")
    big_n = tree.n_vertices
    pos = np.zeros((n, big_n, d))
    weight = 1.0
    for parent, child in tree.bfs_edges(1):
        r = _edge_radius(radius, (min(parent, child), max(parent, child)))
        if not r > 0:
            raise ValueError("edge lengths must be positive")
        pos[:, child - 1, :] = pos[:, parent - 1, :] + r * uniform_directions(rng, n, d)
        weight *= sphere_area(d, r)
    return pos, weight


def sample_tree_surface(tree: LabeledTree, d: int, radius, rng: np.random.Generator) -> TreeConfiguration:
    """One placement realizing prod_{ij in T} delta(|y_i - y_j| - R) as surface measure."""
    pos, weight = sample_tree_positions(tree, d, radius, rng, 1)
    return TreeConfiguration(d, pos[0], weight)


def sample_ramp_edges(tree: LabeledTree, d: int, potential, rng: np.random.Generator,
                      n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Placements with each tree edge length drawn from the ramp shell of U'.

    Edge vectors are uniform in volume on the shell where U'(|y|^2) > 0;
    the returned per-sample weight is prod over edges of 2 U'(|y_e|^2)
    times the shell volume, an unbiased importance weight for
    prod_{ij in T} 2U'_ij dy.
    """
    lo_t, hi_t = potential.kinks
    r_lo, r_hi = math.sqrt(lo_t), math.sqrt(hi_t)
    shell = sphere_area(d) / d * (r_hi ** d - r_lo ** d)
    big_n = tree.n_vertices
    pos = np.zeros((n, big_n, d))
    weight = np.ones(n)
    for parent, child in tree.bfs_edges(1):
        u = rng.random(n)
        r = (r_lo ** d + u * (r_hi ** d - r_lo ** d)) ** (1.0 / d)
        pos[:, child - 1, :] = pos[:, parent - 1, :] + r[:, None] * uniform_directions(rng, n, d)
        weight *= 2.0 * potential.derivative(r * r) * shell
    return pos, weight


def pair_sq_distances(pos: np.ndarray, pairs) -> np.ndarray:
    """Squared distances for the listed 1-based vertex pairs, shape (n, len(pairs))."""
    i = np.array([p[0] - 1 for p in pairs], dtype=int)
    j = np.array([p[1] - 1 for p in pairs], dtype=int)
    diff = pos[:, i, :] - pos[:, j, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def radial_two_point(h: Callable, t_max: float, root_kinks: Sequence[float],
                     pair_kinks: Sequence[float], tol: float = 1e-11,
                     phi_nodes: int = 32, t_nodes: int = 32) -> float:
    """Integral of h(t1, t2, t12) over C^2 (or R^2 x R^2) with d^2z d^2z measure.

    With t_i = |z_i|^2 and phi the relative angle the measure becomes
    pi dt1 dt2 dphi on [0, t_max]^2 x [0, pi].  The angle integral uses a
    composite Gauss-Legendre rule split where t12 crosses a pair kink, and
    so does the t2 integral, split on every curve where such a crossing
    appears or disappears; ``h`` must accept arrays.  The outer t1 integral
    is adaptive.
    """
    pair_kinks = sorted(set(float(c) for c in pair_kinks if c > 0))
    root_kinks = sorted(set(float(c) for c in root_kinks if 0 < c < t_max))
    sqrt_c = np.sqrt(np.array(pair_kinks)) if pair_kinks else np.zeros(0)
    xg, wg = np.polynomial.legendre.leggauss(phi_nodes)

    def phi_integral(t1, t2):
        # t2 is an array; each row gets the same number of (possibly empty) segments
        a = t1 + t2
        b = 2.0 * np.sqrt(t1 * t2)
        cuts = [np.zeros_like(t2), np.full_like(t2, math.pi)]
        for c in pair_kinks:
            with np.errstate(divide="ignore", invalid="ignore"):
                cos_val = np.where(b > 0, (a - c) / b, np.sign(a - c))
            cuts.append(np.arccos(np.clip(cos_val, -1.0, 1.0)))
        cuts = np.sort(np.stack(cuts, axis=1), axis=1)
        lo, hi = cuts[:, :-1], cuts[:, 1:]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        phi = mid[..., None] + half[..., None] * xg
        t12 = a[:, None, None] - b[:, None, None] * np.cos(phi)
        vals = h(t1, t2[:, None, None], t12)
        return np.einsum("rsk,rs,k->r", vals, half, wg)

    def inner(t1):
        s1 = math.sqrt(t1)
        pts = set(root_kinks)
        for sc in sqrt_c:
            for v in (s1 + sc, s1 - sc):
                pts.add(float(v * v))
        breaks = [0.0] + sorted(p for p in pts if 0 < p < t_max) + [t_max]
        t2, w2 = _graded_segments(breaks, t_nodes)
        return float(np.dot(w2, phi_integral(t1, t2)))

    edge = math.sqrt(t_max)
    outer_pts = set(root_kinks) | set(pair_kinks)
    outer_pts |= {float((edge - sc) ** 2) for sc in sqrt_c} | {float((edge + sc) ** 2) for sc in sqrt_c}
    outer_pts = sorted(p for p in outer_pts if 0 < p < t_max)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", _sp_integrate.IntegrationWarning)
        val, err = _sp_integrate.quad(inner, 0.0, t_max, points=outer_pts or None,
                                      limit=400, epsabs=tol, epsrel=0.0)
    if any(issubclass(w.category, _sp_integrate.IntegrationWarning) for w in caught):
        raise AccuracyError("radial quadrature did not converge", estimate=math.pi * val, error=err)
    return math.pi * val
