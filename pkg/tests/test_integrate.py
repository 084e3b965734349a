import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from dimred.errors import AccuracyError, UnsupportedOperationError
from dimred.graphs import enumerate_trees
from dimred.integrate import (MCEstimate, make_rng, mc_integrate, pair_sq_distances, quad_integrate,
                              radial_two_point, sample_tree_positions, sample_tree_surface,
                              sub_stream, uniform_directions)


def test_quad_examples():
    assert quad_integrate(lambda x: 1.0, [(0, 1)]) == pytest.approx(1.0, abs=1e-12)
    assert quad_integrate(lambda t: math.exp(-t), [(0, math.inf)], tol=1e-10) == pytest.approx(1.0, abs=1e-10)
    assert quad_integrate(lambda x, y: x * y, [(0, 1), (0, 1)]) == pytest.approx(0.25, abs=1e-12)


def test_quad_reports_failure_with_estimate():
    with pytest.raises(AccuracyError) as info:
        quad_integrate(lambda x: math.sin(1.0 / x) / x, [(1e-6, 1.0)], tol=1e-14, limit=5)
    assert info.value.estimate is not None


def test_quad_rejects_too_many_dimensions():
    with pytest.raises(ValueError):
        quad_integrate(lambda *x: 1.0, [(0, 1)] * 5)


def _uniform_square(rng, k):
    return rng.random((k, 2)), 1.0


def test_mc_constant_has_zero_stderr():
    est = mc_integrate(lambda p: np.full(len(p), 2.5), _uniform_square, 1000, seed=1)
    assert est.value == pytest.approx(2.5, abs=1e-15) and est.stderr == pytest.approx(0.0, abs=1e-15)


def test_mc_quarter_disk():
    est = mc_integrate(lambda p: (p ** 2).sum(axis=1) <= 1.0, _uniform_square, 200_000, seed=7)
    assert abs(est.value - math.pi / 4) <= 3 * est.stderr


def test_mc_same_seed_identical_and_seeds_differ():
    f = lambda p: p[:, 0] * p[:, 1]
    a = mc_integrate(f, _uniform_square, 10_000, seed=3)
    b = mc_integrate(f, _uniform_square, 10_000, seed=3)
    c = mc_integrate(f, _uniform_square, 10_000, seed=4)
    assert a == b and a.value != c.value


def test_mc_rejects_zero_samples():
    with pytest.raises(ValueError):
        mc_integrate(lambda p: p[:, 0], _uniform_square, 0, seed=0)


def _normal(rng, k):
    return rng.standard_normal(k), 1.0


def test_mc_coverage_over_seeds():
    hits = 0
    for seed in range(100):
        est = mc_integrate(lambda x: x * x, _normal, 100_000, seed=seed)
        hits += abs(est.value - 1.0) <= 4 * est.stderr
    assert hits >= 99


@pytest.mark.parametrize("k", [2, 3, 5])
def test_parallel_split_matches_serial(k):
    f = lambda p: np.cos(p[:, 0]) * p[:, 1]
    serial = mc_integrate(f, _uniform_square, 30_001, seed=11, partitions=k, workers=1, chunk=999)
    threaded = mc_integrate(f, _uniform_square, 30_001, seed=11, partitions=k, workers=k, chunk=999)
    assert serial == threaded
    assert serial.n_samples == 30_001


def test_chunk_size_does_not_change_the_stream():
    f = lambda p: p[:, 0]
    a = mc_integrate(f, _uniform_square, 10_000, seed=5, chunk=10_000)
    b = mc_integrate(f, _uniform_square, 10_000, seed=5, chunk=1_000)
    assert a.value == pytest.approx(b.value, rel=0, abs=1e-15)


def test_sub_streams_are_distinct():
    assert len({sub_stream(s, p) for s in range(4) for p in range(4)}) == 16
    a = make_rng(0, sub_stream(1, 0)).random(4)
    b = make_rng(0, sub_stream(1, 1)).random(4)
    assert not np.array_equal(a, b)


def test_estimate_scaling():
    e = MCEstimate(2.0, 0.1, 10, 0).scaled(-3.0)
    assert (e.value, e.stderr) == (-6.0, pytest.approx(0.3))


@pytest.mark.parametrize("d, weight", [(3, 4 * math.pi), (2, 2 * math.pi)])
def test_two_vertex_surface_weight(d, weight):
    tree = enumerate_trees(2)[0]
    cfg = sample_tree_surface(tree, d, 1.0, make_rng(0))
    assert cfg.weight == pytest.approx(weight)
    assert np.linalg.norm(cfg.positions[1] - cfg.positions[0]) == pytest.approx(1.0, abs=1e-12)


def test_surface_sampling_needs_two_dimensions():
    with pytest.raises(UnsupportedOperationError):
        sample_tree_surface(enumerate_trees(2)[0], 1, 1.0, make_rng(0))


@given(st.integers(2, 6), st.integers(0, 2 ** 32), st.sampled_from([2, 3]),
       st.floats(0.2, 3.0))
def test_tree_edges_have_exact_length(n, seed, d, r):
    rng = make_rng(seed)
    tree = enumerate_trees(n)[seed % n ** (n - 2)]
    pos, w = sample_tree_positions(tree, d, r, rng, 50)
    sq = pair_sq_distances(pos, sorted(tree.edges))
    assert np.max(np.abs(np.sqrt(sq) - r)) <= 1e-12
    assert w > 0


def test_edge_directions_uniform_over_octants():
    u = uniform_directions(make_rng(123), 80_000, 3)
    octant = (u[:, 0] > 0) * 4 + (u[:, 1] > 0) * 2 + (u[:, 2] > 0)
    counts = np.bincount(octant, minlength=8)
    assert stats.chisquare(counts).pvalue > 1e-3


def test_tree_edge_marginal_uniform():
    tree = enumerate_trees(4)[5]
    pos, _ = sample_tree_positions(tree, 3, 1.0, make_rng(9), 40_000)
    i, j = sorted(tree.edges)[-1]
    v = pos[:, j - 1] - pos[:, i - 1]
    octant = (v[:, 0] > 0) * 4 + (v[:, 1] > 0) * 2 + (v[:, 2] > 0)
    assert stats.chisquare(np.bincount(octant, minlength=8)).pvalue > 1e-3


def test_radial_two_point_disk_overlap():
    # indicator of |z1|,|z2| <= 1 and |z1 - z2| <= 1: area pi times lens-weighted integral
    h = lambda t1, t2, t12: (t12 <= 1.0).astype(float) * np.ones_like(t1 * t2)
    got = radial_two_point(h, 1.0, [], [1.0])
    assert got == pytest.approx(_lens_pair_measure(), abs=1e-9)


def _lens_pair_measure():
    from scipy import integrate

    # pairs in the unit disk at distance <= 1: integrate the intersection area of
    # the unit disk with a unit disk centred at radius rho
    def lens(rho):
        d = rho
        return 2 * math.acos(d / 2) - d / 2 * math.sqrt(4 - d * d)

    val, _ = integrate.quad(lambda rho: 2 * math.pi * rho * lens(rho), 0, 1, epsabs=1e-13)
    return val
