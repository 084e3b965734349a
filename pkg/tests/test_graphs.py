import itertools
import math

import pytest
from hypothesis import given, strategies as st

from dimred.errors import SizeError
from dimred.graphs import (LabeledTree, connected_graphs, enumerate_anchored_forests,
                           enumerate_rooted_forests, enumerate_trees, prufer_decode,
                           prufer_encode, spanning_tree_count)


def test_single_vertex_tree():
    trees = enumerate_trees(1)
    assert len(trees) == 1 and trees[0].edges == frozenset()


@pytest.mark.parametrize("n, count", [(2, 1), (3, 3), (4, 16), (5, 125), (6, 1296), (7, 16807)])
def test_tree_count_matches_cayley(n, count):
    assert len(enumerate_trees(n)) == count == n ** (n - 2)


def test_tree_cap_raises():
    with pytest.raises(SizeError):
        enumerate_trees(10)
    with pytest.raises(SizeError):
        enumerate_trees(5, cap=4)


@pytest.mark.parametrize("n", range(1, 6))
def test_trees_equal_brute_force(n, forests_by_size):
    expected = {e for e, comps in forests_by_size[n] if len(comps) == 1}
    got = [t.edges for t in enumerate_trees(n)]
    assert len(got) == len(set(got))
    assert set(got) == expected


def test_rooted_forest_small_cases():
    assert [(f.edges, f.roots) for f in enumerate_rooted_forests(1)] == [(frozenset(), frozenset({1}))]
    got = {(f.edges, f.roots) for f in enumerate_rooted_forests(2)}
    assert got == {(frozenset(), frozenset({1, 2})),
                   (frozenset({(1, 2)}), frozenset({1})),
                   (frozenset({(1, 2)}), frozenset({2}))}


@pytest.mark.parametrize("n", range(1, 7))
def test_rooted_forest_count(n):
    assert len(enumerate_rooted_forests(n)) == (n + 1) ** (n - 1)


@pytest.mark.parametrize("n", range(1, 6))
def test_rooted_forests_equal_brute_force(n, forests_by_size):
    expected = set()
    for edges, comps in forests_by_size[n]:
        for roots in itertools.product(*[sorted(c) for c in comps]):
            expected.add((edges, frozenset(roots)))
    got = [(f.edges, f.roots) for f in enumerate_rooted_forests(n)]
    assert len(got) == len(set(got))
    assert set(got) == expected


def test_anchored_examples():
    assert [f.edges for f in enumerate_anchored_forests(3, 3)] == [frozenset()]
    got = {f.edges for f in enumerate_anchored_forests(2, 3)}
    assert got == {frozenset({(1, 3)}), frozenset({(2, 3)})}
    with pytest.raises(ValueError):
        enumerate_anchored_forests(4, 3)


@pytest.mark.parametrize("n", range(1, 7))
def test_single_anchor_gives_trees(n):
    assert {f.edges for f in enumerate_anchored_forests(1, n)} == {t.edges for t in enumerate_trees(n)}


@pytest.mark.parametrize("k, n", [(2, 4), (2, 5), (3, 5), (1, 5), (4, 5)])
def test_anchored_equal_brute_force(k, n, forests_by_size):
    expected = {e for e, comps in forests_by_size[n]
                if len(comps) == k and all(len([v for v in c if v <= k]) == 1 for c in comps)}
    got = [f.edges for f in enumerate_anchored_forests(k, n)]
    assert len(got) == len(set(got))
    assert set(got) == expected
    # forests of k trees with given distinct roots number k n^(n-k-1)
    assert len(got) == k * n ** (n - k - 1)


def test_prufer_small():
    tree = LabeledTree(2, frozenset({(1, 2)}))
    assert prufer_encode(tree) == []
    for code in itertools.product(range(1, 5), repeat=2):
        assert tuple(prufer_encode(prufer_decode(code))) == code


@pytest.mark.parametrize("bad", [(0, 1), (5, 1), (1, 2, 3, 9)])
def test_prufer_rejects_malformed(bad):
    with pytest.raises(ValueError):
        prufer_decode(bad, 4)


@given(st.integers(3, 9).flatmap(lambda n: st.lists(st.integers(1, n), min_size=n - 2, max_size=n - 2)))
def test_prufer_codes_decode_to_trees(code):
    tree = prufer_decode(code)
    assert tree.n_vertices == len(code) + 2
    assert len(tree.edges) == tree.n_vertices - 1
    assert prufer_encode(tree) == list(code)


def _complete(n):
    return [[int(i != j) for j in range(n)] for i in range(n)]


def test_spanning_tree_examples():
    path = [[0, 1, 0], [1, 0, 1], [0, 1, 0]]
    cycle = [[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]]
    assert spanning_tree_count(path) == 1
    assert spanning_tree_count(cycle) == 4
    assert spanning_tree_count(_complete(4)) == 16
    assert spanning_tree_count([[0, 0], [0, 0]]) == 0


@given(st.integers(2, 5).flatmap(
    lambda n: st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2)
    .map(lambda bits: (n, bits))))
def test_spanning_tree_count_equals_brute_force(case):
    n, bits = case
    pairs = list(itertools.combinations(range(n), 2))
    adj = [[0] * n for _ in range(n)]
    for b, (i, j) in zip(bits, pairs):
        if b:
            adj[i][j] = adj[j][i] = 1
    present = {(i + 1, j + 1) for b, (i, j) in zip(bits, pairs) if b}
    brute = sum(1 for t in enumerate_trees(n) if t.edges <= present)
    assert spanning_tree_count(adj) == brute


@pytest.mark.parametrize("n, count", [(1, 1), (2, 1), (3, 4), (4, 38), (5, 728)])
def test_connected_graph_counts(n, count):
    assert len(connected_graphs(n)) == count


def test_bfs_edges_reach_every_vertex():
    for t in enumerate_trees(5):
        order = t.bfs_edges()
        assert {c for _, c in order} == {2, 3, 4, 5}
        assert {tuple(sorted(e)) for e in order} == set(t.edges)
