"""Labeled trees, rooted forests and anchored forests on vertices 1..n.

Trees come from Prüfer codes in lexicographic code order, so every
enumeration here is duplicate-free and deterministic.  Rooted forests are
trees on n+1 vertices with the extra vertex removed; anchored forests use
the generalized code for forests rooted at a fixed vertex set.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import FrozenSet, Iterator, List, Sequence, Tuple

from .errors import SizeError

Edge = Tuple[int, int]

DEFAULT_CAP = 9


def _edge(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


def _components(n: int, edges) -> List[set]:
    parent = list(range(n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in edges:
        parent[find(i)] = find(j)
    groups = {}
    for v in range(1, n + 1):
        groups.setdefault(find(v), set()).add(v)
    return sorted(groups.values(), key=min)


def is_forest(n: int, edges) -> bool:
    """True if ``edges`` on vertices 1..n contain no cycle."""
    parent = list(range(n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in edges:
        a, b = find(i), find(j)
        if a == b:
            return False
        parent[a] = b
    return True


def _check_edges(n, edges):
    for e in edges:
        i, j = e
        if not (1 <= i < j <= n):
            raise ValueError(f"edge {e} is not an ordered pair inside 1..{n}")


@dataclass(frozen=True)
class LabeledTree:
    n_vertices: int
    edges: FrozenSet[Edge]

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ValueError("a tree needs at least one vertex")
        _check_edges(self.n_vertices, self.edges)
        if len(self.edges) != self.n_vertices - 1 or not is_forest(self.n_vertices, self.edges):
            raise ValueError("edges do not form a spanning tree")

    def neighbors(self, v: int) -> List[int]:
        return sorted(j if i == v else i for i, j in self.edges if v in (i, j))

    def bfs_edges(self, root: int = 1) -> List[Edge]:
        """Edges as (parent, child) pairs in breadth-first order from ``root``."""
        adj = {v: [] for v in range(1, self.n_vertices + 1)}
        for i, j in sorted(self.edges):
            adj[i].append(j)
            adj[j].append(i)
        seen = {root}
        order = []
        queue = [root]
        while queue:
            nxt = []
            for v in queue:
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        order.append((v, w))
                        nxt.append(w)
            queue = nxt
        return order


@dataclass(frozen=True)
class RootedForest:
    n_vertices: int
    edges: FrozenSet[Edge]
    roots: FrozenSet[int]

    def __post_init__(self):
        _check_edges(self.n_vertices, self.edges)
        if not is_forest(self.n_vertices, self.edges):
            raise ValueError("edges contain a cycle")
        for comp in _components(self.n_vertices, self.edges):
            if len(comp & self.roots) != 1:
                raise ValueError("each tree must contain exactly one root")


@dataclass(frozen=True)
class AnchoredForest:
    n_anchors: int
    n_vertices: int
    edges: FrozenSet[Edge]

    def __post_init__(self):
        _check_edges(self.n_vertices, self.edges)
        if not is_forest(self.n_vertices, self.edges):
            raise ValueError("edges contain a cycle")
        comps = _components(self.n_vertices, self.edges)
        if len(comps) != self.n_anchors:
            raise ValueError("wrong number of components")
        for comp in comps:
            if len([v for v in comp if v <= self.n_anchors]) != 1:
                raise ValueError("each component must hold exactly one anchor")


def _check_cap(n, cap):
    if n < 1:
        raise ValueError("need at least one vertex")
    if n > cap:
        raise SizeError(f"{n} vertices exceeds the enumeration cap {cap}")


def prufer_decode(code: Sequence[int], n: int | None = None) -> LabeledTree:
    """Tree on 1..len(code)+2 whose Prüfer code is ``code``."""
    code = list(code)
    if n is None:
        n = len(code) + 2
    if n == 1:
        if code:
            raise ValueError("a one-vertex tree has an empty code")
        return LabeledTree(1, frozenset())
    if len(code) != n - 2:
        raise ValueError(f"code length {len(code)} does not match n={n}")
    if any(not isinstance(c, int) or c < 1 or c > n for c in code):
        raise ValueError(f"code entries must lie in 1..{n}")
    degree = [1] * (n + 1)
    for c in code:
        degree[c] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for c in code:
        leaf = heapq.heappop(leaves)
        edges.append(_edge(leaf, c))
        degree[c] -= 1
        if degree[c] == 1:
            heapq.heappush(leaves, c)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append(_edge(u, v))
    return LabeledTree(n, frozenset(edges))


def prufer_encode(tree: LabeledTree) -> List[int]:
    n = tree.n_vertices
    if n <= 2:
        return []
    adj = {v: set() for v in range(1, n + 1)}
    for i, j in tree.edges:
        adj[i].add(j)
        adj[j].add(i)
    leaves = [v for v in adj if len(adj[v]) == 1]
    heapq.heapify(leaves)
    code = []
    for _ in range(n - 2):
        leaf = heapq.heappop(leaves)
        (nb,) = adj[leaf]
        code.append(nb)
        adj[nb].discard(leaf)
        del adj[leaf]
        if len(adj[nb]) == 1:
            heapq.heappush(leaves, nb)
    return code


def iter_trees(n: int, cap: int = DEFAULT_CAP) -> Iterator[LabeledTree]:
    _check_cap(n, cap)
    if n == 1:
        yield LabeledTree(1, frozenset())
        return
    for code in itertools.product(range(1, n + 1), repeat=n - 2):
        yield prufer_decode(code, n)


def enumerate_trees(n: int, cap: int = DEFAULT_CAP) -> List[LabeledTree]:
    """All labeled trees on 1..n, n**(n-2) of them, in Prüfer order."""
    return list(iter_trees(n, cap))


def enumerate_rooted_forests(n: int, cap: int = DEFAULT_CAP) -> List[RootedForest]:
    """All (forest, root set) pairs with one root per tree; (n+1)**(n-1) of them.

    A rooted forest on 1..n is a tree on 1..n+1 with vertex n+1 deleted:
    its former neighbours become the roots.
    """
    _check_cap(n, cap)
    out = []
    extra = n + 1
    for tree in iter_trees(n + 1, cap=max(cap, n + 1)):
        edges = frozenset(e for e in tree.edges if extra not in e)
        roots = frozenset(i for i, j in tree.edges if j == extra)
        out.append(RootedForest(n, edges, roots))
    return out


def decode_anchored(code: Sequence[int], n_anchors: int, n_vertices: int) -> AnchoredForest:
    """Forest rooted at 1..k from its parent sequence.

    The sequence lists, for each removal of the smallest childless non-anchor
    vertex, that vertex's parent.  Valid codes have length n-k and a last entry
    in 1..k (all codes when n == k are empty).
    """
    k, n = n_anchors, n_vertices
    code = list(code)
    if len(code) != n - k:
        raise ValueError("code length must equal n_vertices - n_anchors")
    if code and not (1 <= code[-1] <= k):
        raise ValueError("last code entry must be an anchor")
    if any(c < 1 or c > n for c in code):
        raise ValueError(f"code entries must lie in 1..{n}")
    children = [0] * (n + 1)
    for c in code:
        children[c] += 1
    leaves = [v for v in range(k + 1, n + 1) if children[v] == 0]
    heapq.heapify(leaves)
    edges = []
    for c in code:
        if not leaves:
            raise ValueError("code does not describe a forest")
        leaf = heapq.heappop(leaves)
        edges.append(_edge(leaf, c))
        children[c] -= 1
        if c > k and children[c] == 0:
            heapq.heappush(leaves, c)
    return AnchoredForest(k, n, frozenset(edges))


def enumerate_anchored_forests(n_anchors: int, n_vertices: int,
                               cap: int = DEFAULT_CAP) -> List[AnchoredForest]:
    """Forests on 1..n_vertices with n_anchors trees, tree i holding vertex i."""
    if n_anchors < 1:
        raise ValueError("need at least one anchor")
    if n_anchors > n_vertices:
        raise ValueError("more anchors than vertices")
    _check_cap(n_vertices, cap)
    k, n = n_anchors, n_vertices
    if n == k:
        return [AnchoredForest(k, n, frozenset())]
    out = []
    for head in itertools.product(range(1, n + 1), repeat=n - k - 1):
        for last in range(1, k + 1):
            out.append(decode_anchored(head + (last,), k, n))
    return out


def spanning_tree_count(adjacency) -> int:
    """Number of spanning trees, by an exact Matrix-Tree determinant.

    Uses fraction-free Bareiss elimination on the reduced Laplacian.
    """
    a = [[int(x) for x in row] for row in adjacency]
    n = len(a)
    for i in range(n):
        if len(a[i]) != n or a[i][i] != 0:
            raise ValueError("adjacency must be square with zero diagonal")
        for j in range(n):
            if a[i][j] != a[j][i]:
                raise ValueError("adjacency must be symmetric")
    if n <= 1:
        return 1
    lap = [[(sum(a[i]) if i == j else -a[i][j]) for j in range(1, n)] for i in range(1, n)]
    return _bareiss_det(lap)


def _bareiss_det(m) -> int:
    m = [row[:] for row in m]
    size = len(m)
    sign = 1
    prev = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            for r in range(k + 1, size):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


def connected_graphs(n: int) -> List[Tuple[Edge, ...]]:
    """Edge sets of all connected spanning subgraphs of K_n (n >= 1)."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    out = []
    for mask in range(1 << len(pairs)):
        edges = tuple(p for b, p in enumerate(pairs) if mask >> b & 1)
        if len(_components(n, edges)) == 1:
            out.append(edges)
    return out

