"""Branched polymers on the hypercubic lattice Z^d, counted modulo translation.

Two independent counts: a sum over labeled trees of the ways to realize each
tree edge as a unit step without two vertices meeting, and a direct count of
spanning trees of the unit-distance graph on every connected site set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from .errors import SizeError
from .graphs import iter_trees, spanning_tree_count

SIZE_CAPS = {1: 8, 2: 8, 3: 6}

Site = Tuple[int, ...]


@dataclass(frozen=True)
class LatticePolymerCount:
    dimension: int
    size: int
    count: int
    method: str
    raw_total: Optional[int] = None


def _check(d: int, n: int):
    if d not in SIZE_CAPS:
        raise SizeError(f"dimension must be one of {sorted(SIZE_CAPS)}")
    if n < 1:
        raise ValueError("size must be positive")
    if n > SIZE_CAPS[d]:
        raise SizeError(f"N = {n} exceeds the cap {SIZE_CAPS[d]} for d = {d}")


def unit_steps(d: int) -> List[Site]:
    steps = []
    for axis in range(d):
        for sign in (1, -1):
            v = [0] * d
            v[axis] = sign
            steps.append(tuple(v))
    return steps


def _rooted_code(adj, v, parent) -> str:
    return "(" + "".join(sorted(_rooted_code(adj, c, v) for c in adj[v] if c != parent)) + ")"


def tree_shape(n: int, edges) -> str:
    """Canonical string of an unlabeled free tree (rooted codes at its centre)."""
    adj = {v: [] for v in range(1, n + 1)}
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    degree = {v: len(adj[v]) for v in adj}
    layer = [v for v in adj if degree[v] <= 1]
    left = n
    while left > 2:
        left -= len(layer)
        nxt = []
        for leaf in layer:
            for nb in adj[leaf]:
                degree[nb] -= 1
                if degree[nb] == 1:
                    nxt.append(nb)
            degree[leaf] = 0
        layer = nxt
    return min(_rooted_code(adj, c, None) for c in layer)


def _embeddings(n: int, edges, d: int) -> int:
    """Ways to give each tree edge a unit step with all n vertices on distinct sites."""
    adj = {v: [] for v in range(1, n + 1)}
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    order, parent, seen = [], {}, {1}
    queue = [1]
    while queue:
        v = queue.pop(0)
        for w in sorted(adj[v]):
            if w not in seen:
                seen.add(w)
                parent[w] = v
                order.append(w)
                queue.append(w)
    steps = unit_steps(d)
    pos = {1: (0,) * d}
    occupied = {pos[1]}

    def place(k: int) -> int:
        if k == len(order):
            return 1
        v = order[k]
        base = pos[parent[v]]
        total = 0
        for st in steps:
            site = tuple(a + b for a, b in zip(base, st))
            if site in occupied:
                continue
            occupied.add(site)
            pos[v] = site
            total += place(k + 1)
            occupied.discard(site)
        return total

    return place(0)


def count_tree_sum(d: int, n: int) -> LatticePolymerCount:
    """(1/N!) sum over labeled trees of self-avoiding unit-step realizations."""
    _check(d, n)
    cache: Dict[str, int] = {}
    raw = 0
    for tree in iter_trees(n, cap=SIZE_CAPS[d]):
        key = tree_shape(n, tree.edges)
        if key not in cache:
            cache[key] = _embeddings(n, tree.edges, d)
        raw += cache[key]
    count, rem = divmod(raw, math.factorial(n))
    if rem:
        raise ArithmeticError("tree-sum total is not divisible by N!")
    return LatticePolymerCount(d, n, count, "tree-sum", raw)


def _normalize(cells) -> FrozenSet[Site]:
    origin = min(cells)
    return frozenset(tuple(a - b for a, b in zip(c, origin)) for c in cells)


def fixed_animals(d: int, n: int) -> List[FrozenSet[Site]]:
    """Connected n-site sets in Z^d with the lexicographically smallest site at the origin."""
    _check(d, n)
    steps = unit_steps(d)
    level = {frozenset({(0,) * d})}
    for _ in range(n - 1):
        grown = set()
        for cells in level:
            for c in cells:
                for st in steps:
                    site = tuple(a + b for a, b in zip(c, st))
                    if site not in cells:
                        grown.add(_normalize(cells | {site}))
        level = grown
    return sorted(level, key=sorted)


def count_direct(d: int, n: int) -> LatticePolymerCount:
    """Sum over connected site sets of the spanning-tree count of their unit-distance graph."""
    _check(d, n)
    total = 0
    for cells in fixed_animals(d, n):
        sites = sorted(cells)
        adj = [[1 if sum(abs(a - b) for a, b in zip(p, q)) == 1 else 0 for q in sites]
               for p in sites]
        total += spanning_tree_count(adj)
    return LatticePolymerCount(d, n, total, "direct")
