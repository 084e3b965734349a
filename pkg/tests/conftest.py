import itertools

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def brute_force_forests(n):
    """All acyclic edge subsets of K_n, found by checking every subset."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    out = []
    for mask in range(1 << len(pairs)):
        edges = [p for b, p in enumerate(pairs) if mask >> b & 1]
        parent = list(range(n + 1))

        def find(a):
            while parent[a] != a:
                a = parent[a]
            return a

        ok = True
        for i, j in edges:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if ok:
            comps = {}
            for v in range(1, n + 1):
                comps.setdefault(find(v), set()).add(v)
            out.append((frozenset(edges), list(comps.values())))
    return out


@pytest.fixture(scope="session")
def forests_by_size():
    return {n: brute_force_forests(n) for n in range(1, 6)}


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(capsys):
    """Record a numbered acceptance line, print it, then assert the outcome."""

    def record(number, title, ok, detail=""):
        line = f"criterion {number:2d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
