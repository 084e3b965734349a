"""End-to-end acceptance criteria, one test per criterion at its stated tolerance."""

import math
import time

import pytest

from dimred import cluster, forest_root, lattice, tonks
from dimred.cli import main
from dimred.graphs import enumerate_rooted_forests
from dimred.integrate import MCEstimate
from dimred.potentials import make_hard_sphere, make_species_table
from dimred.series import exp_series, identity, multiply, revert

HARD1 = make_hard_sphere(1.0)


def test_lattice_counts(criterion):
    start = time.perf_counter()
    tree = [lattice.count_tree_sum(2, n).count for n in (1, 2, 3)]
    direct = [lattice.count_direct(2, n).count for n in (1, 2, 3)]
    elapsed = time.perf_counter() - start
    ok = tree == direct == [1, 2, 6] and elapsed < 1.0
    criterion(1, "lattice counts in Z^2", ok, f"tree-sum {tree}, direct {direct}, {elapsed:.3f} s")


def test_forest_root_formula(criterion):
    start = time.perf_counter()
    one = forest_root.check_identity(forest_root.ramp_test_function(1), "quad", tol=1e-8)
    two = forest_root.check_identity(forest_root.ramp_test_function(2), "quad", tol=1e-6)
    three = forest_root.check_identity(forest_root.ramp_test_function(3), "mc",
                                       samples=10 ** 7, seed=0)
    elapsed = time.perf_counter() - start
    ok = one.passed and two.passed and three.passed and elapsed < 120
    criterion(2, "forest-root identity n = 1, 2, 3", ok,
              f"errors {one.error:.2e} / {two.error:.2e} / {three.error:.2e} "
              f"(3 stderr {3 * three.stderr:.2e}), {elapsed:.1f} s")


def test_rooted_forest_counts(criterion):
    counts = [len(enumerate_rooted_forests(n)) for n in range(1, 7)]
    want = [(n + 1) ** (n - 1) for n in range(1, 7)]
    criterion(3, "rooted forest counts n = 1..6", counts == want, f"{counts}")


def test_hard_rod_coefficients(criterion):
    w = revert(multiply(identity(4), exp_series(4)))
    b = cluster.mayer_coefficients(HARD1, 1, 4).b
    errs = [abs(b[n] - float(w[n])) for n in range(1, 5)]
    closed = [(-1) ** (n - 1) * n ** (n - 1) / math.factorial(n) for n in range(1, 5)]
    ok = max(errs) <= 1e-6 and all(float(w[n]) == closed[n - 1] for n in range(1, 5))
    criterion(4, "hard-rod b_N against reversion of s e^s", ok, f"max error {max(errs):.2e}")


def test_dimensional_reduction(criterion):
    rows = cluster.check_reduction(1, HARD1, 3, budget=10 ** 6, seed=0)
    a3 = cluster.bp_coefficients(HARD1, 3, 3, budget=10 ** 6, seed=0).a[3]
    order2 = rows[1].exact and rows[1].error <= 4 * 2.2e-16
    order3 = (not rows[2].exact) and rows[2].passed and abs(rows[2].gas - 1.5) < 1e-12
    a3_ok = abs(a3.value - 6 * math.pi ** 2) <= 3 * a3.stderr
    poly0 = cluster.bp_coefficients(HARD1, 2, 4, budget=10 ** 6, seed=0).a
    zero_ok = abs(poly0[2] - math.pi) <= 1e-14
    for n in (3, 4):
        est = poly0[n]
        zero_ok &= isinstance(est, MCEstimate) and \
            abs(est.value - (2 * math.pi) ** (n - 1) / n) <= 3 * est.stderr
    zero_rows = cluster.check_reduction(0, HARD1, 4, budget=10 ** 6, seed=0)
    zero_ok &= all(r.passed for r in zero_rows)
    criterion(5, "dimensional reduction D=1->3 and D=0->2", order2 and order3 and a3_ok and zero_ok,
              f"order-2 error {rows[1].error:.1e}; order 3 {rows[2].polymer:.5f} +- "
              f"{rows[2].stderr:.5f}; a_3 {a3.value:.3f} vs {6 * math.pi ** 2:.3f}")


def test_pair_correlation_reduction(criterion):
    ok, details = True, []
    for r in (1.25, 1.75):
        row = cluster.pair_correlation_reduction_check(r, 3, budget=10 ** 6, seed=0, tol=1e-3)[-1]
        exact_ok = abs(row.gas + (2 + r)) < 1e-12 and row.error <= 1e-3
        mc_ok = row.mc_error <= 3 * row.polymer_mc.stderr
        ok &= exact_ok and mc_ok
        details.append(f"r={r}: {row.gas:.6f} vs {row.polymer_exact:.6f}, "
                       f"MC {row.polymer_mc.value:.4f}+-{row.polymer_mc.stderr:.4f}")
    criterion(6, "pair-correlation reduction at order z^3", ok, "; ".join(details))


def test_tonks_two_paths(criterion):
    part = max(abs(tonks.partition_residue(L, z, tol=1e-10) - tonks.partition_polynomial(L, z))
               for L in (2.5, 5.3, 10.1) for z in (0.5, -0.3, 2.0))
    two = max(abs(tonks.two_point_truncated(x, z, tol=1e-12) - tonks.two_point_closed(x, z))
              for x in (1.5, 2.7, 6.1) for z in (1.0, -0.3))
    criterion(7, "Tonks partition and two-point two-path agreement", part <= 1e-8 and two <= 1e-8,
              f"partition {part:.1e}, two-point {two:.1e}")


def test_equation_of_state(criterion):
    res = [tonks.equation_of_state_check(z).residual for z in (0.1, 0.5, 1.0, math.e, 10.0)]
    criterion(8, "equation of state", max(res) <= 1e-12, f"max residual {max(res):.1e}")


def test_exponents(criterion):
    rep = tonks.fit_exponents()
    ok = abs(rep.nu_slope + 0.5) <= 0.01 and abs(rep.alpha - 1.5) <= 0.01
    criterion(9, "exponent fits", ok, f"nu slope {rep.nu_slope:.4f}, alpha {rep.alpha:.4f}, eta {rep.eta}")


def test_scaling_functions(criterion):
    hc = [tonks.scaling_K_HC(x, 1e-6).deviation for x in (1.0, 2.0, 4.0)]
    bp = [tonks.scaling_K_BP(x, 1e-6).deviation for x in (1.0, 2.0, 4.0)]
    rel = tonks.amplitude_relation((1.0, 2.0, 4.0))
    ok = max(hc) < 0.01 and max(bp) < 0.02 and rel.symbolic_zero and rel.max_residual < 1e-15
    criterion(10, "scaling functions and amplitude relation", ok,
              f"K_HC max dev {max(hc):.1e}, K_BP max dev {max(bp):.1e}, symbolic {rel.symbolic_zero}")


def test_multispecies_reduction(criterion):
    table = make_species_table([[1.0, 0.75], [0.75, 0.5]], [1.0, 1.0])
    rows = cluster.multispecies_reduction_check(table, 2, seed=0, tol=1e-6)
    order2 = rows[1].exact and rows[1].error <= 1e-6
    twin = make_species_table([[1.0, 1.0], [1.0, 1.0]], [1.0, 1.0])
    gas2 = cluster.multispecies_gas(twin, 3)
    poly2 = cluster.multispecies_polymer(twin, 3, budget=10 ** 5, seed=0)
    gas1 = cluster.mayer_coefficients(HARD1, 1, 3).b
    poly1 = cluster.bp_coefficients(HARD1, 3, 3, budget=10 ** 5, seed=0).a
    exact = all(gas2[n - 1] == 2 ** n * gas1[n] for n in (1, 2, 3))
    exact &= poly2[0] == 2 * poly1[1] and poly2[1] == 4 * poly1[2]
    exact &= poly2[2].value == 8 * poly1[3].value
    criterion(11, "multispecies reduction", order2 and exact,
              f"order-2 error {rows[1].error:.1e}; equal radii exact {exact}")


def test_determinism(criterion, tmp_path, capsys):
    paths = [tmp_path / "first.json", tmp_path / "second.json"]
    codes = [main(["all", "--seed", "12345", "--out", str(p)]) for p in paths]
    capsys.readouterr()
    same = paths[0].read_bytes() == paths[1].read_bytes()
    criterion(12, "byte-identical JSON on rerun", same and codes == [0, 0],
              f"exit codes {codes}, {paths[0].stat().st_size} bytes")
