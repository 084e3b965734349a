"""Named check suites: each turns module results into CheckReports.

Every suite takes a RunConfig and returns reports in a fixed order.  Reference
values carry a provenance tag; Monte Carlo checks use 3 stderr as tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

from . import cluster, forest_root, lattice, tonks
from .graphs import enumerate_rooted_forests
from .integrate import MCEstimate, quad_integrate
from .potentials import PairPotential, make_hard_sphere, make_smooth_step, make_species_table
from .report import CheckReport, compare
from .series import TruncatedSeries, exp_series, identity, revert

COMMANDS = ("forest-root", "lattice-count", "mayer", "bp-coeff", "reduce", "pair-reduce",
            "multispecies", "tonks", "scaling", "exponents")

DEFAULTS: Dict[str, Any] = {
    "seed": 0,
    "samples": 10 ** 6,
    "tol": None,
    "nmax": None,
    "out": None,
    "format": "json",
    "workers": 1,
    "timing": False,
}


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    samples: int = 10 ** 6
    tol: Optional[float] = None
    nmax: Optional[int] = None
    out: Optional[str] = None
    format: str = "json"
    workers: int = 1
    timing: bool = False
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tol must be positive")
        if not self.samples > 0:
            raise ValueError("samples must be positive")
        if self.nmax is not None and not self.nmax > 0:
            raise ValueError("nmax must be positive")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")
        if not self.workers >= 1:
            raise ValueError("workers must be at least 1")
        self.seed = int(self.seed) & ((1 << 64) - 1)

    def get(self, key: str, default=None):
        val = self.params.get(key)
        return default if val is None else val

    def tol_or(self, default: float) -> float:
        return default if self.tol is None else self.tol


def _potential(cfg: RunConfig) -> PairPotential:
    kind = cfg.get("potential", "hard")
    if kind == "hard":
        return make_hard_sphere(float(cfg.get("radius", 1.0)))
    if kind == "smooth":
        return make_smooth_step(float(cfg.get("eps", 0.3)))
    raise ValueError(f"unknown potential {kind!r}")


def _pot_inputs(pot: PairPotential) -> Dict[str, Any]:
    if pot.kind == "hard-step":
        return {"potential": "hard", "radius": pot.radius}
    return {"potential": "smooth", "eps": pot.width}


def _mc(check, inputs, est: MCEstimate, reference, provenance) -> CheckReport:
    return compare(check, inputs, est.value, reference, provenance, 0.0, stderr=est.stderr)


# forest-root -----------------------------------------------------------------

def forest_root_suite(cfg: RunConfig) -> List[CheckReport]:
    sizes = [int(cfg.get("n"))] if cfg.get("n") is not None else [1, 2, 3]
    out = []
    for n in sizes:
        method = cfg.get("method") or ("quad" if n <= 2 else "mc")
        tol = cfg.tol_or(1e-8 if n == 1 else 1e-6)
        f = forest_root.ramp_test_function(n)
        rep = forest_root.check_identity(f, method, samples=cfg.samples, seed=cfg.seed, tol=tol)
        inputs = {"n": n, "method": method}
        if method == "mc":
            inputs.update(samples=cfg.samples, seed=cfg.seed)
            out.append(compare("forest-root", inputs, rep.rhs, rep.lhs, "TRIVIAL", 0.0,
                               stderr=rep.stderr))
        else:
            out.append(compare("forest-root", inputs, rep.rhs, rep.lhs, "TRIVIAL", tol))
    for n in range(1, 7):
        count = len(enumerate_rooted_forests(n))
        out.append(compare("rooted-forest-count", {"n": n}, count, (n + 1) ** (n - 1),
                           "DERIVED:Cayley count of trees on n+1 vertices", 0))
    return out


# lattice ---------------------------------------------------------------------

def lattice_suite(cfg: RunConfig) -> List[CheckReport]:
    d = int(cfg.get("d", 2))
    sizes = [int(cfg.get("n"))] if cfg.get("n") is not None else list(range(1, (cfg.nmax or 5) + 1))
    out = []
    for n in sizes:
        tree = lattice.count_tree_sum(d, n)
        direct = lattice.count_direct(d, n)
        inputs = {"d": d, "n": n}
        if (d, n) == (2, 3):
            out.append(compare("lattice-count", inputs, tree.count, 6, "PAPER", 0))
        out.append(compare("lattice-methods", inputs, tree.count, direct.count,
                           "DERIVED:direct site-set enumeration", 0))
    return out


# gas and polymer coefficients --------------------------------------------------

def _lambert_coefficients(order: int) -> TruncatedSeries:
    """Principal-branch series of s with s e^s = z, by reverting s e^s."""
    s_exp = identity(order) * exp_series(order)
    return revert(s_exp)


def _ursell_cubature(pot: PairPotential, n: int, tol: float) -> float:
    """Connected-graph integral by adaptive cubature (independent of the nested rule)."""
    import numpy as np

    reach = (n - 1) * math.sqrt(pot.range_sq)
    kinks = [k for t in pot.kinks for k in (math.sqrt(t), -math.sqrt(t))]

    def f(*xs):
        x = np.array([[0.0, *xs]])
        return float(cluster._bond_matrix_1d([pot] * (n * (n - 1) // 2), n)(x)[0])

    box = [(-reach, reach)] * (n - 1)
    return quad_integrate(f, box, tol=tol, points=[kinks] * (n - 1))


def _gas_reference(pot: PairPotential, D: int, n: int):
    """(reference, provenance) for b_n, or None when no independent value is available."""
    if n == 1:
        return 1.0, "TRIVIAL"
    if D == 0:
        return float(Fraction((-1) ** (n - 1), n)), "PAPER"
    if D == 1 and pot.kind == "hard-step":
        coef = float(_lambert_coefficients(n)[n]) * pot.radius ** (n - 1)
        return coef, "DERIVED:series reversion of s e^s"
    if D == 1:
        val = _ursell_cubature(pot, n, 1e-10) / math.factorial(n)
        return val, "DERIVED:adaptive cubature of the connected-graph sum"
    if D == 2 and pot.kind == "hard-step":
        r2 = pot.radius ** 2
        if n == 2:
            return -math.pi * r2 / 2.0, "DERIVED:disk area"
        if n == 3:
            return (math.pi ** 2 / 3.0 + math.sqrt(3.0) * math.pi / 8.0) * r2 * r2, \
                "DERIVED:disk overlap geometry"
    if D == 2 and n == 2:
        # the symmetric quintic ramp integrates U - 1 to exactly -1 in t
        return -math.pi / 2.0, "DERIVED:symmetric ramp integral"
    return None


def mayer_suite(cfg: RunConfig) -> List[CheckReport]:
    D = int(cfg.get("D", 1))
    pot = _potential(cfg)
    default_n = 3 if (D == 2 or (D == 1 and pot.kind != "hard-step")) else 4
    nmax = cfg.nmax or default_n
    gas = cluster.mayer_coefficients(pot, D, nmax)
    tol = cfg.tol_or(1e-9)
    out = []
    for n in range(1, nmax + 1):
        ref = _gas_reference(pot, D, n)
        if ref is None:
            continue
        inputs = {"D": D, "N": n, **_pot_inputs(pot)}
        out.append(compare("mayer", inputs, float(gas.b[n]), ref[0], ref[1], tol))
    return out


def _polymer_reference(pot: PairPotential, d: int, n: int):
    if n == 1:
        return 1.0, "TRIVIAL"
    if pot.kind == "hard-step":
        R = pot.radius
        if d == 3 and n == 2:
            return 2.0 * math.pi * R, "DERIVED:contact-sphere area"
        if d == 3 and n == 3:
            return 6.0 * math.pi ** 2 * R * R, "DERIVED:spherical-cap fraction 3/4"
        if d == 2 and n == 3:
            return 4.0 * math.pi ** 2 / 3.0, "DERIVED:angular fraction 2/3"
    if d == 2 and n == 2:
        return math.pi, "DERIVED:ramp derivative integrates to one"
    D = d - 2
    if D == 1 and pot.kind != "hard-step" and n > 3:
        return None
    if n > 4:
        if D == 0:
            return (2.0 * math.pi) ** (n - 1) / n, "DERIVED:log(1+z) coefficients"
        if pot.kind == "hard-step":
            b = float(_lambert_coefficients(n)[n]) * pot.radius ** (n - 1)
            return (-1) ** (n + 1) * (2.0 * math.pi) ** (n - 1) * b, \
                "DERIVED:hard-rod coefficients"
        return None
    b = float(cluster.mayer_coefficients(pot, D, n).b[n])
    return (-1) ** (n + 1) * (2.0 * math.pi) ** (n - 1) * b, "DERIVED:gas cluster coefficient"


def bp_suite(cfg: RunConfig) -> List[CheckReport]:
    d = int(cfg.get("d", 3))
    pot = _potential(cfg)
    nmax = cfg.nmax or 3
    poly = cluster.bp_coefficients(pot, d, nmax, cfg.samples, cfg.seed)
    tol = cfg.tol_or(1e-12)
    out = []
    for n in range(1, len(poly.a)):
        ref = _polymer_reference(pot, d, n)
        if ref is None:
            continue
        inputs = {"d": d, "N": n, **_pot_inputs(pot)}
        a = poly.a[n]
        if isinstance(a, MCEstimate):
            inputs.update(samples=cfg.samples, seed=cfg.seed)
            out.append(_mc("bp-coeff", inputs, a, ref[0], ref[1]))
        else:
            out.append(compare("bp-coeff", inputs, a, ref[0], ref[1], tol))
    return out


def _order_reports(check: str, base: Dict[str, Any], rows, cfg: RunConfig,
                   provenance: str) -> List[CheckReport]:
    out = []
    for row in rows:
        inputs = {**base, "N": row.order}
        if row.exact:
            out.append(compare(check, inputs, row.polymer, row.gas, provenance, row.tol))
        else:
            inputs.update(samples=cfg.samples, seed=cfg.seed)
            out.append(compare(check, inputs, row.polymer, row.gas, provenance, 0.0,
                               stderr=row.stderr))
    return out


def reduce_suite(cfg: RunConfig) -> List[CheckReport]:
    D = int(cfg.get("D", 1))
    pot = _potential(cfg)
    nmax = cfg.nmax or 3
    rows = cluster.check_reduction(D, pot, nmax, cfg.samples, cfg.seed, cfg.tol_or(1e-12))
    return _order_reports("reduce", {"D": D, **_pot_inputs(pot)}, rows, cfg,
                          "DERIVED:gas cluster coefficient")


def _floats(value, default) -> List[float]:
    if value is None:
        return list(default)
    if isinstance(value, (int, float)):
        return [float(value)]
    return [float(v) for v in str(value).split(",") if v.strip()]


def pair_suite(cfg: RunConfig) -> List[CheckReport]:
    out = []
    tol = cfg.tol_or(1e-3)
    for r in _floats(cfg.get("r"), (1.25, 1.75)):
        rows = cluster.pair_correlation_reduction_check(r, 3, cfg.samples, cfg.seed, tol)
        for row in rows:
            inputs = {"r": r, "order": row.order}
            prov = "TRIVIAL" if row.order == 2 else "DERIVED:interval-union length"
            out.append(compare("pair-reduce", inputs, row.polymer_exact, row.gas, prov, tol))
            if row.polymer_mc is not None:
                mc_inputs = {**inputs, "samples": cfg.samples, "seed": cfg.seed}
                out.append(_mc("pair-reduce-mc", mc_inputs, row.polymer_mc, row.gas, prov))
        w = cluster.ward_check(r)
        out.append(compare("ward", {"r": r}, w.derivative, w.half_two_point,
                           "DERIVED:contact-circle measure", w.tol))
    return out


def _matrix(value, default):
    if value is None:
        return default
    return [[float(x) for x in row.split(",")] for row in str(value).split(";")]


def multispecies_suite(cfg: RunConfig) -> List[CheckReport]:
    radii = _matrix(cfg.get("radii"), [[1.0, 0.75], [0.75, 0.5]])
    acts = _floats(cfg.get("activities"), [1.0] * len(radii))
    nmax = cfg.nmax or 3
    table = make_species_table(radii, acts)
    rows = cluster.multispecies_reduction_check(table, nmax, cfg.samples, cfg.seed,
                                                cfg.tol_or(1e-6))
    base = {"radii": [list(r) for r in table.radii], "activities": list(table.activities)}
    out = _order_reports("multispecies", base, rows, cfg, "DERIVED:multispecies gas quadrature")

    # equal radii: the species label is free, so order N carries a factor 2^N
    pot = make_hard_sphere(1.0)
    twin = make_species_table([[1.0, 1.0], [1.0, 1.0]], [1.0, 1.0])
    gas2 = cluster.multispecies_gas(twin, nmax)
    poly2 = cluster.multispecies_polymer(twin, nmax, cfg.samples, cfg.seed)
    gas1 = cluster.mayer_coefficients(pot, 1, nmax)
    poly1 = cluster.bp_coefficients(pot, 3, nmax, cfg.samples, cfg.seed)
    for n in range(1, nmax + 1):
        inputs = {"N": n, "species": 2, "radius": 1.0}
        out.append(compare("multispecies-equal-gas", inputs, gas2[n - 1],
                           2 ** n * float(gas1.b[n]), "TRIVIAL", 0.0))
        p2 = poly2[n - 1].value if isinstance(poly2[n - 1], MCEstimate) else poly2[n - 1]
        p1 = poly1.a[n].value if isinstance(poly1.a[n], MCEstimate) else poly1.a[n]
        out.append(compare("multispecies-equal-polymer", {**inputs, "seed": cfg.seed}, p2,
                           2 ** n * p1, "TRIVIAL", 0.0))
    return out


# tonks -----------------------------------------------------------------------

PARTITION_GRID = ((2.5, 5.3, 10.1), (0.5, -0.3, 2.0))
TWO_POINT_GRID = ((1.5, 2.7, 6.1), (1.0, -0.3))
EOS_ACTIVITIES = (0.1, 0.5, 1.0, math.e, 10.0)


def _tonks_branches(cfg) -> List[CheckReport]:
    out = []
    zs = _floats(cfg.get("z"), (math.e, -0.2, 1.0, -math.exp(-1.0), -1.0))
    for z in zs:
        b = tonks.solve_branches(z, 20)
        import numpy as np

        res = max(abs(s * np.exp(s) - z) for s in b.branches)
        out.append(compare("tonks-branch-residual", {"z": z, "n_max": 20}, float(res), 0.0,
                           "TRIVIAL", 1e-12 * max(1.0, abs(z))))
    b = tonks.solve_branches(math.e, 0)
    out.append(compare("tonks-branch", {"z": math.e, "n": 0}, b.branches[0].real, 1.0,
                       "TRIVIAL", 1e-15))
    b = tonks.solve_branches(-0.2, 1)
    out.append(compare("tonks-branch", {"z": -0.2, "n": 0}, b.branches[0].real, -0.25917,
                       "DERIVED:bisection on (-1, 0)", 1e-5))
    out.append(compare("tonks-branch", {"z": -0.2, "n": 1}, b.branches[1].real, -2.54264,
                       "DERIVED:bisection below -1", 1e-5))
    return out


def _tonks_partition(cfg) -> List[CheckReport]:
    Ls = _floats(cfg.get("L"), PARTITION_GRID[0])
    zs = _floats(cfg.get("z"), PARTITION_GRID[1])
    tol = cfg.tol_or(1e-8)
    out = []
    for L in Ls:
        for z in zs:
            res = tonks.partition_residue(L, z, tol=tol / 10.0)
            ref = tonks.partition_polynomial(L, z)
            out.append(compare("tonks-partition", {"L": L, "z": z}, res, ref,
                               "DERIVED:finite polynomial sum", tol))
    return out


def _tonks_points(cfg) -> List[CheckReport]:
    out = [compare("tonks-one-point", {"z": math.e}, tonks.one_point(math.e), 0.5, "TRIVIAL",
                   1e-15),
           compare("tonks-one-point", {"z": 1.0}, tonks.one_point(1.0), 0.36190,
                   "DERIVED:principal root by bisection", 1e-5)]
    for z in EOS_ACTIVITIES:
        chk = tonks.equation_of_state_check(z)
        out.append(compare("tonks-eos", {"z": z}, chk.pressure, chk.density / (1 - chk.density),
                           "TRIVIAL", 1e-12))
    return out


def _tonks_two_point(cfg) -> List[CheckReport]:
    xs = _floats(cfg.get("x"), TWO_POINT_GRID[0])
    zs = _floats(cfg.get("z"), TWO_POINT_GRID[1])
    tol = cfg.tol_or(1e-8)
    out = [compare("tonks-two-point", {"x": 0.5, "z": 1.0}, tonks.two_point_truncated(0.5, 1.0),
                   0.0, "PAPER", 0.0)]
    for x in xs:
        for z in zs:
            val = tonks.two_point_truncated(x, z, tol=tol / 10.0)
            out.append(compare("tonks-two-point", {"x": x, "z": z}, val,
                               tonks.two_point_closed(x, z), "DERIVED:closed form from finite sum",
                               tol))
    return out


def _tonks_correlation(cfg) -> List[CheckReport]:
    xi = tonks.correlation_length(-0.2)
    out = [compare("tonks-correlation-length", {"z": -0.2}, xi, 0.43793,
                   "DERIVED:root difference from bisection values", 1e-5)]
    delta = 1e-6
    xi = tonks._correlation_length(tonks.Z_CRIT + delta, delta)
    ref = 1.0 / (2.0 * math.sqrt(2.0 * math.e * delta))
    out.append(compare("tonks-correlation-length", {"delta": delta}, xi, ref,
                       "DERIVED:square-root expansion at z_c", 0.01 * ref))
    return out


TONKS_CHECKS: Dict[str, Callable] = {
    "branches": _tonks_branches,
    "partition": _tonks_partition,
    "points": _tonks_points,
    "two-point": _tonks_two_point,
    "correlation": _tonks_correlation,
}


def tonks_suite(cfg: RunConfig) -> List[CheckReport]:
    which = cfg.get("check", "all")
    if which == "all":
        return [r for fn in TONKS_CHECKS.values() for r in fn(cfg)]
    if which not in TONKS_CHECKS:
        raise ValueError(f"unknown tonks check {which!r}")
    return TONKS_CHECKS[which](cfg)


def scaling_suite(cfg: RunConfig) -> List[CheckReport]:
    delta = float(cfg.get("delta", 1e-6))
    out = []
    for xh in _floats(cfg.get("xhat"), (1.0, 2.0, 4.0)):
        p = tonks.scaling_K_HC(xh, delta)
        out.append(compare("scaling-K-HC", {"x_hat": xh, "delta": delta}, p.value, p.reference,
                           "PAPER", 0.01 * abs(p.reference)))
        q = tonks.scaling_K_BP(xh, delta)
        out.append(compare("scaling-K-BP", {"x_hat": xh, "delta": delta}, q.value, q.reference,
                           "PAPER", 0.02 * abs(q.reference)))
    rel = tonks.amplitude_relation()
    out.append(compare("amplitude-relation", {"x_hat": list(rel.points)}, rel.max_residual, 0.0,
                       "TRIVIAL", 1e-15 if rel.symbolic_zero else 0.0))
    far, near = tonks.scaling_K_HC(2.0, 1e-4), tonks.scaling_K_HC(2.0, 1e-8)
    out.append(compare("scaling-convergence", {"x_hat": 2.0, "delta": [1e-8, 1e-4]},
                       near.deviation, 0.0, "DERIVED:deviation shrinks toward z_c", far.deviation))
    out.append(compare("critical-polymer-activity", {}, tonks.critical_polymer_activity(),
                       2.0 * math.pi / math.e, "DERIVED:-2 pi z_c with z_c = -1/e", 1e-12))
    return out


def exponents_suite(cfg: RunConfig) -> List[CheckReport]:
    rep = tonks.fit_exponents()
    tol = cfg.tol_or(0.01)
    span = {"delta_range": [1e-6, 1e-3]}
    return [
        compare("exponent-nu-slope", span, rep.nu_slope, -0.5, "PAPER", tol),
        compare("exponent-alpha", span, rep.alpha, 1.5, "PAPER", tol),
        compare("exponent-eta", {"trials": [0, -1, -2]}, rep.eta, -1, "PAPER", 0),
    ]


SUITES: Dict[str, Callable[[RunConfig], List[CheckReport]]] = {
    "forest-root": forest_root_suite,
    "lattice-count": lattice_suite,
    "mayer": mayer_suite,
    "bp-coeff": bp_suite,
    "reduce": reduce_suite,
    "pair-reduce": pair_suite,
    "multispecies": multispecies_suite,
    "tonks": tonks_suite,
    "scaling": scaling_suite,
    "exponents": exponents_suite,
}


def _variant(cfg: RunConfig, command: str, **params) -> RunConfig:
    return RunConfig(command, cfg.seed, cfg.samples, cfg.tol, None, None, cfg.format,
                     cfg.workers, cfg.timing, params)


def all_tasks(cfg: RunConfig) -> List[RunConfig]:
    """Suite order for the ``all`` command, at moderate budgets."""
    return [
        _variant(cfg, "forest-root"),
        _variant(cfg, "lattice-count", d=2),
        _variant(cfg, "lattice-count", d=3, n=3),
        _variant(cfg, "mayer", D=0),
        _variant(cfg, "mayer", D=1),
        _variant(cfg, "mayer", D=2),
        _variant(cfg, "bp-coeff", d=3),
        _variant(cfg, "bp-coeff", d=2),
        _variant(cfg, "reduce", D=1),
        _variant(cfg, "reduce", D=0),
        _variant(cfg, "pair-reduce"),
        _variant(cfg, "multispecies"),
        _variant(cfg, "tonks"),
        _variant(cfg, "scaling"),
        _variant(cfg, "exponents"),
    ]
