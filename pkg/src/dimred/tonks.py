"""One-dimensional hard rods of unit length, solved through the roots of s e^s = z.

Notation: z is the activity, s_n the roots ordered by decreasing real part,
w = s + 1, and z_c = -1/e the point where the two real roots merge at -1.
Near z_c the real roots are found from w, so quantities such as s_0 - s_1
keep full relative precision even when both roots sit next to -1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import optimize

from .errors import AccuracyError, AccuracyWarning, NonSmoothPointError, RootError

Z_CRIT = -math.exp(-1.0)
RESIDUAL_TOL = 1e-12
BRANCH_CAP = 1 << 16
WYNN_TERMS = (40, 80)
SERIES_SWITCH = 8.0


@dataclass(frozen=True)
class BranchSet:
    z: float
    branches: Tuple[complex, ...]
    n_computed: int
    degenerate: bool = False


@dataclass(frozen=True)
class SeriesResult:
    value: float
    error: float
    n_branches: int
    method: str


@dataclass(frozen=True)
class _RealRoots:
    """Real roots with their offsets w = s + 1 (one root for z > 0, two below zero)."""

    s: Tuple[float, ...]
    w: Tuple[float, ...]
    degenerate: bool = False


def _h(w: float) -> float:
    """(w - 1) e^w + 1 = e z + 1, computed without cancellation for small w."""
    if abs(w) < 0.5:
        term, total, k = w, 0.0, 1
        while True:
            term *= w / (k + 1)
            k += 1
            add = (k - 1) * term
            total += add
            if abs(add) <= 1e-18 * abs(total):
                return total
    return (w - 1.0) * math.expm1(w) + w


def _real_roots(z: float, delta: Optional[float] = None) -> _RealRoots:
    """Real solutions of s e^s = z; ``delta`` = z - z_c may be given exactly."""
    if z == 0:
        raise ValueError("z = 0 has no roots")
    if z > 0:
        hi = 1.0 if z <= 1.0 else math.log(z) + 1.0
        s = optimize.brentq(lambda s: s * math.exp(s) - z, 0.0, hi, xtol=1e-300, rtol=8.9e-16)
        return _RealRoots((s,), (s + 1.0,))
    if delta is None:
        delta = z - Z_CRIT
    if delta < 0:
        return _RealRoots((), ())
    if delta == 0:
        return _RealRoots((-1.0, -1.0), (0.0, 0.0), degenerate=True)
    target = math.e * delta

    def g(w):
        return _h(w) - target

    w0 = optimize.brentq(g, 0.0, 1.0, xtol=1e-300, rtol=8.9e-16)
    lo = -1.0
    while g(lo) < 0:
        lo *= 2.0
    w1 = optimize.brentq(g, lo, 0.0, xtol=1e-300, rtol=8.9e-16)
    return _RealRoots((w0 - 1.0, w1 - 1.0), (w0, w1))


def _upper_roots(z: float, m: np.ndarray, delta: Optional[float] = None) -> np.ndarray:
    """Roots with Im s > 0 solving s + Log s = log|z| + i theta_m, theta_m = 2 pi m + arg z.

    Each index m has exactly one such root; m = 0 only exists for z < z_c.
    """
    m = np.asarray(m, dtype=float)
    arg_z = 0.0 if z > 0 else math.pi
    theta = 2.0 * math.pi * m + arg_z
    c = math.log(abs(z)) + 1j * theta
    s = c - np.log(c)
    if delta is None:
        delta = z - Z_CRIT
    near = (m == 0) & (delta < 0) & (abs(delta) < 0.1)
    if np.any(near):
        s = np.where(near, -1.0 + 1j * math.sqrt(2.0 * math.e * abs(delta)), s)
    done = np.zeros(s.shape, dtype=bool)
    for _ in range(100):
        g = s + np.log(s) - c
        step = g / (1.0 + 1.0 / s)
        s = s - step
        done = np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(s))
        if np.all(done):
            break
    bad = ~done | (s.imag <= 0) | (np.abs(s.imag + np.angle(s) - theta) > 1e-9)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise RootError(f"Newton iteration failed for upper branch index {int(m.flat[k])}",
                        branch=int(m.flat[k]))
    return s


def _first_upper_index(z: float, delta: Optional[float] = None) -> int:
    if delta is None:
        delta = z - Z_CRIT
    return 0 if (z < 0 and delta < 0) else 1


def solve_branches(z: float, n_max: int) -> BranchSet:
    """Roots s_0..s_{n_max} of s e^s = z, by decreasing real part.

    Conjugate pairs are adjacent with the positive-imaginary member first.
    """
    if z == 0:
        raise ValueError("z must be nonzero")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    real = _real_roots(z)
    n_upper = max(0, (n_max + 1 - len(real.s) + 1) // 2)
    m0 = _first_upper_index(z)
    upper = _upper_roots(z, np.arange(m0, m0 + n_upper)) if n_upper else np.zeros(0, complex)
    found = [complex(r) for r in real.s]
    for s in upper:
        found.extend([complex(s), complex(s.real, -s.imag)])
    found.sort(key=lambda s: (-s.real, -s.imag))
    found = found[: n_max + 1]
    for k, s in enumerate(found):
        if abs(s * np.exp(s) - z) > RESIDUAL_TOL * max(1.0, abs(z)):
            raise RootError(f"branch {k} misses the residual bound", branch=k)
    return BranchSet(z, tuple(found), len(found), real.degenerate)


def partition_polynomial(L: float, z: float) -> float:
    """Finite sum of z^N (L-N-1)^N / N! over N < L - 1."""
    if not L > 1:
        raise ValueError("L must exceed 1")
    terms = []
    n = 0
    while L - n - 1 > 0:
        terms.append(z ** n * (L - n - 1) ** n / math.factorial(n))
        n += 1
    return math.fsum(terms)


def _partition_derivative(x: float, z: float) -> float:
    """d/dx of the finite sum, valid away from x = N + 1."""
    terms = []
    n = 1
    while x - n - 1 > 0:
        terms.append(z ** n * (x - n - 1) ** (n - 1) / math.factorial(n - 1))
        n += 1
    return math.fsum(terms)


def _tail_count(log_scale: float, z: float, p: float, q: float, tol: float) -> float:
    """n_0 with sum_{n > n_0} C (|z|/n)^p / n^q < tol / 2, from the integral bound."""
    k = p + q - 1.0
    if k <= 0:
        return math.inf
    log_n = (math.log(2.0) + log_scale + p * math.log(abs(z)) - math.log(tol * k)) / k
    return math.exp(min(log_n, 700.0))


def _wynn(partials: np.ndarray) -> Tuple[complex, float]:
    ests = []
    for n in WYNN_TERMS:
        with mpmath.workdps(40):
            table = mpmath.shanks([mpmath.mpc(complex(v)) for v in partials[:n]])
            ests.append(complex(table[-1][-1]))
    return ests[-1], abs(ests[-1] - ests[0])


def _branch_series(z: float, term: Callable, p: float, q: float, log_scale: float, tol: float,
                   real_terms: Sequence[float], delta: Optional[float] = None) -> SeriesResult:
    """sum of real-root terms plus 2 Re sum over upper complex roots of term(s).

    Summed directly when the tail bound needs at most BRANCH_CAP upper roots
    and the last three terms sit below tol/10; otherwise the complex partial
    sums are accelerated with Wynn's epsilon algorithm.
    """
    base = math.fsum(real_terms)
    m0 = _first_upper_index(z, delta)
    n0 = _tail_count(log_scale, z, p, q, tol)
    count = int(min(math.ceil(n0 / 2.0) + 3, BRANCH_CAP + 1))
    if n0 / 2.0 + 3 <= BRANCH_CAP:
        while True:
            s = _upper_roots(z, np.arange(m0, m0 + count), delta)
            t = term(s, s + 1.0)
            if np.all(2.0 * np.abs(t[-3:]) < tol / 10.0) or count >= BRANCH_CAP:
                break
            count = min(2 * count, BRANCH_CAP)
        if np.all(2.0 * np.abs(t[-3:]) < tol / 10.0):
            total = base + 2.0 * math.fsum(t.real)
            return SeriesResult(total, tol, len(real_terms) + 2 * count, "direct")
    s = _upper_roots(z, np.arange(m0, m0 + WYNN_TERMS[-1]), delta)
    partials = np.cumsum(term(s, s + 1.0))
    est, err = _wynn(partials)
    return SeriesResult(base + 2.0 * est.real, 2.0 * err, len(real_terms) + 2 * WYNN_TERMS[-1],
                        "wynn")


def partition_residue_series(L: float, z: float, tol: float = 1e-10) -> SeriesResult:
    if not L > 1:
        raise ValueError("L must exceed 1")
    if z == 0:
        raise ValueError("z must be nonzero")
    real = _real_roots(z)
    if real.degenerate:
        raise ValueError("the residue series assumes simple poles; z = -1/e is a double root")
    real_terms = [math.exp(s * (L - 1.0)) / w for s, w in zip(real.s, real.w)]

    def term(s, sp1):
        return np.exp(s * (L - 1.0)) / sp1

    return _branch_series(z, term, L - 1.0, 1.0, 0.0, tol, real_terms)


def partition_residue(L: float, z: float, tol: float = 1e-10) -> float:
    """Sum over all roots of e^{s_n (L-1)} / (s_n + 1); raises AccuracyError if tol is missed."""
    res = partition_residue_series(L, z, tol)
    if res.error > tol:
        raise AccuracyError(f"residue series reached only {res.error:.3g}", res.value, res.error)
    return res.value


def one_point(z: float) -> float:
    """Density s_0 / (s_0 + 1)."""
    if z == 0:
        raise ValueError("z must be nonzero")
    if z <= Z_CRIT:
        raise ValueError("the density needs z > -1/e")
    real = _real_roots(z)
    return real.s[0] / real.w[0]


@dataclass(frozen=True)
class EquationOfStateCheck:
    z: float
    pressure: float
    density: float
    residual: float
    passed: bool


def equation_of_state_check(z: float, tol: float = 1e-12) -> EquationOfStateCheck:
    """Pressure s_0 against rho / (1 - rho) with rho the density."""
    if not z > 0:
        raise ValueError("the equation-of-state check uses z > 0")
    s0 = _real_roots(z).s[0]
    rho = one_point(z)
    res = abs(s0 - rho / (1.0 - rho))
    return EquationOfStateCheck(z, s0, rho, res, res <= tol)


def _g_terms(x: float, z: float, order: int, delta: Optional[float] = None):
    """Term function and scale for the (differentiated) branch series at distance x."""
    real = _real_roots(z, delta)
    s0, w0 = real.s[0], real.w[0]
    g1 = s0 / w0

    def term(s, sp1):
        out = g1 * s / sp1 * np.exp((s - s0) * x)
        if order:
            out = out * (s - s0)
        return out

    real_terms = []
    for s, w in zip(real.s[1:], real.w[1:]):
        # s - s0 written as w - w0 keeps precision near z_c
        t = g1 * s / w * math.exp((w - w0) * x)
        real_terms.append(t * (w - w0) if order else t)
    log_scale = math.log(abs(g1)) - s0 * x
    return term, real_terms, log_scale


def two_point_series(x: float, z: float, tol: float = 1e-10, order: int = 0,
                     delta: Optional[float] = None) -> SeriesResult:
    """Branch series for the truncated two-point function (order 1: its x-derivative), x > 1."""
    x = abs(x)
    if x <= 1.0 + order:
        raise ValueError(f"the order-{order} series converges only for |x| > {1 + order}")
    term, real_terms, log_scale = _g_terms(x, z, order, delta)
    return _branch_series(z, term, x, -float(order), log_scale, tol, real_terms, delta)


def two_point_truncated(x: float, z: float, tol: float = 1e-10) -> float:
    """Smooth part of the truncated two-point function; the x = 0 delta is delta_coefficient(z).

    Zero inside the core 0 < |x| < 1, the branch series for |x| > 1.
    """
    x = abs(x)
    if z == 0 or z <= Z_CRIT:
        raise ValueError("two-point functions need z > -1/e, z != 0")
    if x < 1.0:
        return 0.0
    if x == 1.0:
        return two_point_closed(x, z)
    res = two_point_series(x, z, tol)
    if res.error > tol:
        warnings.warn(f"two-point series at x={x} reached only {res.error:.3g}", AccuracyWarning,
                      stacklevel=2)
    return res.value


def delta_coefficient(z: float) -> float:
    """Weight of the delta function at x = 0, equal to the density."""
    return one_point(z)


def two_point_closed(x: float, z: float) -> float:
    """Closed form G1 z e^{-s0 x} Z(x) - G1^2 for |x| >= 1 from the finite sum."""
    x = abs(x)
    if x < 1.0:
        return 0.0
    real = _real_roots(z)
    s0 = real.s[0]
    g1 = s0 / real.w[0]
    zx = partition_polynomial(x, z) if x > 1.0 else 1.0
    return g1 * z * math.exp(-s0 * x) * zx - g1 * g1


def _check_smooth(r: float):
    k = round(r)
    if k >= 2 and abs(r - k) < 1e-6:
        raise NonSmoothPointError(f"r = {r} is within 1e-6 of the non-smooth point {k}")


def two_point_closed_derivative(x: float, z: float) -> float:
    """d/dx of the closed form, from the term-wise derivative of the finite sum."""
    _check_smooth(x)
    real = _real_roots(z)
    s0 = real.s[0]
    g1 = s0 / real.w[0]
    zx = partition_polynomial(x, z)
    return g1 * z * math.exp(-s0 * x) * (_partition_derivative(x, z) - s0 * zx)


def bp_two_point_3d(r: float, u: float, tol: float = 1e-12) -> float:
    """Three-dimensional polymer two-point function at distance r and activity u.

    Uses (1/2 pi^2) d/dt of the gas truncated function at z = -2 pi u, t = r^2.
    The derivative comes from the closed form up to r = 8 and from the
    differentiated branch series beyond, where the finite sum cancels badly.
    """
    if not r > 1:
        raise ValueError("r must exceed 1")
    z = -2.0 * math.pi * u
    if z == 0 or z <= Z_CRIT:
        raise ValueError("u must lie in (-inf, 1/(2 pi e)) and be nonzero")
    _check_smooth(r)
    if r <= SERIES_SWITCH:
        dg = two_point_closed_derivative(r, z)
    else:
        dg = two_point_series(r, z, tol, order=1).value
    return dg / (2.0 * r) / (2.0 * math.pi ** 2)


def correlation_length(z: float) -> float:
    """1 / Re(s_0 - s_1); infinite at z = -1/e."""
    return _correlation_length(z)


def _correlation_length(z: float, delta: Optional[float] = None) -> float:
    if z == 0:
        raise ValueError("z must be nonzero")
    real = _real_roots(z, delta)
    if real.degenerate:
        return math.inf
    if z > 0:
        s1 = _upper_roots(z, np.array([1]))[0]
        return 1.0 / (real.s[0] - s1.real)
    if not real.s:
        raise ValueError("the correlation length needs z >= -1/e")
    return 1.0 / (real.w[0] - real.w[1])


@dataclass(frozen=True)
class ScalingPoint:
    z: float
    x_hat: float
    xi: float
    value: float
    reference: float
    deviation: float


def k_hc(x_hat: float) -> float:
    return -4.0 * math.exp(-x_hat) / x_hat ** 2


def k_bp(x_hat: float) -> float:
    return math.exp(-x_hat) / (math.pi ** 2 * x_hat)


GAS_DIM = 1
ETA = -1


def _scaling_setup(x_hat: float, delta: float):
    if not delta > 0:
        raise ValueError("delta must be positive")
    z = Z_CRIT + delta
    xi = _correlation_length(z, delta)
    x = x_hat * xi
    if x <= 1.0:
        raise ValueError("x_hat * xi lies inside the hard core")
    return z, xi, x


def scaling_K_HC(x_hat: float, delta: float, eta: float = ETA) -> ScalingPoint:
    """x^{D-2+eta} times the truncated gas function at x = x_hat * xi, against K_HC."""
    z, xi, x = _scaling_setup(x_hat, delta)
    g = two_point_series(x, z, 1e-14 * xi ** 2, delta=delta).value
    value = x ** (GAS_DIM - 2 + eta) * g
    ref = k_hc(x_hat)
    return ScalingPoint(z, x_hat, xi, value, ref, abs(value - ref) / abs(ref))


def scaling_K_BP(x_hat: float, delta: float) -> ScalingPoint:
    """x^0 times the 3-D polymer two-point function at x = x_hat * xi, against K_BP."""
    z, xi, x = _scaling_setup(x_hat, delta)
    if x <= SERIES_SWITCH:
        dg = two_point_closed_derivative(x, z)
    else:
        dg = two_point_series(x, z, 1e-14 * xi, order=1, delta=delta).value
    value = dg / (2.0 * x) / (2.0 * math.pi ** 2)
    ref = k_bp(x_hat)
    return ScalingPoint(z, x_hat, xi, value, ref, abs(value - ref) / abs(ref))


def critical_polymer_activity() -> float:
    """Polymer critical activity -2 pi z_c = 2 pi / e."""
    return -2.0 * math.pi * Z_CRIT


@dataclass(frozen=True)
class AmplitudeRelation:
    symbolic_zero: bool
    points: Tuple[float, ...]
    max_residual: float


def amplitude_relation(points: Sequence[float] = (1.0, 2.0, 4.0)) -> AmplitudeRelation:
    """Check (1/4 pi^2)[x K_HC'(x) - (D-2+eta) K_HC(x)] = K_BP(x) with sympy."""
    import sympy as sp

    x = sp.symbols("x", positive=True)
    khc = -4 * sp.exp(-x) / x ** 2
    kbp = sp.exp(-x) / (sp.pi ** 2 * x)
    lhs = (x * sp.diff(khc, x) - (GAS_DIM - 2 + ETA) * khc) / (4 * sp.pi ** 2)
    diff = sp.simplify(lhs - kbp)
    resid = max(abs(float(sp.N((lhs - kbp).subs(x, sp.Rational(str(p))), 30))) for p in points)
    return AmplitudeRelation(diff == 0, tuple(points), resid)


@dataclass(frozen=True)
class ExponentReport:
    nu: float
    nu_slope: float
    alpha: float
    two_minus_alpha: float
    eta: int
    eta_slopes: Tuple[Tuple[int, float], ...]
    gamma_bp: float
    theta: float
    note: str = ""


def _slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def fit_exponents(deltas: Sequence[float] | None = None, x_hat: float = 1.0) -> ExponentReport:
    """Log-log fits near z_c: nu from xi, 2 - alpha from s_0(z) - s_0(z_c), eta by diagnostic.

    For each trial eta' the slope of log |x^{-1+eta'} G| against log xi is
    1 + eta' in theory; the eta whose slope is closest to zero is selected.
    """
    if deltas is None:
        deltas = np.logspace(-6, -3, 13)
    deltas = np.asarray(deltas, dtype=float)
    xis = np.array([_correlation_length(Z_CRIT + d, d) for d in deltas])
    nu_slope = _slope(deltas, xis)
    w0 = np.array([_real_roots(Z_CRIT + d, d).w[0] for d in deltas])
    tma = _slope(deltas, w0)
    eta_slopes = []
    for trial in (0, -1, -2):
        vals = [abs(scaling_K_HC(x_hat, d, eta=trial).value) for d in deltas]
        eta_slopes.append((trial, _slope(xis, vals)))
    eta = min(eta_slopes, key=lambda e: abs(e[1]))[0]
    alpha = 2.0 - tma
    # the polymer susceptibility exponent equals alpha of the gas two dimensions lower
    gamma = alpha
    return ExponentReport(-nu_slope, nu_slope, alpha, tma, eta, tuple(eta_slopes), gamma,
                          3.0 - gamma, "theta reported as 3 - gamma_BP")


def derivative_jump(x: float, z: float, order: int = 1, h: float = 1e-5) -> float:
    """Difference of one-sided order-th derivatives of the closed form across x."""
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    f = lambda t: two_point_closed(t, z)
    if order == 0:
        return f(x + h) - f(x - h)
    right = (-3 * f(x) + 4 * f(x + h) - f(x + 2 * h)) / (2 * h)
    left = (3 * f(x) - 4 * f(x - h) + f(x - 2 * h)) / (2 * h)
    return right - left
