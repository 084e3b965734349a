"""Truncated power series in one variable.

Coefficients are either exact (``int``/``Fraction``) or floats.  Exact series
refuse float input instead of converting it, so identity checks built on
them never carry rounding noise.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, List, Sequence

from .errors import SingularSeriesError


def _is_exact(c) -> bool:
    return isinstance(c, Rational)


class TruncatedSeries:
    """c_0 + c_1 z + ... + c_N z^N, known through order N."""

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs: Iterable, exact: bool | None = None):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("a series needs at least the constant coefficient")
        if exact is None:
            exact = all(_is_exact(c) for c in coeffs)
        if exact:
            bad = [c for c in coeffs if not _is_exact(c)]
            if bad:
                raise TypeError(f"exact series cannot hold inexact coefficient {bad[0]!r}")
            coeffs = [Fraction(c) for c in coeffs]
        else:
            coeffs = [float(c) for c in coeffs]
        self.coeffs: List = coeffs
        self.exact: bool = exact

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"TruncatedSeries({[str(c) for c in self.coeffs]}, {kind})"

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def to_float(self) -> "TruncatedSeries":
        return TruncatedSeries([float(c) for c in self.coeffs], exact=False)

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs[: order + 1], exact=self.exact)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale_value(other, -1))

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return multiply(self, other)
        return scale_value(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return scale_value(self, -1)

    def __call__(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        return compose(self, inner)


def _like(a: TruncatedSeries, b: TruncatedSeries) -> bool:
    if a.exact != b.exact:
        raise TypeError("cannot mix exact and float series; convert explicitly with to_float()")
    return a.exact


def _zero(exact: bool):
    return Fraction(0) if exact else 0.0


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    exact = _like(a, b)
    n = min(a.order, b.order)
    return TruncatedSeries([a[k] + b[k] for k in range(n + 1)], exact=exact)


def multiply(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    exact = _like(a, b)
    n = min(a.order, b.order)
    out = [_zero(exact)] * (n + 1)
    for i in range(n + 1):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(n + 1 - i):
            out[i + j] += ai * b[j]
    return TruncatedSeries(out, exact=exact)


def scale_value(s: TruncatedSeries, factor) -> TruncatedSeries:
    """a * s(z)."""
    if s.exact and not _is_exact(factor):
        raise TypeError("exact series scaled by an inexact factor")
    return TruncatedSeries([factor * c for c in s], exact=s.exact)


def scale_argument(s: TruncatedSeries, factor) -> TruncatedSeries:
    """s(a z): c_N -> a^N c_N."""
    if s.exact and not _is_exact(factor):
        raise TypeError("exact series scaled by an inexact factor")
    out = []
    p = Fraction(1) if s.exact else 1.0
    for c in s:
        out.append(c * p)
        p = p * factor
    return TruncatedSeries(out, exact=s.exact)


def identity(order: int, exact: bool = True) -> TruncatedSeries:
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    return TruncatedSeries([zero, one] + [zero] * (order - 1), exact=exact)


def log1p_series(order: int, exact: bool = True) -> TruncatedSeries:
    """log(1 + z) = sum (-1)^(N-1) z^N / N."""
    if order < 1:
        raise ValueError("order must be at least 1")
    coeffs = [Fraction(0)] + [Fraction((-1) ** (n - 1), n) for n in range(1, order + 1)]
    s = TruncatedSeries(coeffs, exact=True)
    return s if exact else s.to_float()


def exp_series(order: int, exact: bool = True) -> TruncatedSeries:
    s = TruncatedSeries([Fraction(1, math.factorial(n)) for n in range(order + 1)], exact=True)
    return s if exact else s.to_float()


def compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """outer(inner(z)) through the shared order; needs inner(0) == 0."""
    exact = _like(outer, inner)
    if inner[0] != 0:
        raise ValueError("inner series must have zero constant term")
    n = min(outer.order, inner.order)
    inner = inner.truncate(n)
    one = Fraction(1) if exact else 1.0
    result = [_zero(exact)] * (n + 1)
    power = TruncatedSeries([one] + [_zero(exact)] * n, exact=exact)
    for k in range(n + 1):
        ck = outer[k]
        if ck != 0:
            for j in range(k, n + 1):
                result[j] += ck * power[j]
        if k < n:
            power = multiply(power, inner)
    return TruncatedSeries(result, exact=exact)


def revert(s: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse t with s(t(z)) = z through order N.

    Solved order by order: at step k the coefficient of z^k in s(t(z))
    is linear in t_k with slope c_1.
    """
    if s[0] != 0:
        raise ValueError("series to revert must have zero constant term")
    if s.order < 1 or s[1] == 0:
        raise SingularSeriesError("linear coefficient vanishes; series is not invertible")
    n = s.order
    exact = s.exact
    zero = _zero(exact)
    t = [zero] * (n + 1)
    t[1] = (Fraction(1) if exact else 1.0) / s[1]
    for k in range(2, n + 1):
        current = compose(s, TruncatedSeries(t, exact=exact))
        t[k] = -current[k] / s[1]
    return TruncatedSeries(t, exact=exact)


def series_from(coeffs: Sequence, exact: bool | None = None) -> TruncatedSeries:
    return TruncatedSeries(coeffs, exact=exact)
