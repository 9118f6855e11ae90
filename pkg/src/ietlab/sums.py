"""Exact big-rational summation and statistics on gmpy2.

Partial sums of reciprocal-type series at N = 10^7 carry ~14-million-bit
reduced denominators.  CPython 3.10's Fraction normalization (Lehmer gcd)
and int-to-str are quadratic at that size, so sums, medians and
serialization of such values run on GMP; small values travel as ordinary
Fractions.
"""

from __future__ import annotations

import sys
from fractions import Fraction

from gmpy2 import mpq, mpz

sys.setrecursionlimit(100000)


def to_mpq(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def mpq_to_fraction(x: mpq) -> Fraction:
    """Exact handoff; mpq is canonical so the gcd step is skipped."""
    if hasattr(Fraction, "_from_coprime_ints"):
        return Fraction._from_coprime_ints(int(x.numerator), int(x.denominator))
    f = Fraction.__new__(Fraction)
    f._numerator = int(x.numerator)
    f._denominator = int(x.denominator)
    return f


def int_str(n) -> str:
    """Decimal string of a (possibly huge) integer in subquadratic time."""
    return mpz(n).digits()


def harmonic_range(a: int, b: int) -> mpq:
    """Sum of 1/i for i in [a, b], exact, by divide and conquer."""
    if b < a:
        return mpq(0)
    if b - a < 32:
        s = mpq(0)
        for i in range(a, b + 1):
            s += mpq(1, i)
        return s
    m = (a + b) // 2
    return harmonic_range(a, m) + harmonic_range(m + 1, b)


def median_mpq(values: list[mpq]) -> mpq:
    """Median of exact rationals (mean of the two middle order statistics)."""
    if not values:
        raise ValueError("median of empty list")
    vs = sorted(values)
    n = len(vs)
    if n % 2:
        return vs[n // 2]
    return (vs[n // 2 - 1] + vs[n // 2]) / 2


def quantile_mpq(values: list[mpq], q: Fraction) -> mpq:
    """Lower-quantile order statistic at level q in [0,1]."""
    vs = sorted(values)
    idx = min(len(vs) - 1, int(q * len(vs)))
    return vs[idx]
