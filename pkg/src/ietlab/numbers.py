"""Exact rational arithmetic, continued fractions and diophantine checks.

Every point, length and measure in this package is a `fractions.Fraction`;
irrational parameters are represented by deep finite continued-fraction
prefixes, so all downstream arithmetic stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


Rational = Fraction


def rat_from_str(s: str) -> Fraction:
    """Parse "p/q" (or a bare integer "p") into a Fraction."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def rat_to_str(x: Fraction) -> str:
    """Serialize a Fraction as "p/q" in lowest terms (den 1 kept explicit)."""
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class CFExpansion:
    """A finite continued fraction [0; a_1, ..., a_K] with its convergents.

    `convergents[k] == (p_k, q_k)` for k = 0..K, with p_0 = 0, q_0 = 1 and
    the usual recurrence p_{k+1} = a_{k+1} p_k + p_{k-1} (p_{-1} = 1,
    q_{-1} = 0).  `exact` is False when the expansion was truncated at
    max_depth before the remainder vanished.
    """

    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...] = field(default=())
    exact: bool = True

    def __post_init__(self):
        if not self.quotients:
            raise ValueError("empty continued fraction")
        if any(a < 1 for a in self.quotients):
            raise ValueError("partial quotients must be positive integers")
        if not self.convergents:
            object.__setattr__(self, "convergents", _convergents_of(self.quotients))

    @property
    def depth(self) -> int:
        return len(self.quotients)

    def value(self) -> Fraction:
        p, q = self.convergents[-1]
        return Fraction(p, q)

    def q_sequence(self) -> tuple[int, ...]:
        return tuple(q for _, q in self.convergents)

    def horizon(self) -> int:
        """Largest orbit length this rational stand-in is trusted for.

        A rational approximant's orbit is eventually periodic with period
        q_K, so experiments refuse N >= q_K / 2.
        """
        return (self.convergents[-1][1] - 1) // 2

    def to_str(self) -> str:
        return ",".join(str(a) for a in self.quotients)

    @classmethod
    def from_str(cls, s: str) -> "CFExpansion":
        return cls(tuple(int(t) for t in s.split(",") if t.strip()))


def _convergents_of(quotients) -> tuple[tuple[int, int], ...]:
    p_prev, q_prev = 1, 0  # (p_{-1}, q_{-1})
    p, q = 0, 1            # (p_0, q_0)
    out = [(p, q)]
    for a in quotients:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return tuple(out)


def cf_expand(x: Fraction, max_depth: int = 10**6) -> CFExpansion:
    """Continued fraction of a rational in (0,1) by the exact Gauss map.

    Terminates when the remainder vanishes (canonical form, final quotient
    >= 2 for depth >= 2) or when max_depth quotients have been emitted, in
    which case `exact` is False.
    """
    if not (0 < x < 1):
        raise ValueError(f"cf_expand requires 0 < x < 1, got {x}")
    if max_depth < 1:
        raise ValueError("max_depth must be positive")
    quotients = []
    num, den = x.numerator, x.denominator
    # Euclid on (den, num): x = 0 + 1/(den/num)
    exact = True
    while num:
        if len(quotients) == max_depth:
            exact = False
            break
        a, rem = divmod(den, num)
        quotients.append(a)
        den, num = num, rem
    return CFExpansion(tuple(quotients), exact=exact)


def cf_value(quotients) -> Fraction:
    """Exact value of the finite continued fraction [0; a_1, ..., a_K]."""
    quotients = tuple(quotients)
    if not quotients:
        raise ValueError("empty continued fraction")
    if any(a < 1 for a in quotients):
        raise ValueError("partial quotients must be positive integers")
    val = Fraction(0)
    for a in reversed(quotients):
        val = Fraction(1, a + val)
    return val


def convergents(cf: CFExpansion) -> tuple[tuple[int, int], ...]:
    return cf.convergents


def dist_nearest_int(q: int, alpha: Fraction) -> Fraction:
    """<<q*alpha>>: distance from q*alpha to the nearest integer, exact."""
    if q < 0:
        raise ValueError("q must be >= 0")
    f = (q * alpha) % 1
    return min(f, 1 - f)


@dataclass(frozen=True)
class DiophantineReport:
    """Growth diagnostics for a partial-quotient sequence.

    violations: indices n with a_n >= n^(4/3), decided by the integer
    comparison a_n^3 >= n^4.  log_defect[N-1] = (N, d_N) where d_N is the
    per-index share of log a_i mass carried by quotients >= C; values are
    double precision and feed only threshold conclusions.
    """

    violations: tuple[int, ...]
    log_defect: tuple[tuple[int, float], ...]
    max_quotient: int
    cutoff: int

    def late_violations(self, after: int = 1) -> tuple[int, ...]:
        return tuple(n for n in self.violations if n > after)


def diophantine_report(cf: CFExpansion, C: int = 2) -> DiophantineReport:
    if C < 2:
        raise ValueError("C must be >= 2")
    violations = tuple(
        n for n, a in enumerate(cf.quotients, start=1) if a**3 >= n**4
    )
    defect = []
    acc = 0.0
    for n, a in enumerate(cf.quotients, start=1):
        if a >= C:
            acc += math.log(a)
        defect.append((n, acc / n))
    return DiophantineReport(
        violations=violations,
        log_defect=tuple(defect),
        max_quotient=max(cf.quotients),
        cutoff=C,
    )


def max_quotient_prefix(cf: CFExpansion) -> int:
    return max(cf.quotients)
