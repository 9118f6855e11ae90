"""Shrinking-target hit counting and windowed correlation machinery.

Hits are counted against half-open balls B(y, r) = [y-r, y+r) with exact
rational comparisons; a ball of radius >= 1/2 is the whole circle, so
expected sums use min(2 r_i, 1) and the ratio is exactly 1 in the
saturated regime.  All sums start at i = 1.
"""

from __future__ import annotations

import math
import warnings
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np
from gmpy2 import mpq

from . import scan
from .errors import BudgetError, HorizonError, InvariantError
from .iet import IET, CircleInterval, e_T, iet_horizon, preimage_interval
from .numbers import rat_from_str, rat_to_str
from .sums import harmonic_range, int_str, mpq_to_fraction, to_mpq


# ---------------------------------------------------------------------------
# radius sequences
# ---------------------------------------------------------------------------

_LOG_PREC = 1 << 60


class _InverseLogCache:
    """Dyadic-block surrogate for 1 + ln(i), exactly computable.

    c_b = (sum over k <= 2^b of floor(2^60 / k)) / 2^60, one value per
    dyadic block [2^b, 2^{b+1}).  The floor sum is monotone in b and
    tracks the harmonic number H(2^b) within 2^-36, so r_i = 1/(i c_b(i))
    is non-increasing, i r_i = 1/c_b is non-increasing, and the series
    diverges: the Khinchin hypotheses hold exactly, not just in the limit.
    """

    def __init__(self):
        self._block_sums: list[int] = [_LOG_PREC]  # c_0 numerator: k = 1 only
        self._upto = 1  # floor sums accumulated over k <= 2^(len-1)

    def block_numerator(self, b: int) -> int:
        while len(self._block_sums) <= b:
            lo = self._upto + 1
            hi = self._upto * 2
            total = self._block_sums[-1]
            for c0 in range(lo, hi + 1, 1 << 22):
                c1 = min(c0 + (1 << 22) - 1, hi)
                ks = np.arange(c0, c1 + 1, dtype=np.int64)
                total += int(np.sum(_LOG_PREC // ks))
            self._block_sums.append(total)
            self._upto = hi
        return self._block_sums[b]


_INVLOG = _InverseLogCache()


def _block_of(i: int) -> int:
    return i.bit_length() - 1


@dataclass(frozen=True)
class RadiusSpec:
    """Closed-form radius sequence r_i with exact evaluation.

    families: harmonic(t): r_i = t/i; log_harmonic: r_i = 1/(i c_b(i))
    with the cached dyadic surrogate for 1 + ln i; constant(c); table.
    khinchin means i*r_i non-increasing, monotone means r_i
    non-increasing; both are decided exactly from the family.
    """

    family: str
    param: Optional[Fraction] = None
    table: tuple[Fraction, ...] = field(default=())

    def __post_init__(self):
        if self.family not in ("harmonic", "log_harmonic", "constant", "table"):
            raise ValueError(f"unknown radius family {self.family!r}")
        if self.family in ("harmonic", "constant"):
            if self.param is None or self.param < 0:
                raise ValueError(f"{self.family} needs a parameter >= 0")
        if self.family == "table":
            if any(r < 0 for r in self.table):
                raise ValueError("table radii must be >= 0")

    # -- flags ------------------------------------------------------------

    @property
    def khinchin(self) -> bool:
        if self.family in ("harmonic", "log_harmonic"):
            return True
        if self.family == "constant":
            return self.param == 0
        seq = [i * r for i, r in enumerate(self.table, start=1)]
        return all(a >= b for a, b in zip(seq, seq[1:]))

    @property
    def monotone(self) -> bool:
        if self.family in ("harmonic", "log_harmonic", "constant"):
            return True
        return all(a >= b for a, b in zip(self.table, self.table[1:]))

    # -- evaluation --------------------------------------------------------

    def eval(self, i: int) -> Fraction:
        if i < 1:
            raise ValueError("index must be >= 1")
        if self.family == "harmonic":
            return self.param / i
        if self.family == "constant":
            return self.param
        if self.family == "log_harmonic":
            return Fraction(_LOG_PREC, i * _INVLOG.block_numerator(_block_of(i)))
        if i > len(self.table):
            raise ValueError(f"table radius index {i} beyond table length {len(self.table)}")
        return self.table[i - 1]

    def floats(self, i_arr: np.ndarray) -> np.ndarray:
        """Float view of r_i, accurate to ~1e-15 relative (prefilter only)."""
        if self.family == "harmonic":
            return float(self.param) / i_arr
        if self.family == "constant":
            return np.full_like(i_arr, float(self.param))
        if self.family == "log_harmonic":
            exps = np.frexp(i_arr)[1] - 1
            top = max(int(exps.max(initial=0)), 0)
            cs = np.array(
                [float(_INVLOG.block_numerator(b)) / _LOG_PREC for b in range(top + 1)]
            )
            return 1.0 / (i_arr * cs[exps])
        out = np.zeros(len(i_arr))
        for k, i in enumerate(i_arr.astype(np.int64).tolist()):
            out[k] = float(self.eval(int(i)))
        return out

    def sat_until(self) -> int:
        """Largest prefix index with 2 r_i >= 1 (0 when none); the ball
        covers the circle there.  Relies on monotone families; tables are
        scanned."""
        if self.family == "harmonic":
            return math.floor(2 * self.param)
        if self.family == "constant":
            return 10**18 if 2 * self.param >= 1 else 0
        if self.family == "log_harmonic":
            i = 0
            while 2 * self.eval(i + 1) >= 1:
                i += 1
            return i
        n = 0
        for r in self.table:
            if 2 * r >= 1:
                n += 1
            else:
                break
        return n

    def expected_range(self, a: int, b: int) -> mpq:
        """Exact sum over i in [a, b] of min(2 r_i, 1)."""
        if b < a:
            return mpq(0)
        sat = self.sat_until()
        full = max(0, min(b, sat) - a + 1)
        lo = max(a, sat + 1)
        out = mpq(full)
        if lo > b:
            return out
        if self.family == "constant":
            return out + 2 * to_mpq(self.param) * (b - lo + 1)
        if self.family == "harmonic":
            return out + 2 * to_mpq(self.param) * harmonic_range(lo, b)
        if self.family == "log_harmonic":
            i = lo
            while i <= b:
                blk = _block_of(i)
                hi = min(b, (1 << (blk + 1)) - 1)
                c = mpq(_INVLOG.block_numerator(blk), _LOG_PREC)
                out += 2 * harmonic_range(i, hi) / c
                i = hi + 1
            return out
        for i in range(lo, b + 1):
            out += min(2 * to_mpq(self.eval(i)), mpq(1))
        return out

    # -- parsing -----------------------------------------------------------

    @classmethod
    def harmonic(cls, t) -> "RadiusSpec":
        return cls("harmonic", param=Fraction(t))

    @classmethod
    def log_harmonic(cls) -> "RadiusSpec":
        return cls("log_harmonic")

    @classmethod
    def constant(cls, c) -> "RadiusSpec":
        return cls("constant", param=Fraction(c))

    @classmethod
    def from_table(cls, radii) -> "RadiusSpec":
        return cls("table", table=tuple(Fraction(r) for r in radii))

    @classmethod
    def parse(cls, text: str) -> "RadiusSpec":
        """Config syntax: "harmonic:1/2", "log_harmonic", "constant:1/3",
        "table:@file" (one rational per line) or "table:1/2,1/3,...";"""
        kind, _, arg = text.partition(":")
        kind = kind.strip()
        if kind == "harmonic":
            return cls.harmonic(rat_from_str(arg))
        if kind == "log_harmonic":
            return cls.log_harmonic()
        if kind == "constant":
            return cls.constant(rat_from_str(arg))
        if kind == "table":
            arg = arg.strip()
            if arg.startswith("@"):
                lines = Path(arg[1:]).read_text().split()
                return cls.from_table(rat_from_str(t) for t in lines if t.strip())
            return cls.from_table(rat_from_str(t) for t in arg.split(","))
        raise ValueError(f"cannot parse radius spec {text!r}")

    def to_str(self) -> str:
        if self.family == "table":
            return "table:" + ",".join(rat_to_str(r) for r in self.table)
        if self.family == "log_harmonic":
            return "log_harmonic"
        return f"{self.family}:{rat_to_str(self.param)}"


def radius_eval(spec: RadiusSpec, i: int) -> Fraction:
    return spec.eval(i)


# ---------------------------------------------------------------------------
# hit scans
# ---------------------------------------------------------------------------


def ball_hit_times(T: IET, x: Fraction, y: Fraction, spec: RadiusSpec, N: int) -> list[int]:
    """Times 1 <= i <= N with T^i(x) in B(y, r_i), exact."""
    if N > iet_horizon(T):
        raise HorizonError(f"N = {N} beyond horizon {iet_horizon(T)}")
    if spec.family == "table" and len(spec.table) < N:
        raise ValueError(f"table of length {len(spec.table)} too short for N = {N}")
    if T.is_rotation():
        sat = min(spec.sat_until(), N)
        return scan.rotation_ball_hits(
            T.rotation_angle, Fraction(x) % 1, Fraction(y) % 1,
            spec.floats, spec.eval, 1, N + 1, sat_until=sat,
        )
    hits = []
    from math import lcm

    den = lcm(T.den, Fraction(x).denominator, Fraction(y).denominator)
    u = int((Fraction(x) % 1) * den)
    yd = int((Fraction(y) % 1) * den)
    for i in range(1, N + 1):
        u = T.step_scaled(u, den)
        r = spec.eval(i)
        if 2 * r >= 1:
            hits.append(i)
            continue
        v = (u - yd) % den
        if v * r.denominator < r.numerator * den or (den - v) * r.denominator <= r.numerator * den:
            hits.append(i)
    return hits


@dataclass(frozen=True)
class HitSeries:
    """Checkpoint rows (N, S_N, E_N, ratio); ratio is None when E_N = 0."""

    checkpoints: tuple[tuple[int, int, Fraction, Optional[Fraction]], ...]

    def to_csv(self) -> str:
        lines = ["N;S_N;E_N_num;E_N_den;ratio_float"]
        for N, S, E, ratio in self.checkpoints:
            rf = "" if ratio is None else repr(float(mpq(S) / to_mpq(E)))
            lines.append(f"{N};{S};{int_str(E.numerator)};{int_str(E.denominator)};{rf}")
        return "\n".join(lines) + "\n"


_EXPECTED_CACHE: dict = {}


def expected_series(spec: RadiusSpec, checkpoints: tuple[int, ...]) -> list[mpq]:
    """E_N at each checkpoint, exact; memoized (seed-independent and slow
    to recompute at N = 10^7)."""
    key = (spec, checkpoints)
    if key not in _EXPECTED_CACHE:
        out = []
        E = mpq(0)
        prev = 0
        for ckpt in checkpoints:
            E += spec.expected_range(prev + 1, ckpt)
            prev = ckpt
            out.append(E)
        _EXPECTED_CACHE[key] = out
    return _EXPECTED_CACHE[key]


def hit_ratio_series(
    T: IET, x: Fraction, y: Fraction, spec: RadiusSpec, checkpoints
) -> HitSeries:
    checkpoints = tuple(checkpoints)
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if not checkpoints:
        return HitSeries(())
    N = checkpoints[-1]
    hits = ball_hit_times(T, x, y, spec, N)
    counts = scan.counts_at(hits, checkpoints)
    rows = []
    for ckpt, S, E in zip(checkpoints, counts, expected_series(spec, checkpoints)):
        ratio = None if E == 0 else mpq_to_fraction(mpq(S) / E)
        rows.append((ckpt, S, mpq_to_fraction(E), ratio))
    return HitSeries(tuple(rows))


# ---------------------------------------------------------------------------
# scale selection and windows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaleSequence:
    """Powers of 2 with e_T(2n) > xi/(2n), ascending."""

    xi: Fraction
    scales: tuple[int, ...]

    def scale_ratios(self) -> tuple[Fraction, ...]:
        return tuple(
            Fraction(b, a) for a, b in zip(self.scales, self.scales[1:])
        )


def select_scales(T: IET, xi: Fraction, n_max: int) -> ScaleSequence:
    """All qualifying dyadic scales up to n_max.

    The inductive definition n_{i+1} = min{2^k > n_i : qualifies} yields
    exactly the qualifying powers of two in order.  Empty result carries
    no error: the caller sees an empty ScaleSequence.
    """
    xi = Fraction(xi)
    if xi <= 0:
        raise ValueError("xi must be positive")
    out = []
    n = 2
    while n <= n_max:
        if e_T(T, 2 * n) * (2 * n) > xi:
            out.append(n)
        n *= 2
    if not out:
        warnings.warn(f"no scale up to {n_max} satisfies e_T(2n) > xi/(2n) for xi = {xi}")
    return ScaleSequence(xi=xi, scales=tuple(out))


def window_count(T: IET, x: Fraction, y: Fraction, spec: RadiusSpec, n_i: int) -> int:
    """Exact number of hits for j in [n_i, 2 n_i] (both ends included)."""
    if 2 * n_i > iet_horizon(T):
        raise HorizonError(f"window [{n_i}, {2*n_i}] beyond horizon {iet_horizon(T)}")
    if T.is_rotation():
        sat = min(spec.sat_until(), 2 * n_i)
        hits = scan.rotation_ball_hits(
            T.rotation_angle, Fraction(x) % 1, Fraction(y) % 1,
            spec.floats, spec.eval, n_i, 2 * n_i + 1, sat_until=sat,
        )
        return len(hits)
    return len([i for i in ball_hit_times(T, x, y, spec, 2 * n_i) if i >= n_i])


def window_integral(T: IET, y: Fraction, spec: RadiusSpec, n_i: int) -> Fraction:
    """Exact integral of the window sum: sum over [n_i, 2 n_i] of min(2 r_j, 1).

    T preserves Lebesgue measure, so each indicator integrates to the
    ball measure regardless of the map.
    """
    return mpq_to_fraction(spec.expected_range(n_i, 2 * n_i))


def _preimage_pieces(T: IET, J: CircleInterval, k: int) -> list[CircleInterval]:
    pieces = [J]
    for _ in range(k):
        nxt = []
        for p in pieces:
            nxt.extend(preimage_interval(T, p))
        pieces = nxt
    return pieces


def window_correlation(
    T: IET,
    y: Fraction,
    spec: RadiusSpec,
    n_i: int,
    n_j: int,
    budget: int = 2_000_000,
) -> Fraction:
    """Exact integral of g_i g_j: sum over window pairs (a, b) of
    lambda(T^{-a} B(y, r_a) cap T^{-b} B(y, r_b))."""
    wi = list(range(n_i, 2 * n_i + 1))
    wj = list(range(n_j, 2 * n_j + 1))
    if len(wi) * len(wj) > budget:
        raise BudgetError(
            f"window pair work {len(wi)}x{len(wj)} = {len(wi)*len(wj)} exceeds budget {budget}"
        )
    y = Fraction(y) % 1

    def ball(r: Fraction) -> CircleInterval:
        if 2 * r >= 1:
            return CircleInterval(Fraction(0), Fraction(1))
        return CircleInterval((y - r) % 1, 2 * r)

    if T.is_rotation():
        alpha = T.rotation_angle
        pre_i = [(a, [ball(spec.eval(a)).shift(-a * alpha)]) for a in wi]
        pre_j = [(b, [ball(spec.eval(b)).shift(-b * alpha)]) for b in wj]
    else:
        pre_i = [(a, _preimage_pieces(T, ball(spec.eval(a)), a)) for a in wi]
        pre_j = [(b, _preimage_pieces(T, ball(spec.eval(b)), b)) for b in wj]
        work = sum(len(p) for _, p in pre_i) * sum(len(p) for _, p in pre_j)
        if work > budget:
            raise BudgetError(f"preimage piece work {work} exceeds budget {budget}")
    total = Fraction(0)
    for _, pieces_a in pre_i:
        for _, pieces_b in pre_j:
            for pa in pieces_a:
                for pb in pieces_b:
                    total += pa.intersection_measure(pb)
    return total


# ---------------------------------------------------------------------------
# run-time asserted bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WindowCheck:
    n_i: int
    count: int
    bound: Fraction
    kind: str  # "window" (per-scale hit bound) or "between" (maximal bound)
    ok: bool


def window_assertions(
    spec: RadiusSpec,
    scales: ScaleSequence,
    hits: list[int],
    N: int,
    strict: bool = True,
) -> list[WindowCheck]:
    """Per-scale bound checks on a hit-time list.

    window: count over [n_i, 2 n_i] <= 1 + (2 n_i / xi) 2 r_{n_i}, for
    every selected scale.  between: count over [2 n_i, n_{i+1}] squared
    <= 36 xi^-2 (2 n_i r_{2 n_i}) (n_{i+1}/n_i), for Khinchin families.
    Violations raise InvariantError when strict.
    """
    xi = scales.xi
    arr = sorted(hits)
    checks = []

    def count_in(lo, hi):  # inclusive
        return bisect_right(arr, hi) - bisect_right(arr, lo - 1)

    for idx, n_i in enumerate(scales.scales):
        if 2 * n_i > N:
            break
        g = count_in(n_i, 2 * n_i)
        bound = 1 + Fraction(2 * n_i, 1) / xi * 2 * spec.eval(n_i)
        checks.append(WindowCheck(n_i, g, bound, "window", Fraction(g) <= bound))
        if spec.khinchin and idx + 1 < len(scales.scales):
            n_next = scales.scales[idx + 1]
            if n_next <= N:
                c = count_in(2 * n_i, n_next)
                sq_bound = (
                    36 / xi**2 * (2 * n_i * spec.eval(2 * n_i)) * Fraction(n_next, n_i)
                )
                checks.append(
                    WindowCheck(n_i, c, sq_bound, "between", Fraction(c) ** 2 <= sq_bound)
                )
    if strict:
        bad = [c for c in checks if not c.ok]
        if bad:
            b = bad[0]
            raise InvariantError(
                f"{b.kind} bound failed at scale {b.n_i}: count {b.count}, bound {float(b.bound):.6g}"
            )
    return checks


# ---------------------------------------------------------------------------
# scale partition into good/bad windows
# ---------------------------------------------------------------------------


def partition_scales_GB(
    spec: RadiusSpec,
    C: Fraction,
    rho: Fraction,
    M: Fraction,
    j_max: int,
    corrected_rho: bool = False,
):
    """Exact membership sets (G, B) for j = 0..j_max.

    Radii at geometric indices are evaluated at floor(C^L); the size
    threshold is i r_i >= M at the floored index, so a constant-index
    step (floor(C^j) == floor(C^{j+1})) is decided consistently.
    G needs the threshold plus the stability test r_{C^j} <= rho *
    r_{C^{j+1}}; B collects threshold indices failing it.  As stated the
    stability test is empty for non-increasing radii; corrected_rho
    flips it to rho * r_{C^j} <= r_{C^{j+1}} ("the radius drops by at
    most 1/rho across the window"), the form the surrounding estimates
    actually use.
    """
    C, rho, M = Fraction(C), Fraction(rho), Fraction(M)
    if not (C > 1 and 0 < rho < 1 and M > 1):
        raise ValueError("need C > 1, rho in (0,1), M > 1")
    G, B = set(), set()
    cj = Fraction(1)
    for j in range(0, j_max + 1):
        cj1 = cj * C
        i_lo, i_hi = max(1, math.floor(cj)), max(1, math.floor(cj1))
        r_hi = spec.eval(i_hi)
        if i_hi * r_hi >= M:
            r_lo = spec.eval(i_lo)
            stable = (rho * r_lo <= r_hi) if corrected_rho else (r_lo <= rho * r_hi)
            if stable:
                G.add(j)
            else:
                B.add(j)
        cj = cj1
    return G, B


# ---------------------------------------------------------------------------
# reported (not asserted) diagnostics
# ---------------------------------------------------------------------------


def control_bad_report(
    T: IET, x: Fraction, spec: RadiusSpec, C: Fraction, N: int
) -> list[tuple[int, int, float, float]]:
    """Per-window (j, count, denominator, ratio) for windows [C^j, C^{j+1}].

    denominator = sum of 2 r_i over the window + log(r_lo / r_hi) + 1.
    The window-count to denominator ratio is reported; only its
    stabilization across doubling horizons is testable, the constant is
    existential.
    """
    hits = ball_hit_times(T, x, Fraction(1, 2), spec, N)
    arr = sorted(hits)
    out = []
    C = Fraction(C)
    j = 0
    while True:
        i_lo = max(1, math.floor(C**j))
        i_hi = max(1, math.floor(C ** (j + 1)))
        if i_hi > N:
            break
        if i_hi > i_lo:
            count = bisect_right(arr, i_hi) - bisect_right(arr, i_lo - 1)
            denom = float(spec.expected_range(i_lo, i_hi))
            r_lo, r_hi = spec.eval(i_lo), spec.eval(i_hi)
            if r_hi > 0:
                denom += math.log(float(r_lo / r_hi))
            denom += 1.0
            out.append((j, count, denom, count / denom))
        j += 1
    return out


def big_r_deviation(T: IET, x: Fraction, C: int, j: int, s: Fraction) -> float:
    """|empirical frequency / measure - 1| for B(1/2, s/C^{j+1}) over (C^j, C^{j+1}]."""
    lo, hi = C**j, C ** (j + 1)
    r = Fraction(s) / hi
    measure = min(2 * r, Fraction(1))
    if measure == 0:
        raise ValueError("empty target ball")
    if T.is_rotation():
        ball_left = (Fraction(1, 2) - r) % 1
        hits = scan.rotation_interval_hits(
            T.rotation_angle, Fraction(x) % 1, ball_left, measure, lo + 1, hi + 1
        )
        count = len(hits)
    else:
        from .iet import orbit_hits

        ball = CircleInterval((Fraction(1, 2) - r) % 1, measure)
        count = len(orbit_hits(T, x, ball, hi, start=lo + 1))
    freq = Fraction(count, hi - lo)
    return abs(float(freq / measure) - 1.0)
