"""Undetermined-point targets for rotations.

A point is undetermined at step j when its coding under the two-cell
partition {[0, alpha), [alpha, 1)} up to j does not decide letter j+1;
equivalently the j-th orbit point lies in the atom U_j of 1-alpha in the
partition of [0,1) cut at {k alpha : 0 <= k <= j+1}.  The atom admits a
closed form through the denominators r_j, s_j of the best and second
best rational approximations with denominator <= j; the brute-force cut
is kept as the authoritative oracle and the closed form is an
accelerator, exactly cross-checked.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from . import scan
from .errors import DegenerateError, HorizonError, InvariantError
from .iet import CircleInterval
from .numbers import CFExpansion, cf_expand, dist_nearest_int, rat_to_str


# ---------------------------------------------------------------------------
# r_j, s_j, t_j and the closed-form atom
# ---------------------------------------------------------------------------


def rst(j: int, cf: CFExpansion) -> tuple[int, int, int]:
    """(r_j, s_j, t_j) for 1 <= j < q_K.

    r_j = max{q_k <= j}, s_j = max{q_k : q_{k+1} <= j} (0 when no
    convergent denominator beyond q_0 fits, via the q_{-1} = 0
    convention), and t_j = max{T >= 0 : s_j + T r_j <= j + 1}.  The j+1
    in t_j matches the cut at {k alpha : k <= j+1}; the partition join of
    the first j translates of the two-cell partition carries breakpoints
    up to (j+1) alpha.
    """
    qs = cf.q_sequence()
    if j < 1:
        raise ValueError("j must be >= 1")
    if j >= qs[-1]:
        raise HorizonError(f"j = {j} at or beyond q_K = {qs[-1]}")
    k = bisect_right(qs, j) - 1
    r = qs[k]
    s = qs[k - 1] if k >= 1 else 0
    t = (j + 1 - s) // r
    return r, s, t


def _rst_index(j: int, cf: CFExpansion) -> int:
    """Largest k with q_k <= j (parity selects the atom's case)."""
    return bisect_right(cf.q_sequence(), j) - 1


@dataclass(frozen=True)
class AtomDescription:
    j: int
    r: int
    s: int
    t: int
    U: CircleInterval
    measure: Fraction

    def V(self, alpha: Fraction) -> CircleInterval:
        """V_j = R^{-j} U_j, the undetermined set itself."""
        return self.U.shift(-self.j * alpha)


def _formula_start(cf: CFExpansion) -> int:
    """First j where the two-denominator closed form applies.

    Needs r_j > s_j >= 1: from q_1 on when a_1 >= 2; the duplicated
    denominators q_0 = q_1 = 1 of a_1 = 1 push it to q_2.
    """
    qs = cf.q_sequence()
    return qs[1] if cf.quotients[0] >= 2 else qs[2]


def _formula_atom_interval(j: int, alpha: Fraction, cf: CFExpansion) -> CircleInterval:
    """Closed-form U_j via the image interval of the rotated atom.

    In the image the available cut points are k*alpha for k <= j+2 (the
    cut set of the atom is k <= j+1 and the rotation shifts indices by
    one), so the climb count is the largest T >= 0 with s + T r <= j+2;
    the cross-checked brute cut fixes this convention.
    """
    qs = cf.q_sequence()
    r, s, _ = rst(j, cf)
    if s == 0:
        # j < q_1 (a_1 >= 2): the cuts 0, alpha, ..., (j+1) alpha are
        # still increasing and the closed form does not apply yet
        target = 1 - alpha
        k_lo = min(j + 1, int(target / alpha))
        lo = k_lo * alpha
        if lo == target:
            raise DegenerateError(f"1-alpha lies on the cut {k_lo}*alpha at j = {j}")
        hi = (k_lo + 1) * alpha if k_lo + 1 <= j + 1 else Fraction(1)
        return CircleInterval(lo, hi - lo)
    if j < _formula_start(cf):
        tracker = AtomTracker(alpha)
        for _ in range(j):
            tracker.advance()
        return tracker.interval()
    t_eff = (j + 2 - s) // r
    r_frac = (r * alpha) % 1
    s_frac = (s * alpha) % 1
    if r_frac == Fraction(1, 2):
        raise DegenerateError(f"[r_j alpha] = 1/2 exactly at j = {j}")
    k = _rst_index(j, cf)
    if k % 2 == 0:
        # r-denominator approximates from below: the image left endpoint
        # climbs by t_eff steps of [r alpha]
        left = (s_frac + t_eff * r_frac) % 1
        length = (r_frac - left) % 1
    else:
        left = r_frac
        right = s_frac - t_eff * (1 - r_frac)
        length = (right - left) % 1
    image = CircleInterval(left, length)
    return image.shift(-alpha)


class AtomTracker:
    """Incremental brute-force atom of 1-alpha under the growing cut.

    State j holds the atom of the partition of [0,1) cut at
    {k alpha mod 1 : 0 <= k <= j+1}; 0 is always a cut, so the atom
    never wraps.  advance() inserts one cut exactly.
    """

    def __init__(self, alpha: Fraction):
        alpha = Fraction(alpha)
        if not (0 < alpha < 1):
            raise ValueError("alpha must lie in (0,1)")
        self.alpha = alpha
        self.target = 1 - alpha
        self.j = 0
        if self.target == alpha:  # alpha = 1/2
            raise DegenerateError("1-alpha coincides with the first cut")
        if self.target > alpha:
            self.lo, self.hi = alpha, Fraction(1)
        else:
            self.lo, self.hi = Fraction(0), alpha

    def advance(self) -> None:
        self.j += 1
        c = ((self.j + 1) * self.alpha) % 1
        if c == self.target:
            raise DegenerateError(
                f"1-alpha lies on the cut {self.j + 1}*alpha at j = {self.j}"
            )
        if self.lo < c <= self.target:
            self.lo = c
        elif self.target < c < self.hi:
            self.hi = c

    def interval(self) -> CircleInterval:
        return CircleInterval(self.lo, self.hi - self.lo)


def atom_series(
    alpha: Fraction, j_max: int, mode: str = "formula", cf: Optional[CFExpansion] = None
) -> Iterator[AtomDescription]:
    """AtomDescriptions for j = 1..j_max in one pass."""
    cf = cf or cf_expand(alpha)
    if mode == "brute":
        tracker = AtomTracker(alpha)
        for j in range(1, j_max + 1):
            tracker.advance()
            U = tracker.interval()
            r, s, t = rst(j, cf)
            yield AtomDescription(j, r, s, t, U, U.length)
    elif mode == "formula":
        for j in range(1, j_max + 1):
            U = _formula_atom_interval(j, alpha, cf)
            r, s, t = rst(j, cf)
            yield AtomDescription(j, r, s, t, U, U.length)
    else:
        raise ValueError(f"unknown mode {mode!r}")


def atom(j: int, alpha: Fraction, mode: str = "formula") -> AtomDescription:
    """Atom U_j of 1-alpha: closed form or brute-force cut; both exact."""
    cf = cf_expand(alpha)
    if mode == "brute":
        tracker = AtomTracker(alpha)
        for _ in range(j):
            tracker.advance()
        U = tracker.interval()
        r, s, t = rst(j, cf)
        return AtomDescription(j, r, s, t, U, U.length)
    if mode == "formula":
        U = _formula_atom_interval(j, alpha, cf)
        r, s, t = rst(j, cf)
        return AtomDescription(j, r, s, t, U, U.length)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# piecewise-constant atom ranges (fast exact scans)
# ---------------------------------------------------------------------------


def atom_pieces(
    alpha: Fraction, j_lo: int, j_hi: int, cf: Optional[CFExpansion] = None, verify: bool = True
) -> Iterator[tuple[int, int, CircleInterval]]:
    """Maximal ranges [a, b) x {U} with U_j = U for all j in [a, b).

    (r_j, s_j, t_j) is locally constant between convergent denominators
    and t-increments, and U_j depends only on it, so the atom is updated
    at those breakpoints only.  With verify on, each piece is checked
    against the incremental cut: the atom nests downward and no cut
    point may land strictly inside a piece's atom.
    """
    cf = cf or cf_expand(alpha)
    qs = cf.q_sequence()
    start = _formula_start(cf)
    j = j_lo
    prev_U: Optional[CircleInterval] = None
    while j < j_hi:
        U = _formula_atom_interval(j, alpha, cf)
        if j < start:
            b = min(j + 1, j_hi)  # pre-formula regime: step one index at a time
        else:
            r, s, _ = rst(j, cf)
            t_eff = (j + 2 - s) // r
            k = bisect_right(qs, j)
            next_q = qs[k] if k < len(qs) else j_hi
            nxt = min(next_q, s + (t_eff + 1) * r - 2)
            b = max(j + 1, min(nxt, j_hi))
        if verify:
            if prev_U is not None:
                nested = all(
                    any(c <= a_ and b_ <= d for c, d in prev_U.segments())
                    for a_, b_ in U.segments()
                )
                if not nested:
                    raise InvariantError(f"atom not nested at j = {j}")
            # cuts entering during the piece must miss the constant atom
            start = j + 2 if (prev_U is None or U != prev_U) else j + 1
            stray = scan.rotation_interval_hits(
                alpha, Fraction(0), U.left, U.length, start, b + 1
            )
            if stray:
                raise InvariantError(
                    f"cut {stray[0]}*alpha lands inside the atom on piece [{j},{b})"
                )
        yield (j, b, U)
        prev_U = U
        j = b


# ---------------------------------------------------------------------------
# the undetermined series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UndeterminedSeries:
    rows: tuple[tuple[int, int, Fraction, Optional[float]], ...]  # (n, S_n, Lambda_n, log_ratio)

    def to_csv(self) -> str:
        lines = ["n;S_n;Lambda_num;Lambda_den;log_ratio"]
        for n, S, lam, lr in self.rows:
            lines.append(
                f"{n};{S};{lam.numerator};{lam.denominator};{'' if lr is None else repr(lr)}"
            )
        return "\n".join(lines) + "\n"


def undetermined_hits(
    alpha: Fraction, x: Fraction, n_max: int, cf: Optional[CFExpansion] = None
) -> list[int]:
    """Times 1 <= j <= n_max with R^j x in U_j, exact."""
    cf = cf or cf_expand(alpha)
    hits: list[int] = []
    for a, b, U in atom_pieces(alpha, 1, n_max + 1, cf=cf):
        hits.extend(
            scan.rotation_interval_hits(alpha, Fraction(x) % 1, U.left, U.length, a, b)
        )
    return hits


def lambda_checkpoints(
    alpha: Fraction, checkpoints, cf: Optional[CFExpansion] = None
) -> list[Fraction]:
    """Exact Lambda_n = sum of lambda(V_j) for j <= n at each checkpoint."""
    cf = cf or cf_expand(alpha)
    checkpoints = list(checkpoints)
    out = []
    total = Fraction(0)
    idx = 0
    for a, b, U in atom_pieces(alpha, 1, checkpoints[-1] + 1, cf=cf, verify=False):
        while idx < len(checkpoints) and checkpoints[idx] < a:
            out.append(total)
            idx += 1
        while idx < len(checkpoints) and a <= checkpoints[idx] < b:
            out.append(total + U.length * (checkpoints[idx] - a + 1))
            idx += 1
        total += U.length * (b - a)
    while idx < len(checkpoints):
        out.append(total)
        idx += 1
    return out


def undetermined_series(
    alpha: Fraction, x: Fraction, checkpoints, cf: Optional[CFExpansion] = None
) -> UndeterminedSeries:
    """(n, S_n, Lambda_n, log S_n / log Lambda_n) rows at each checkpoint.

    Two exact bounds are asserted on every run: the per-index-interval
    contribution of [q_i, q_{i+1}) to Lambda is at most 2 a_{i+1}, and
    S at every q_m is at most the partial quotient sum a_1 + ... + a_m
    (over each range of the index partition the V_l are disjoint).
    """
    cf = cf or cf_expand(alpha)
    checkpoints = tuple(checkpoints)
    if not checkpoints:
        return UndeterminedSeries(())
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    n_max = checkpoints[-1]
    if n_max > cf.horizon():
        raise HorizonError(f"n = {n_max} beyond horizon {cf.horizon()}")
    hits = undetermined_hits(alpha, x, n_max, cf=cf)
    lams = lambda_checkpoints(alpha, checkpoints, cf=cf)
    counts = scan.counts_at(hits, list(checkpoints))
    _assert_quotient_sum_bound(cf, hits, n_max)
    _assert_lambda_window_bound(alpha, cf, n_max)
    rows = []
    for n, S, lam in zip(checkpoints, counts, lams):
        lr = None
        if S > 1 and lam > 1:
            lr = math.log(S) / math.log(float(lam))
        rows.append((n, S, lam, lr))
    return UndeterminedSeries(tuple(rows))


def _assert_quotient_sum_bound(cf: CFExpansion, hits: list[int], n_max: int) -> None:
    qs = cf.q_sequence()
    acc = 0
    for m, a in enumerate(cf.quotients, start=1):
        acc += a
        if qs[m] > n_max:
            break
        S = bisect_right(hits, qs[m])
        if S > acc:
            raise InvariantError(
                f"undetermined count {S} at q_{m} = {qs[m]} exceeds quotient sum {acc}"
            )


def _assert_lambda_window_bound(alpha: Fraction, cf: CFExpansion, n_max: int) -> None:
    qs = cf.q_sequence()
    for i in range(1, len(qs) - 1):
        lo, hi = qs[i], min(qs[i + 1] - 1, n_max)
        if lo > n_max:
            break
        contrib = Fraction(0)
        for a, b, U in atom_pieces(alpha, lo, hi + 1, cf=cf, verify=False):
            contrib += U.length * (b - a)
        if contrib > 2 * cf.quotients[i]:
            raise InvariantError(
                f"Lambda contribution {float(contrib):.4f} of [q_{i}, q_{i+1}) "
                f"exceeds 2 a_{i+1} = {2 * cf.quotients[i]}"
            )


# ---------------------------------------------------------------------------
# the index partition and h-windows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JPartition:
    """Consecutive index ranges [start, end) tiling [1, j_max], with the
    second range of each [q_i, q_{i+1}) marked as J_2^i."""

    ranges: tuple[tuple[int, int], ...]
    markers: dict

    def __post_init__(self):
        pos = 1
        for a, b in self.ranges:
            if a != pos or b <= a:
                raise ValueError("ranges must tile [1, j_max] consecutively")
            pos = b


def j_partition(cf: CFExpansion, j_max: int) -> JPartition:
    qs = cf.q_sequence()
    if j_max >= qs[-1]:
        raise HorizonError(f"j_max = {j_max} at or beyond q_K = {qs[-1]}")
    ranges: list[tuple[int, int]] = []
    markers: dict = {}
    for i in range(len(qs) - 1):
        q_i = qs[i]
        q_prev = qs[i - 1] if i >= 1 else 0
        a_next = cf.quotients[i] if i < len(cf.quotients) else 1
        ends = [q_i + q_prev] + [q_prev + b * q_i for b in range(2, a_next + 1)]
        start = q_i
        for end in ends:
            if end > start:
                if start > j_max:
                    break
                ranges.append((start, min(end, j_max + 1)))
                start = end
        if q_i > j_max:
            break
    for i in range(1, len(qs) - 1):
        lo = qs[i] + qs[i - 1]
        hi = 2 * qs[i] + qs[i - 1]
        if hi - 1 <= j_max:
            markers[i] = (lo, hi)
    # clip trailing ranges and drop empties past j_max
    ranges = [(a, b) for a, b in ranges if a <= j_max]
    return JPartition(ranges=tuple(ranges), markers=markers)


def window_sets(
    alpha: Fraction, lo: int, hi: int, cf: Optional[CFExpansion] = None
) -> list[tuple[int, CircleInterval]]:
    """(l, V_l) for l in [lo, hi)."""
    cf = cf or cf_expand(alpha)
    out = []
    for a, b, U in atom_pieces(alpha, lo, hi, cf=cf, verify=False):
        for l in range(a, b):
            out.append((l, U.shift(-l * alpha)))
    return out


def check_disjoint(sets: list[CircleInterval]) -> bool:
    """Exact pairwise disjointness by a sweep over linear segments."""
    segs = []
    for iv in sets:
        segs.extend(iv.segments())
    segs.sort()
    return all(b <= c for (_, b), (c, _) in zip(segs, segs[1:]))


def h_window(
    alpha: Fraction, x: Fraction, i: int, cf: Optional[CFExpansion] = None
) -> int:
    """Indicator sum over the marked range J_2^i; 0 or 1 by disjointness.

    Disjointness makes the sum an indicator; the 0/1 range is asserted,
    not assumed.
    """
    cf = cf or cf_expand(alpha)
    qs = cf.q_sequence()
    if i < 1 or i >= len(qs) - 1:
        raise HorizonError(f"no J_2^{i} within this expansion")
    lo, hi = qs[i] + qs[i - 1], 2 * qs[i] + qs[i - 1]
    if hi - 1 > cf.horizon():
        raise HorizonError(f"J_2^{i} = [{lo},{hi}) beyond horizon {cf.horizon()}")
    count = 0
    for a, b, U in atom_pieces(alpha, lo, hi, cf=cf, verify=False):
        count += len(
            scan.rotation_interval_hits(alpha, Fraction(x) % 1, U.left, U.length, a, b)
        )
    if count > 1:
        raise InvariantError(f"h_{i} = {count} > 1: window sets not disjoint")
    return count


def h_window_mass(alpha: Fraction, i: int, cf: Optional[CFExpansion] = None) -> Fraction:
    """Exact measure of {x : h_i(x) = 1}, verifying disjointness first."""
    cf = cf or cf_expand(alpha)
    qs = cf.q_sequence()
    lo, hi = qs[i] + qs[i - 1], 2 * qs[i] + qs[i - 1]
    sets = [V for _, V in window_sets(alpha, lo, hi, cf=cf)]
    if not check_disjoint(sets):
        raise InvariantError(f"V_l overlap inside J_2^{i}")
    return sum((V.length for V in sets), Fraction(0))


def pointwise_bounds_report(
    alpha: Fraction, x: Fraction, m_max: int, cf: Optional[CFExpansion] = None
) -> list[dict]:
    """Reported chain at n = q_m: quotient sums vs counts vs growth marks.

    The middle inequality (quotient sum >= count) is asserted by
    undetermined_series on every run; the log-cube upper mark and the
    m/2 lower mark hold for typical parameters at scale and are reported
    here, never asserted, since small fixtures may violate them.
    """
    cf = cf or cf_expand(alpha)
    qs = cf.q_sequence()
    m_max = min(m_max, len(cf.quotients))
    while m_max > 0 and qs[m_max] > cf.horizon():
        m_max -= 1
    hits = undetermined_hits(alpha, x, qs[m_max], cf=cf)
    out = []
    acc = 0
    for m in range(1, m_max + 1):
        acc += cf.quotients[m - 1]
        S = bisect_right(hits, qs[m])
        out.append(
            {
                "m": m,
                "q_m": qs[m],
                "quotient_sum": acc,
                "count": S,
                "log_cube_mark": qs[m] and m * math.log(max(m, 2)) ** 3,
                "half_m_mark": m / 2,
            }
        )
    return out


def orbit_count_regularity(
    alpha: Fraction,
    interval: CircleInterval,
    partition: JPartition,
) -> list[tuple[int, int, float]]:
    """Reported (not asserted) regularity of backward-orbit counts.

    For each range J_m, counts the points R^{-l}(0) = -l alpha landing
    in the interval and reports (m, count, lambda(interval) * |J_m|).
    The +-1 bound around the expectation holds at scale but not for
    every small fixture, so callers log deviations instead of failing.
    """
    out = []
    for m, (a, b) in enumerate(partition.ranges, start=1):
        count = 0
        for l in range(a, b):
            if interval.contains((-l * alpha) % 1):
                count += 1
        out.append((m, count, float(interval.length * (b - a))))
    return out


# ---------------------------------------------------------------------------
# spike construction and the no-limit witness
# ---------------------------------------------------------------------------


def spike_alpha(base: CFExpansion, m: int, K: int) -> tuple[CFExpansion, Fraction]:
    """Replace a_m by K (demanding K exceeds the prefix quotient sum) and
    report the achieved excess ratio K / (a_1 + ... + a_{m-1})."""
    if not (1 <= m <= base.depth):
        raise ValueError(f"m = {m} outside 1..{base.depth}")
    prefix = sum(base.quotients[: m - 1])
    if m > 1 and K <= prefix:
        raise ValueError(f"K = {K} does not exceed the prefix quotient sum {prefix}")
    quotients = list(base.quotients)
    quotients[m - 1] = K
    spiked = CFExpansion(tuple(quotients))
    return spiked, Fraction(K, prefix) if prefix else Fraction(K)


@dataclass(frozen=True)
class WitnessReport:
    j0: int
    a_m: int
    window: tuple[int, int]  # inclusive j-range scanned
    x_interval: CircleInterval
    count_max: int
    x_prime_interval: CircleInterval
    count_min: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "j0": self.j0,
                "a_m": self.a_m,
                "window": list(self.window),
                "x_interval": [rat_to_str(self.x_interval.left), rat_to_str(self.x_interval.length)],
                "count_max": self.count_max,
                "x_prime_interval": [
                    rat_to_str(self.x_prime_interval.left),
                    rat_to_str(self.x_prime_interval.length),
                ],
                "count_min": self.count_min,
            }
        )


def window_hit_count(
    alpha: Fraction, x: Fraction, lo: int, hi: int, cf: Optional[CFExpansion] = None
) -> int:
    """#{j in [lo, hi] : R^j x in U_j}, exact."""
    cf = cf or cf_expand(alpha)
    count = 0
    for a, b, U in atom_pieces(alpha, lo, hi + 1, cf=cf, verify=False):
        count += len(
            scan.rotation_interval_hits(alpha, Fraction(x) % 1, U.left, U.length, a, b)
        )
    return count


def _uncovered_in_base(
    alpha: Fraction,
    cf: CFExpansion,
    lo: int,
    hi: int,
    base: CircleInterval,
    skip: set[int],
) -> list[CircleInterval]:
    """Parts of `base` meeting no V_l, l in [lo, hi] outside `skip`; exact.

    All endpoints live on the grid of alpha's denominator, so the sweep
    runs on scaled integers in coordinates shifted by base.left (numpy
    when l * p fits 64 bits, plain integers otherwise).
    """
    import numpy as np

    p, q = alpha.numerator, alpha.denominator
    base_lo = int(base.left * q)
    base_len = int(base.length * q)
    covered: list[tuple[int, int]] = []
    use_np = (hi + 1) * p < 2**62
    for a, b, U in atom_pieces(alpha, lo, hi + 1, cf=cf, verify=False):
        u_num = int(U.left * q)
        len_num = int(U.length * q)
        if use_np:
            ls = np.arange(a, b, dtype=np.int64)
            starts = (u_num - ls * p - base_lo) % q
            mask = (starts < base_len) | (starts + len_num > q)
            cand = [(int(ls[i]), int(starts[i])) for i in np.nonzero(mask)[0].tolist()]
        else:
            cand = []
            for l in range(a, b):
                s = (u_num - l * p - base_lo) % q
                if s < base_len or s + len_num > q:
                    cand.append((l, s))
        for l, s in cand:
            if l in skip:
                continue
            if s < base_len:
                covered.append((s, min(s + len_num, base_len)))
            if s + len_num > q:
                covered.append((0, min(s + len_num - q, base_len)))
    covered.sort()
    free: list[tuple[int, int]] = []
    pos = 0
    for s, e in covered:
        if s > pos:
            free.append((pos, s))
        pos = max(pos, e)
    if pos < base_len:
        free.append((pos, base_len))
    return [
        CircleInterval((base.left + Fraction(s, q)) % 1, Fraction(e - s, q))
        for s, e in free
        if e > s
    ]


def spike_witness(cf: CFExpansion, m: int) -> WitnessReport:
    """Constructive witnesses for the failure of plain ratio convergence.

    Over the index window [q_{m-1}, q_m], the a_m sets V_{j0 + c q_{m-1}}
    (c = 0..a_m - 1, j0 = q_{m-1} + q_{m-2}) have a common intersection;
    points there are undetermined a_m times, while an interval inside
    V_{j0} untouched by every other window set is undetermined exactly
    once.  Both counts are verified by exact window scans, and both
    witnesses are positive-measure intervals on which the count is
    constant.
    """
    alpha = cf.value()
    qs = cf.q_sequence()
    if m < 2 or m >= len(qs):
        raise ValueError(f"need 2 <= m <= {len(qs) - 1}")
    a_m = cf.quotients[m - 1]
    q_prev, q_m = qs[m - 1], qs[m]
    j0 = qs[m - 1] + qs[m - 2]
    lo, hi = q_prev, q_m  # inclusive window [q_{m-1}, q_m]

    family = [j0 + c * q_prev for c in range(a_m)]
    core = [_formula_atom_interval(family[0], alpha, cf).shift(-family[0] * alpha)]
    for l in family[1:]:
        V = _formula_atom_interval(l, alpha, cf).shift(-l * alpha)
        core = [piece for c in core for piece in c.intersection(V)]
        if not core:
            raise InvariantError("the spike family has empty intersection")
    core_iv = max(core, key=lambda c: c.length)

    # shrink to a subinterval meeting no other window set, so the count
    # is constant (= a_m) on the witness interval
    core_free = _uncovered_in_base(alpha, cf, lo, hi, core_iv, skip=set(family))
    candidates = core_free if core_free else [core_iv]
    x_iv = max(candidates, key=lambda c: c.length)
    x_mid = (x_iv.left + x_iv.length / 2) % 1
    count_max = window_hit_count(alpha, x_mid, lo, hi, cf=cf)

    v0 = _formula_atom_interval(j0, alpha, cf).shift(-j0 * alpha)
    free = _uncovered_in_base(alpha, cf, lo, hi, v0, skip={j0})
    if not free:
        raise InvariantError("no point lies in V_j0 alone")
    xp_iv = max(free, key=lambda c: c.length)
    xp_mid = (xp_iv.left + xp_iv.length / 2) % 1
    count_min = window_hit_count(alpha, xp_mid, lo, hi, cf=cf)

    return WitnessReport(
        j0=j0,
        a_m=a_m,
        window=(lo, hi),
        x_interval=x_iv,
        count_max=count_max,
        x_prime_interval=xp_iv,
        count_min=count_min,
    )
