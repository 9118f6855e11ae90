"""Symbolic coding: words, allowed blocks, and Rokhlin tower partitions.

Blocks are indexed by their interval on [0,1): components of the order-n
cut are kept separate even when they carry equal words, and words are
merged only when counting distinct blocks.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateError
from .iet import IET, CircleInterval, discontinuity_set, e_T
from .numbers import rat_to_str

Word = tuple[int, ...]


def code_word(T: IET, x: Fraction, n: int) -> Word:
    """Letters 1..d of the first n orbit cells: letter i is j with T^i(x) in I_j."""
    if n < 1:
        raise ValueError("n must be >= 1")
    from math import lcm

    den = lcm(T.den, Fraction(x).denominator)
    u = int((Fraction(x) % 1) * den)
    scale = den // T.den
    letters = []
    for _ in range(n):
        cell = bisect_right(T._dom_left_s, u // scale) - 1
        letters.append(cell + 1)
        u = u + T._off_s[cell] * scale
    return tuple(letters)


@dataclass(frozen=True)
class BlockTable:
    """Allowed n-blocks with their interval preimages.

    entries are (word, interval) sorted by interval left endpoint; the
    intervals tile [0,1) exactly and eps_n is the smallest measure.
    """

    n: int
    entries: tuple[tuple[Word, CircleInterval], ...]
    eps_n: Fraction

    def words(self) -> list[Word]:
        return [w for w, _ in self.entries]

    def distinct_word_count(self) -> int:
        return len(set(self.words()))

    def min_entry(self) -> tuple[Word, CircleInterval]:
        """Entry of least measure, leftmost on ties."""
        return min(self.entries, key=lambda e: (e[1].length, e[1].left))

    def to_csv(self) -> str:
        lines = ["word;left;length"]
        for w, iv in self.entries:
            lines.append(
                f"{','.join(map(str, w))};{rat_to_str(iv.left)};{rat_to_str(iv.length)}"
            )
        return "\n".join(lines) + "\n"


def allowed_blocks(T: IET, n: int) -> BlockTable:
    """One entry per component of the order-n cut, coded at its midpoint."""
    pts = discontinuity_set(T, n)
    entries = []
    eps = Fraction(1)
    for i, left in enumerate(pts):
        right = pts[i + 1] if i + 1 < len(pts) else Fraction(1)
        length = right - left
        if length == 0:
            raise DegenerateError(f"coincident cut points at order {n}")
        mid = left + length / 2
        entries.append((code_word(T, mid, n), CircleInterval(left, length)))
        eps = min(eps, length)
    return BlockTable(n=n, entries=tuple(entries), eps_n=eps)


def block_counts(T: IET, l_max: int) -> list[int]:
    """|B_l| for l = 1..l_max: distinct allowed words of each length.

    Incremental cylinder refinement: each level inserts the new cut
    points T^{-l}(D u {0}), children inherit their parent's word class
    extended by one letter, and the orbit tip of each child is obtained
    by translation within the parent (T^{l-1} is continuous there), so
    the total work is one map application per component per level.
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    den2 = 2 * T.den  # even grid: cut points even, midpoints stay integral
    breaks = [0] + [2 * v for v in T._dom_left_s[1:]]
    Tinv = T.inverse()

    # components as parallel arrays, sorted by left endpoint
    cuts = sorted(breaks)
    reps, tips, cls = [], [], []
    for idx, left in enumerate(cuts):
        right = cuts[idx + 1] if idx + 1 < len(cuts) else den2
        reps.append((left + right) // 2)
        tips.append((left + right) // 2)  # T^0(rep)
        cls.append(idx)  # level-1 words are the single letters, all distinct
    counts = [len(set(cls))]

    frontier = list(breaks)
    for _ in range(1, l_max):
        frontier = [Tinv.step_scaled(u, den2) for u in frontier]
        new_pts = sorted(set(frontier) - set(cuts))
        merged = sorted(cuts + new_pts)
        n_cuts, n_reps, n_tips, n_parent = [], [], [], []
        j = 0
        for idx, left in enumerate(merged):
            right = merged[idx + 1] if idx + 1 < len(merged) else den2
            while j + 1 < len(cuts) and cuts[j + 1] <= left:
                j += 1
            mid = (left + right) // 2
            n_cuts.append(left)
            n_reps.append(mid)
            n_tips.append(tips[j] + (mid - reps[j]))
            n_parent.append(j)
        # advance every tip one step and refine classes
        class_ids: dict[tuple[int, int], int] = {}
        n_cls = []
        for idx in range(len(n_cuts)):
            tip = T.step_scaled(n_tips[idx], den2)
            n_tips[idx] = tip
            letter = bisect_right(T._dom_left_s, tip // 2) - 1
            key = (cls[n_parent[idx]], letter)
            n_cls.append(class_ids.setdefault(key, len(class_ids)))
        cuts, reps, tips, cls = n_cuts, n_reps, n_tips, n_cls
        counts.append(len(class_ids))
    return counts


def eps_series(T: IET, l_max: int) -> list[Fraction]:
    """Smallest block measure for l = 1..l_max (non-increasing)."""
    out = []
    pts = None
    for l in range(1, l_max + 1):
        pts = discontinuity_set(T, l)
        gaps = [b - a for a, b in zip(pts, pts[1:])] + [pts[0] + 1 - pts[-1]]
        out.append(min(gaps))
    return out


def letter_frequency_range(T: IET, B, n: int):
    """(m_n, M_n): exact min/max over allowed n-blocks of the in-B letter share."""
    B = set(B)
    alphabet = set(range(1, T.d + 1))
    if not B:
        return (Fraction(0), Fraction(0))
    if B >= alphabet:
        return (Fraction(1), Fraction(1))
    freqs = [
        Fraction(sum(1 for a in w if a in B), n)
        for w in set(allowed_blocks(T, n).words())
    ]
    return (min(freqs), max(freqs))


# ---------------------------------------------------------------------------
# Rokhlin towers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tower:
    """A base interval and its first `height` disjoint continuous iterates."""

    base: CircleInterval
    height: int
    level_lefts: tuple[Fraction, ...]

    def levels(self) -> list[CircleInterval]:
        return [CircleInterval(l, self.base.length) for l in self.level_lefts]

    def to_csv_row(self) -> str:
        return f"{rat_to_str(self.base.left)};{rat_to_str(self.base.length)};{self.height}"


def towers_to_csv(towers: list[Tower]) -> str:
    return "base_left;base_length;height\n" + "".join(
        t.to_csv_row() + "\n" for t in towers
    )


class _Cover:
    """Sorted disjoint half-open integer segments with overlap queries."""

    def __init__(self):
        self.starts: list[int] = []
        self.ends: list[int] = []

    def add(self, a: int, b: int):
        i = bisect_left(self.starts, a)
        self.starts.insert(i, a)
        self.ends.insert(i, b)

    def partition(self, a: int, b: int) -> list[tuple[int, int, bool]]:
        """Split [a,b) into maximal pieces tagged covered=True/False."""
        out = []
        pos = a
        i = bisect_right(self.starts, a) - 1
        if i >= 0 and self.ends[i] > a:
            nxt = min(self.ends[i], b)
            out.append((pos, nxt, True))
            pos = nxt
            i += 1
        else:
            i += 1
        while pos < b and i < len(self.starts) and self.starts[i] < b:
            s, e = self.starts[i], self.ends[i]
            if s > pos:
                out.append((pos, s, False))
                pos = s
            nxt = min(e, b)
            out.append((pos, nxt, True))
            pos = nxt
            i += 1
        if pos < b:
            out.append((pos, b, False))
        return out


class _TowerState:
    __slots__ = ("levels", "length", "active")

    def __init__(self, levels, length):
        self.levels = levels
        self.length = length
        self.active = True


def _merge_aligned(towers: list["_TowerState"]) -> list["_TowerState"]:
    """Glue towers whose columns are side-by-side at every level.

    If two towers have equal height and every level of the second starts
    exactly where the corresponding level of the first ends, the union of
    the columns is again a tower (the translations agree along the seam).
    Collision splitting can manufacture such pairs; gluing undoes the
    fragmentation deterministically.
    """
    towers = sorted(towers, key=lambda t: t.levels[0])
    merged = True
    while merged:
        merged = False
        for i, a in enumerate(towers):
            for j, b in enumerate(towers):
                if i == j or len(a.levels) != len(b.levels):
                    continue
                if all(bl == al + a.length for al, bl in zip(a.levels, b.levels)):
                    a.length += b.length
                    del towers[j]
                    merged = True
                    break
            if merged:
                break
    return towers


def _chop_tall(towers: list["_TowerState"], n: int) -> list["_TowerState"]:
    """Cut towers of height > 2n into stacked pieces with heights in [n, 2n].

    A column of height h >= n always splits into k = ceil(h/2n) pieces of
    near-equal heights, each within [n, 2n]; every piece is again a tower
    (its levels are consecutive levels of the original).
    """
    out = []
    for t in towers:
        h = len(t.levels)
        k = (h + 2 * n - 1) // (2 * n)
        if k <= 1:
            out.append(t)
            continue
        pos = 0
        for i in range(k):
            size = h // k + (1 if i < h % k else 0)
            out.append(_TowerState(t.levels[pos : pos + size], t.length))
            pos += size
    return out


def _greedy_towers(T: IET, n: int, order: str, max_steps: int):
    den = T.den
    total = den
    pts = [int(p * den) for p in discontinuity_set(T, n)]
    comps = []
    for i, left in enumerate(pts):
        right = pts[i + 1] if i + 1 < len(pts) else total
        comps.append((left, right))
    if order == "length_desc":
        comps.sort(key=lambda c: (-(c[1] - c[0]), c[0]))
    elif order == "length_asc":
        comps.sort(key=lambda c: (c[1] - c[0], c[0]))
    elif order != "left_asc":
        raise ValueError(f"unknown seeding order {order!r}")

    cover = _Cover()
    towers: list[_TowerState] = []

    def levels_of(left: int, count: int) -> list[int]:
        out = [left]
        for _ in range(count - 1):
            out.append(T.step_scaled(out[-1], den))
        return out

    # maximal collection of disjoint n-level towers on cylinder intervals
    for left, right in comps:
        length = right - left
        lvls = levels_of(left, n)
        spans = sorted((l, l + length) for l in lvls)
        if any(b > a2 for (_, b), (a2, _) in zip(spans, spans[1:])):
            continue  # the column returns to itself before n steps
        if any(cover.partition(a, b) != [(a, b, False)] for a, b in spans):
            continue
        for a, b in spans:
            cover.add(a, b)
        towers.append(_TowerState(lvls, length))

    if not towers:
        return None

    breaks = list(T._dom_left_s[1:])

    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            return None
        best = None
        for t in towers:
            if t.active and (best is None or t.levels[-1] < best.levels[-1]):
                best = t
        if best is None:
            break
        top = best.levels[-1]
        length = best.length
        inner = [b for b in breaks if top < b < top + length]
        if inner:
            # map discontinuity splits break every level at the same offset
            off = inner[0] - top
            left_t = _TowerState([l for l in best.levels], off)
            right_t = _TowerState([l + off for l in best.levels], length - off)
            towers.remove(best)
            towers.extend([left_t, right_t])
            continue
        cell = bisect_right(T._dom_left_s, top) - 1
        img = top + T._off_s[cell]
        pieces = cover.partition(img, img + length)
        if len(pieces) == 1:
            a, b, covered = pieces[0]
            if covered:
                best.active = False
            else:
                best.levels.append(img)
                cover.add(a, b)
            continue
        towers.remove(best)
        for a, b, covered in pieces:
            off = a - img
            child = _TowerState([l + off for l in best.levels], b - a)
            if covered:
                child.active = False
            else:
                child.levels.append(a)
                cover.add(a, b)
            towers.append(child)

    return [
        Tower(
            base=CircleInterval(Fraction(t.levels[0], den), Fraction(t.length, den)),
            height=len(t.levels),
            level_lefts=tuple(Fraction(l, den) for l in t.levels),
        )
        for t in _chop_tall(_merge_aligned(towers), n)
    ]


def towers_partition_ok(T: IET, towers: list[Tower]) -> bool:
    """Exact check that all levels tile [0,1)."""
    segs = []
    for t in towers:
        for lvl in t.levels():
            segs.extend(lvl.segments())
    segs.sort()
    pos = Fraction(0)
    for a, b in segs:
        if a != pos:
            return False
        pos = b
    return pos == 1


def build_towers(T: IET, n: int) -> list[Tower]:
    """Partition [0,1) into Rokhlin towers of heights in [n, 2n].

    Greedy construction: seed a maximal disjoint family of n-level towers
    with cylinder-interval bases, then repeatedly extend the tower whose
    top has the smallest left endpoint, splitting columns at map
    discontinuities and at partial collisions with already-covered space.
    The seeding order is tried in a fixed sequence of strategies; the
    first one whose result passes the exact partition and height checks
    wins, so output is deterministic.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if e_T(T, 2 * n) == 0:
        raise DegenerateError(f"e_T({2 * n}) = 0: tower construction degenerates")
    max_steps = 64 * (2 * n * (T.d - 1) + 2) + 512
    fallback = None
    for order in ("length_desc", "left_asc", "length_asc"):
        towers = _greedy_towers(T, n, order, max_steps)
        if towers is None:
            continue
        if not towers_partition_ok(T, towers):
            continue
        heights_ok = all(n <= t.height <= 2 * n for t in towers)
        count_ok = len(towers) <= 3 * T.d
        if heights_ok and count_ok:
            return towers
        if heights_ok and fallback is None:
            fallback = towers
    if fallback is not None:
        return fallback  # valid partition, count bound exceeded: caller may report
    raise DegenerateError(
        f"no seeding strategy produced a tower partition for n = {n}"
    )
