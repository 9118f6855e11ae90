"""Interval exchange transformations with exact rational arithmetic.

An IET exchanges d subintervals of [0,1) by translations.  Rotations are
the d=2 case with the swap permutation.  Orbit iteration is done on
integers over the common denominator of the map data, so denominators
never grow along an orbit.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .numbers import CFExpansion, cf_expand, dist_nearest_int, rat_from_str, rat_to_str


@dataclass(frozen=True)
class CircleInterval:
    """Half-open arc [left, left+length) mod 1; may wrap through 0.

    Measure equals `length` regardless of wrapping.  length == 0 is the
    empty arc, length == 1 the full circle.
    """

    left: Fraction
    length: Fraction

    def __post_init__(self):
        if not (0 <= self.left < 1):
            raise ValueError(f"left endpoint {self.left} outside [0,1)")
        if not (0 <= self.length <= 1):
            raise ValueError(f"length {self.length} outside [0,1]")

    @property
    def measure(self) -> Fraction:
        return self.length

    @property
    def right(self) -> Fraction:
        """Endpoint left+length mod 1 (equals left for the full circle)."""
        return (self.left + self.length) % 1

    def wraps(self) -> bool:
        return self.left + self.length > 1

    def segments(self) -> list[tuple[Fraction, Fraction]]:
        """Decompose into non-wrapping half-open pieces [(a,b)] with b <= 1."""
        if self.length == 0:
            return []
        if self.length == 1:
            return [(Fraction(0), Fraction(1))]
        r = self.left + self.length
        if r <= 1:
            return [(self.left, r)]
        return [(self.left, Fraction(1)), (Fraction(0), r - 1)]

    def contains(self, x: Fraction) -> bool:
        x = x % 1
        return any(a <= x < b for a, b in self.segments())

    def shift(self, delta: Fraction) -> "CircleInterval":
        return CircleInterval((self.left + delta) % 1, self.length)

    def intersection(self, other: "CircleInterval") -> list["CircleInterval"]:
        """Exact intersection as a list of (up to two) disjoint arcs."""
        out = []
        for a, b in self.segments():
            for c, d in other.segments():
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    out.append(CircleInterval(lo % 1, hi - lo))
        return out

    def intersection_measure(self, other: "CircleInterval") -> Fraction:
        return sum((p.length for p in self.intersection(other)), Fraction(0))

    def intersects(self, other: "CircleInterval") -> bool:
        return any(
            max(a, c) < min(b, d)
            for a, b in self.segments()
            for c, d in other.segments()
        )

    def to_str(self) -> str:
        return f"[{rat_to_str(self.left)},+{rat_to_str(self.length)})"


class IET:
    """d-interval exchange: lengths l_1..l_d summing to 1, permutation pi.

    pi is stored 1-indexed: interval j lands in slot pi[j-1] of the image.
    A point x in I_j maps to x - sum(l_k, k<j) + sum(l_k', pi(k') < pi(j)).
    """

    def __init__(self, lengths, permutation):
        lengths = tuple(Fraction(l) for l in lengths)
        permutation = tuple(int(p) for p in permutation)
        d = len(lengths)
        if d == 0:
            raise ValueError("need at least one interval")
        if any(l <= 0 for l in lengths):
            raise ValueError("all lengths must be positive")
        if sum(lengths) != 1:
            raise ValueError(f"lengths must sum to 1, got {sum(lengths)}")
        if sorted(permutation) != list(range(1, d + 1)):
            raise ValueError(f"permutation {permutation} is not a bijection of 1..{d}")
        self.lengths = lengths
        self.permutation = permutation
        self.d = d

        # domain left endpoints
        lefts = [Fraction(0)]
        for l in lengths[:-1]:
            lefts.append(lefts[-1] + l)
        self.dom_left = tuple(lefts)
        # image left endpoints, ordered by slot
        inv = [0] * d  # inv[slot-1] = source interval index (0-based)
        for j, slot in enumerate(permutation):
            inv[slot - 1] = j
        img_left_by_slot = [Fraction(0)]
        for s in range(d - 1):
            img_left_by_slot.append(img_left_by_slot[-1] + lengths[inv[s]])
        self.image_left = tuple(img_left_by_slot[permutation[j] - 1] for j in range(d))
        self.offsets = tuple(self.image_left[j] - self.dom_left[j] for j in range(d))

        # scaled-integer view over the common denominator
        self.den = lcm(*[l.denominator for l in lengths])
        self._dom_left_s = tuple(int(p * self.den) for p in self.dom_left)
        self._off_s = tuple(int(o * self.den) for o in self.offsets)
        self._inv = None

    # -- basic queries ---------------------------------------------------

    def is_rotation(self) -> bool:
        return self.d == 2 and self.permutation == (2, 1)

    @property
    def rotation_angle(self) -> Fraction:
        if not self.is_rotation():
            raise ValueError("not a rotation")
        return self.lengths[1]

    def discontinuities(self) -> tuple[Fraction, ...]:
        """Interior breakpoints sum(l_i, i<=r) for r = 1..d-1."""
        return self.dom_left[1:]

    def cell_index(self, x: Fraction) -> int:
        """0-based index j with x in I_{j+1}."""
        x = x % 1
        return bisect_right(self.dom_left, x) - 1

    def inverse(self) -> "IET":
        if self._inv is None:
            d = self.d
            inv_sources = [0] * d
            for j, slot in enumerate(self.permutation):
                inv_sources[slot - 1] = j
            inv_lengths = tuple(self.lengths[inv_sources[s]] for s in range(d))
            inv_perm = tuple(inv_sources[s] + 1 for s in range(d))
            self._inv = IET(inv_lengths, inv_perm)
        return self._inv

    # -- scaled-integer orbit kernel -------------------------------------

    def step_scaled(self, u: int, den: int) -> int:
        """One forward step on a numerator u over denominator den.

        den must be a multiple of self.den; the result stays on the same
        grid, so long orbits never grow coefficients.
        """
        scale = den // self.den
        cell = bisect_right(self._dom_left_s, u // scale) - 1
        return u + self._off_s[cell] * scale

    def apply1(self, x: Fraction) -> Fraction:
        return x + self.offsets[self.cell_index(x)]

    def to_json(self) -> str:
        return json.dumps(
            {
                "lengths": [rat_to_str(l) for l in self.lengths],
                "permutation": list(self.permutation),
            }
        )

    @classmethod
    def from_json(cls, s: str) -> "IET":
        rec = json.loads(s)
        return cls([rat_from_str(t) for t in rec["lengths"]], rec["permutation"])

    def __repr__(self):
        ls = ",".join(rat_to_str(l) for l in self.lengths)
        return f"IET([{ls}], {list(self.permutation)})"


def make_iet(lengths, permutation) -> IET:
    return IET(lengths, permutation)


def rotation_iet(alpha: Fraction) -> IET:
    """The rotation x -> x + alpha mod 1 as a 2-interval exchange."""
    alpha = Fraction(alpha)
    if not (0 < alpha < 1):
        raise ValueError(f"rotation angle must lie in (0,1), got {alpha}")
    return IET((1 - alpha, alpha), (2, 1))


def rotation_from_cf(cf: CFExpansion) -> IET:
    return rotation_iet(cf.value())


def apply(T: IET, x: Fraction, k: int = 1) -> Fraction:
    """T^k(x) for any signed k, exact."""
    x = Fraction(x) % 1
    if k == 0:
        return x
    if T.is_rotation():
        return (x + k * T.rotation_angle) % 1
    den = lcm(T.den, x.denominator)
    u = int(x * den)
    if k > 0:
        for _ in range(k):
            u = T.step_scaled(u, den)
    else:
        Tinv = T.inverse()
        den = lcm(den, Tinv.den)
        u = int(x * den)
        for _ in range(-k):
            u = Tinv.step_scaled(u, den)
    return Fraction(u, den)


def orbit_hits(T: IET, x: Fraction, J: CircleInterval, n: int, start: int = 1) -> list[int]:
    """Times k in [start, n] with T^k(x) in J, by direct exact iteration.

    Plain reference scan on the scaled-integer grid; for long rotation
    orbits prefer the vectorized kernel in `scan`.
    """
    den = lcm(T.den, x.denominator, J.left.denominator, J.length.denominator)
    u = int((x % 1) * den)
    segs = [(int(a * den), int(b * den)) for a, b in J.segments()]
    hits = []
    for k in range(1, n + 1):
        u = T.step_scaled(u, den)
        if k >= start and any(a <= u < b for a, b in segs):
            hits.append(k)
    return hits


def discontinuity_set(T: IET, n: int) -> list[Fraction]:
    """Union of T^{-k}(D u {0}) for k = 0..n-1, sorted ascending.

    D is the set of interior breakpoints of T; 0 is always included, so
    the points cut [0,1) into the length-n cylinder intervals of T.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if T.is_rotation():
        # T^{-k}{0, 1-alpha} over k<n collapses to {-k*alpha : 0 <= k <= n}
        a = T.rotation_angle
        num, den = a.numerator, a.denominator
        pts = {(-k * num) % den for k in range(n + 1)}
        return [Fraction(u, den) for u in sorted(pts)]
    den = T.den
    base = [0] + list(T._dom_left_s[1:])
    Tinv = T.inverse()
    pts = set(base)
    frontier = list(base)
    for _ in range(n - 1):
        frontier = [Tinv.step_scaled(u, den) for u in frontier]
        pts.update(frontier)
    return [Fraction(u, den) for u in sorted(pts)]


def _min_circular_gap(points: list[Fraction]) -> Fraction:
    if len(points) < 2:
        return Fraction(1)
    best = min(b - a for a, b in zip(points, points[1:]))
    wrap = points[0] + 1 - points[-1]
    return min(best, wrap)


def e_T(T: IET, n: int) -> Fraction:
    """Minimum circular gap between the order-n discontinuity points.

    Defined as 0 when two generator orbits have merged by level n.  A
    non-degenerate cut has exactly d + (n-1)(d-1) distinct points (each
    level adds the d-1 preimages of the breakpoints; the preimage chain
    of 0 structurally rides a breakpoint chain), so a smaller count
    certifies a merge.  Rotations take the fast path <<q_k alpha>> for
    the largest convergent denominator q_k <= n, which agrees with the
    enumeration including the degenerate case.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if T.is_rotation():
        alpha = T.rotation_angle
        cf = _rotation_cf(T)
        qs = cf.q_sequence()
        k = bisect_right(qs, n) - 1
        if k < 0:  # q_0 = 1 <= n always; defensive
            return _min_circular_gap(discontinuity_set(T, n))
        return dist_nearest_int(qs[k], alpha)
    pts = discontinuity_set(T, n)
    if len(pts) < T.d + (n - 1) * (T.d - 1):
        return Fraction(0)
    return _min_circular_gap(pts)


def _rotation_cf(T: IET) -> CFExpansion:
    cf = getattr(T, "_cf_cache", None)
    if cf is None:
        cf = cf_expand(T.rotation_angle)
        T._cf_cache = cf
    return cf


def keane_check(T: IET, depth: int) -> bool:
    """True iff no forward orbit of D u {0} lands on a breakpoint in <= depth steps.

    D is the set of interior breakpoints.  Landing on a breakpoint forces
    two discontinuity orbits of the cut to merge (a rational period or a
    reducible map); the chain T(x) = 0 that every permutation produces is
    not a collision.  Exact comparison on the scaled grid.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    den = T.den
    breaks = set(T._dom_left_s[1:])
    frontier = [0] + list(T._dom_left_s[1:])
    for _ in range(depth):
        frontier = [T.step_scaled(u, den) for u in frontier]
        if any(u in breaks for u in frontier):
            return False
    return True


def preimage_interval(T: IET, J: CircleInterval) -> list[CircleInterval]:
    """T^{-1}(J) as a list of <= d disjoint arcs of total measure |J|."""
    Tinv = T.inverse()
    out = []
    for a, b in J.segments():
        # split [a,b) at image-cell boundaries of T (= domain cells of Tinv)
        cuts = sorted({a, b, *(c for c in Tinv.dom_left if a < c < b)})
        for lo, hi in zip(cuts, cuts[1:]):
            off = Tinv.offsets[Tinv.cell_index(lo)]
            out.append(CircleInterval((lo + off) % 1, hi - lo))
    return out


def min_block_measure(T: IET, n: int) -> Fraction:
    """Measure of the smallest length-n cylinder interval.

    Exposed separately from e_T because the two notions are stated
    differently in places; on the cylinder cut they coincide.
    """
    return _min_circular_gap(discontinuity_set(T, n))


def iet_horizon(T: IET) -> int:
    """Orbit-length validity horizon: half the common-denominator period."""
    return (T.den - 1) // 2
