"""Long-orbit membership scans for rotations.

Floating point is used only as a prefilter: each chunk recomputes its
base point exactly, positions are advanced as fl(base + k*alpha) with
k < 2^20, and every index whose float position lands within MARGIN of a
decision boundary (or inside the target) is re-tested with exact rational
arithmetic.  The float error per chunk is bounded by

    |v_f - v| <= (2k + 6) * 2^-52 < 2^-30   for k < 2^20,

(one representation error each for base and alpha, one rounding for the
product and one for the sum, all below 2^-52 per unit of k), so
MARGIN = 1e-8 over-covers it by more than an order of magnitude.  fmod
is exact, and a true position near 0 can only surface near 1 (or vice
versa), which the two-sided candidate bands absorb.  No hit is ever
reported without exact confirmation.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

import numpy as np

CHUNK = 1 << 20
MARGIN = 1e-8


def _exact_pos(alpha: Fraction, x0: Fraction, i: int) -> Fraction:
    return (x0 + i * alpha) % 1


def rotation_interval_hits(
    alpha: Fraction,
    x: Fraction,
    left: Fraction,
    length: Fraction,
    lo: int,
    hi: int,
) -> list[int]:
    """Times i in [lo, hi) with x + i*alpha mod 1 in [left, left+length) mod 1."""
    if hi <= lo or length == 0:
        return []
    if length == 1:
        return list(range(lo, hi))
    af = float(alpha)
    lenf = float(length)
    shifted = x - left  # w = (x - left + i*alpha) mod 1, hit iff w < length
    hits: list[int] = []
    for c0 in range(lo, hi, CHUNK):
        c1 = min(c0 + CHUNK, hi)
        base = _exact_pos(alpha, shifted, c0)
        bf = float(base)
        k = np.arange(c1 - c0, dtype=np.float64)
        w = np.mod(bf + k * af, 1.0)
        cand = np.nonzero((w < lenf + MARGIN) | (w >= 1.0 - MARGIN))[0]
        for c in cand.tolist():
            i = c0 + c
            if _exact_pos(alpha, shifted, i) < length:
                hits.append(i)
    return hits


def rotation_ball_hits(
    alpha: Fraction,
    x: Fraction,
    y: Fraction,
    r_floats: Callable[[np.ndarray], np.ndarray],
    r_exact: Callable[[int], Fraction],
    lo: int,
    hi: int,
    sat_until: int = 0,
) -> list[int]:
    """Times i in [lo, hi) with x + i*alpha mod 1 in B(y, r_i).

    B(y, r) is the half-open arc [y-r, y+r), the full circle when
    r >= 1/2.  Indices i <= sat_until are taken as unconditional hits
    (caller guarantees 2 r_i >= 1 there); r_floats must be accurate to
    1e-9 absolute on the remaining indices.
    """
    if hi <= lo:
        return []
    hits = list(range(lo, min(hi, sat_until + 1)))
    lo = max(lo, sat_until + 1)
    if hi <= lo:
        return hits
    af = float(alpha)
    shifted = x - y  # v = (x - y + i*alpha) mod 1, hit iff v < r_i or v >= 1 - r_i
    for c0 in range(lo, hi, CHUNK):
        c1 = min(c0 + CHUNK, hi)
        base = _exact_pos(alpha, shifted, c0)
        bf = float(base)
        k = np.arange(c1 - c0, dtype=np.float64)
        v = np.mod(bf + k * af, 1.0)
        rf = r_floats(np.arange(c0, c1, dtype=np.float64))
        cand = np.nonzero((v < rf + MARGIN) | (v >= 1.0 - rf - MARGIN))[0]
        for c in cand.tolist():
            i = c0 + c
            r = r_exact(i)
            if 2 * r >= 1:
                hits.append(i)
                continue
            ve = _exact_pos(alpha, shifted, i)
            if ve < r or ve >= 1 - r:
                hits.append(i)
    return hits


def counts_at(hits: list[int], checkpoints: list[int]) -> list[int]:
    """Number of hits <= N for each checkpoint N (hits sorted ascending)."""
    arr = np.asarray(hits, dtype=np.int64)
    return [int(np.searchsorted(arr, n, side="right")) for n in checkpoints]
