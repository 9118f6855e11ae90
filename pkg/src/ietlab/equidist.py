"""Two-orbit block-frequency discrepancy and its decay across scales.

The discrepancy between two orbits against a fixed cylinder interval is
an exact rational; the decay profile tracks it along a scale sequence
with consecutive ratios > 2 and fits a log-linear slope (the only
floating-point quantity, used for sign and trend conclusions).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import scan
from .coding import allowed_blocks
from .errors import HorizonError
from .iet import IET, CircleInterval, iet_horizon, orbit_hits
from .numbers import rat_to_str
from .targets import ScaleSequence, select_scales


def block_discrepancy(
    T: IET, J: CircleInterval, x: Fraction, x_prime: Fraction, N: int
) -> Fraction:
    """(1/N) |#{j <= N : T^j x in J} - #{j <= N : T^j x' in J}|, exact."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > iet_horizon(T):
        raise HorizonError(f"N = {N} beyond horizon {iet_horizon(T)}")
    counts = []
    for pt in (x, x_prime):
        if T.is_rotation():
            hits = scan.rotation_interval_hits(
                T.rotation_angle, Fraction(pt) % 1, J.left, J.length, 1, N + 1
            )
        else:
            hits = orbit_hits(T, pt, J, N)
        counts.append(len(hits))
    return Fraction(abs(counts[0] - counts[1]), N)


@dataclass(frozen=True)
class DecayProfile:
    """Discrepancy levels (L, horizon n_{i+L}, value) and a fitted slope.

    fitted_slope is the least-squares slope of log(discrepancy) against L
    over the levels with nonzero discrepancy; NaN when fewer than two
    such levels exist.
    """

    levels: tuple[tuple[int, int, Fraction], ...]
    fitted_slope: float
    block: CircleInterval

    def to_csv(self) -> str:
        lines = ["L;horizon;disc_num;disc_den;disc_float"]
        for L, horizon, disc in self.levels:
            lines.append(
                f"{L};{horizon};{disc.numerator};{disc.denominator};{float(disc)!r}"
            )
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "fitted_slope": self.fitted_slope,
            "block_left": rat_to_str(self.block.left),
            "block_length": rat_to_str(self.block.length),
            "levels": [
                {"L": L, "horizon": h, "disc": f"{d.numerator}/{d.denominator}"}
                for L, h, d in self.levels
            ],
        }


def thin_scales(scales: ScaleSequence) -> ScaleSequence:
    """Drop scales until consecutive ratios are >= 4 (strictly above 2).

    Dyadic selection emits ratio-2 steps which violate the >2 growth
    hypothesis; keeping every other qualifying scale restores it
    deterministically.
    """
    kept: list[int] = []
    for n in scales.scales:
        if not kept or n >= 4 * kept[-1]:
            kept.append(n)
    return ScaleSequence(xi=scales.xi, scales=tuple(kept))


def decay_profile(
    T: IET,
    xi: Fraction,
    base_index: int,
    x: Fraction,
    x_prime: Fraction,
    L_max: int,
    block_index: Optional[int] = None,
) -> DecayProfile:
    """Discrepancy at horizons n_{i+L}, L = 0..L_max, i = base_index (1-based).

    J defaults to the minimum-measure block of length n_i (worst case
    for equidistribution); block_index selects another entry of the
    block table instead.
    """
    if base_index < 1 or L_max < 0:
        raise ValueError("need base_index >= 1 and L_max >= 0")
    horizon = iet_horizon(T)
    need = base_index + L_max
    # grow the candidate range only until enough thinned scales exist;
    # scanning to the horizon would enumerate huge cut sets on general
    # exchanges
    n_max = 1 << (2 * need + 2)
    while True:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            scales = thin_scales(select_scales(T, xi, n_max=min(n_max, horizon)))
        if len(scales.scales) >= need or n_max >= horizon:
            break
        n_max *= 4
    if len(scales.scales) < need:
        raise ValueError(
            f"scale sequence too short: need {need} thinned scales, have {len(scales.scales)}"
        )
    n_i = scales.scales[base_index - 1]
    table = allowed_blocks(T, n_i)
    if block_index is None:
        _, J = table.min_entry()
    else:
        _, J = table.entries[block_index]
    levels = []
    for L in range(L_max + 1):
        N = scales.scales[base_index - 1 + L]
        levels.append((L, N, block_discrepancy(T, J, x, x_prime, N)))
    pts = [(L, math.log(float(d))) for L, _, d in levels if d > 0]
    if len(pts) >= 2:
        mean_l = sum(p[0] for p in pts) / len(pts)
        mean_y = sum(p[1] for p in pts) / len(pts)
        var = sum((l - mean_l) ** 2 for l, _ in pts)
        slope = sum((l - mean_l) * (y_ - mean_y) for l, y_ in pts) / var
    else:
        slope = float("nan")
    return DecayProfile(levels=tuple(levels), fitted_slope=slope, block=J)


def disjoint_occurrences(T: IET, n_i: int, n_target: int) -> int:
    """Greedy count of disjoint occurrences of the minimum n_i-block word
    inside the coding of the minimum n_target-block.

    Existence (count >= 1) is checkable; the quantitative proportion is
    reported by callers, never asserted, since its constant is
    existential.
    """
    from .coding import code_word

    table = allowed_blocks(T, n_i)
    word, _ = table.min_entry()
    _, big = allowed_blocks(T, n_target).min_entry()
    mid = big.left + big.length / 2
    text = code_word(T, mid, n_target)
    count = 0
    pos = 0
    while pos + n_i <= len(text):
        if text[pos : pos + n_i] == word:
            count += 1
            pos += n_i
        else:
            pos += 1
    return count
