from fractions import Fraction

import pytest

from conftest import random_point
from ietlab.errors import DegenerateError
from ietlab.coding import (
    allowed_blocks,
    block_counts,
    build_towers,
    code_word,
    eps_series,
    letter_frequency_range,
    towers_partition_ok,
    towers_to_csv,
)
from ietlab.iet import make_iet, rotation_iet


def test_code_word_examples():
    ident = make_iet([Fraction(1, 2)] * 2, (1, 2))
    assert code_word(ident, Fraction(1, 4), 3) == (1, 1, 1)
    T = rotation_iet(Fraction(13, 21))
    assert code_word(T, Fraction(0), 5) == (1, 2, 1, 2, 2)
    assert code_word(T, Fraction(0), 1) == (1,)


def test_allowed_blocks_n1_gives_cells(keane_4iet):
    table = allowed_blocks(keane_4iet, 1)
    assert [w for w, _ in table.entries] == [(1,), (2,), (3,), (4,)]
    assert [iv.left for _, iv in table.entries] == list(keane_4iet.dom_left)


def test_allowed_blocks_13_21_n2():
    table = allowed_blocks(rotation_iet(Fraction(13, 21)), 2)
    assert len(table.entries) == 3
    assert [iv.left for _, iv in table.entries] == [0, Fraction(8, 21), Fraction(16, 21)]
    assert table.words() == [(1, 2), (2, 1), (2, 2)]
    assert table.eps_n == Fraction(5, 21)


def test_blocks_tile_and_words_realized(rng, golden40, keane_4iet):
    for T in (golden40, keane_4iet):
        table = allowed_blocks(T, 6)
        assert sum(iv.length for _, iv in table.entries) == 1
        words = set(table.words())
        for _ in range(20):
            assert code_word(T, random_point(rng), 6) in words


def test_eps_series_non_increasing(golden40, keane_4iet):
    for T in (golden40, keane_4iet):
        eps = eps_series(T, 25)
        assert all(a >= b for a, b in zip(eps, eps[1:]))
        assert eps[7] == allowed_blocks(T, 8).eps_n


def test_block_count_growth(golden40, keane_4iet):
    for T in (golden40, keane_4iet):
        counts = block_counts(T, 60)
        assert counts[0] == T.d
        assert all(b <= a + T.d - 1 for a, b in zip(counts, counts[1:]))
        # the incremental count agrees with the one-shot table
        for n in (3, 7, 20):
            assert counts[n - 1] == allowed_blocks(T, n).distinct_word_count()


def test_letter_frequency_range():
    T = rotation_iet(Fraction(13, 21))
    assert letter_frequency_range(T, {1, 2}, 4) == (1, 1)
    assert letter_frequency_range(T, set(), 4) == (0, 0)
    # blocks at n=2: (1,2), (2,1), (2,2) -> letter-2 shares 1/2, 1/2, 1
    assert letter_frequency_range(T, {2}, 2) == (Fraction(1, 2), Fraction(1))


def test_frequency_range_narrows_across_scales(golden40):
    m4, M4 = letter_frequency_range(golden40, {2}, 4)
    m64, M64 = letter_frequency_range(golden40, {2}, 64)
    assert M64 - m64 < M4 - m4  # monitored consequence of unique ergodicity


def test_proportion_between_mass(golden40):
    # with c = n eps_n, the mid-range band carries at least one block per
    # achievable frequency step: mass >= (number of multiples of 1/n in
    # the band) * eps_n, and that count is at least n(M-m)/2 - 1.  The
    # un-discretized bound c(M-m)/2 is vacuous when the band contains no
    # multiple of 1/n (e.g. n = 2 here).
    import math

    T = golden40
    B = {2}
    for n in (2, 3, 5, 8, 13, 21):
        table = allowed_blocks(T, n)
        eps = table.eps_n
        freqs = {}
        for w, iv in table.entries:
            f = Fraction(sum(1 for a in w if a in B), n)
            freqs[f] = freqs.get(f, Fraction(0)) + iv.length
        m, M = min(freqs), max(freqs)
        lo = 3 * Fraction(m) / 4 + Fraction(M) / 4
        hi = Fraction(m) / 4 + 3 * Fraction(M) / 4
        mass = sum(v for f, v in freqs.items() if lo <= f <= hi)
        in_band = math.floor(hi * n) - math.ceil(lo * n) + 1
        assert Fraction(in_band) >= n * (M - m) / 2 - 1
        assert mass >= in_band * eps
        if in_band > 0:
            c = n * eps
            assert mass >= c * (M - m) / 2


def test_towers_13_21():
    T = rotation_iet(Fraction(13, 21))
    towers = build_towers(T, 3)
    assert towers_partition_ok(T, towers)
    assert all(3 <= t.height <= 6 for t in towers)
    assert len(towers) <= 6
    assert sum(t.height * t.base.length for t in towers) == 1


def test_towers_levels_disjoint_and_translated(golden40):
    towers = build_towers(golden40, 10)
    assert towers_partition_ok(golden40, towers)
    from ietlab.iet import apply

    for t in towers:
        levels = t.levels()
        for a, b in zip(levels, levels[1:]):
            mid = (a.left + a.length / 2) % 1
            assert b.contains(apply(golden40, mid, 1))


def test_towers_golden_depth40(golden40):
    for n in (10, 50):
        towers = build_towers(golden40, n)
        assert towers_partition_ok(golden40, towers)
        assert all(n <= t.height <= 2 * n for t in towers)
        assert len(towers) <= 6


def test_towers_reducible_degenerate():
    ident = make_iet([Fraction(1, 2)] * 2, (1, 2))
    with pytest.raises(DegenerateError):
        build_towers(ident, 3)


def test_towers_csv(golden40):
    towers = build_towers(golden40, 3)
    text = towers_to_csv(towers)
    lines = text.strip().splitlines()
    assert lines[0] == "base_left;base_length;height"
    assert len(lines) == len(towers) + 1


def test_blocktable_csv():
    table = allowed_blocks(rotation_iet(Fraction(13, 21)), 2)
    lines = table.to_csv().strip().splitlines()
    assert lines[0] == "word;left;length"
    assert lines[1] == "1,2;0/1;8/21"
