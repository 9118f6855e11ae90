import math
from fractions import Fraction

import pytest

from ietlab.numbers import (
    CFExpansion,
    cf_expand,
    cf_value,
    convergents,
    diophantine_report,
    dist_nearest_int,
    max_quotient_prefix,
    rat_from_str,
    rat_to_str,
)


def test_cf_expand_examples():
    assert cf_expand(Fraction(1, 2)).quotients == (2,)
    assert cf_expand(Fraction(5, 8)).quotients == (1, 1, 1, 2)
    assert cf_expand(Fraction(13, 21)).quotients == (1, 1, 1, 1, 1, 2)


def test_cf_expand_domain():
    with pytest.raises(ValueError):
        cf_expand(Fraction(0))
    with pytest.raises(ValueError):
        cf_expand(Fraction(3, 2))


def test_cf_value_examples():
    assert cf_value([2]) == Fraction(1, 2)
    # nested evaluation by hand: 1/(1+1/(1+1/(1+1/2))) = 5/8
    assert cf_value([1, 1, 1, 2]) == Fraction(5, 8)
    with pytest.raises(ValueError):
        cf_value([])


def test_round_trip_355_1130():
    x = Fraction(355, 1130)
    assert cf_value(cf_expand(x).quotients) == x


def test_round_trip_small_denominators_exhaustive():
    for den in range(2, 60):
        for num in range(1, den):
            x = Fraction(num, den)
            if x >= 1:
                continue
            cf = cf_expand(x)
            assert cf.exact
            assert cf_value(cf.quotients) == x
            if cf.depth >= 2:
                assert cf.quotients[-1] >= 2


def test_round_trip_random_denominators_to_1e6(rng):
    for _ in range(300):
        den = rng.randint(2, 10**6)
        num = rng.randint(1, den - 1)
        x = Fraction(num, den)
        assert cf_value(cf_expand(x).quotients) == x


def test_convergents_examples():
    cf = cf_expand(Fraction(13, 21))
    assert cf.q_sequence() == (1, 1, 2, 3, 5, 8, 21)
    cf2 = cf_expand(Fraction(1, 2))
    assert cf2.convergents == ((0, 1), (1, 2))
    fib = CFExpansion((1,) * 8)
    assert fib.q_sequence() == (1, 1, 2, 3, 5, 8, 13, 21, 34)


def test_convergent_recurrence_and_determinant(rng):
    for _ in range(50):
        quots = tuple(rng.randint(1, 9) for _ in range(rng.randint(2, 15)))
        cf = CFExpansion(quots)
        conv = convergents(cf)
        # recompute the recurrence independently
        p_prev, q_prev, p, q = 1, 0, 0, 1
        for a, (pk, qk) in zip(quots, conv[1:]):
            p_prev, p = p, a * p + p_prev
            q_prev, q = q, a * q + q_prev
            assert (pk, qk) == (p, q)
        for (p0, q0), (p1, q1) in zip(conv, conv[1:]):
            assert p0 * q1 - p1 * q0 in (1, -1)
        assert 0 < cf.value() < 1


def test_q_strictly_increasing_from_2(rng):
    for _ in range(30):
        cf = CFExpansion(tuple(rng.randint(1, 5) for _ in range(10)))
        qs = cf.q_sequence()
        assert all(a < b for a, b in zip(qs[2:], qs[3:]))


def test_dist_nearest_int_examples():
    a = Fraction(13, 21)
    assert dist_nearest_int(0, a) == 0
    assert dist_nearest_int(21, a) == 0
    assert dist_nearest_int(5, a) == Fraction(2, 21)  # 65 mod 21 = 2


def test_dist_decreasing_along_convergents(rng):
    # canonical form (final quotient >= 2) keeps the last step strict
    for _ in range(30):
        quots = [rng.randint(1, 6) for _ in range(rng.randint(5, 12))]
        quots[-1] = max(quots[-1], 2)
        cf = CFExpansion(tuple(quots))
        alpha = cf.value()
        qs = cf.q_sequence()
        dists = [dist_nearest_int(q, alpha) for q in qs[1:-1]]
        assert all(a > b for a, b in zip(dists, dists[1:]))


def test_best_approximation_by_exhaustion(rng):
    for _ in range(8):
        cf = CFExpansion(tuple(rng.randint(1, 4) for _ in range(9)))
        alpha = cf.value()
        qs = cf.q_sequence()
        for k in range(1, len(qs) - 1):
            if qs[k + 1] > 10**4:
                break
            best = dist_nearest_int(qs[k], alpha)
            assert all(
                dist_nearest_int(q, alpha) >= best for q in range(1, qs[k + 1])
            )


def test_diophantine_all_ones():
    rep = diophantine_report(CFExpansion((1,) * 30), C=2)
    assert rep.violations == (1,)
    assert all(v == 0.0 for _, v in rep.log_defect)
    assert rep.max_quotient == 1


def test_diophantine_spike_at_10():
    quots = [1] * 30
    quots[9] = 10**6
    rep = diophantine_report(CFExpansion(tuple(quots)), C=2)
    assert 10 in rep.violations
    assert rep.late_violations(after=1) == (10,)
    assert rep.max_quotient == 10**6


def test_diophantine_defect_single_surviving_term():
    quots = [1] * 20
    quots[19] = 100
    rep = diophantine_report(CFExpansion(tuple(quots)), C=50)
    n, val = rep.log_defect[19]
    assert n == 20
    assert val == pytest.approx(math.log(100) / 20, rel=1e-12)


def test_max_quotient_prefix():
    assert max_quotient_prefix(CFExpansion((1, 1, 1, 1))) == 1
    assert max_quotient_prefix(CFExpansion((1, 1, 7, 2))) == 7


def test_rational_serialization():
    assert rat_to_str(Fraction(6, 8)) == "3/4"
    assert rat_from_str("3/4") == Fraction(3, 4)
    assert rat_from_str("5") == Fraction(5)
    cf = CFExpansion((1, 2, 3))
    assert CFExpansion.from_str(cf.to_str()) == cf


def test_truncated_expansion_flag():
    cf = cf_expand(Fraction(355, 1130), max_depth=2)
    assert not cf.exact
    assert len(cf.quotients) == 2
    assert cf_value(cf.quotients) != Fraction(355, 1130)


def test_horizon():
    cf = cf_expand(Fraction(13, 21))
    assert cf.horizon() == 10  # refuse N >= q_K / 2
