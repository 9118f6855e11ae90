"""The vectorized kernel against independent exact reference scans."""

from fractions import Fraction

from conftest import GOLDEN_60, random_cf, random_point
from ietlab.iet import CircleInterval, orbit_hits, rotation_iet
from ietlab.scan import counts_at, rotation_ball_hits, rotation_interval_hits
from ietlab.targets import RadiusSpec


def brute_ball_hits(alpha, x, y, spec, N):
    """Pure-Fraction reference: no floats anywhere."""
    hits = []
    for i in range(1, N + 1):
        r = spec.eval(i)
        if 2 * r >= 1:
            hits.append(i)
            continue
        v = (x + i * alpha - y) % 1
        if v < r or v >= 1 - r:
            hits.append(i)
    return hits


def test_interval_hits_vs_scaled_orbit(rng):
    for _ in range(6):
        cf = random_cf(rng, 12)
        alpha = cf.value()
        T = rotation_iet(alpha)
        x = random_point(rng)
        J = CircleInterval(random_point(rng), Fraction(1, rng.randint(10, 40)))
        kernel = rotation_interval_hits(alpha, x, J.left, J.length, 1, 3001)
        reference = orbit_hits(T, x, J, 3000)
        assert kernel == reference


def test_interval_hits_huge_denominator(rng):
    x = random_point(rng)
    J = CircleInterval(Fraction(1, 3), Fraction(1, 50))
    T = rotation_iet(GOLDEN_60)
    kernel = rotation_interval_hits(GOLDEN_60, x, J.left, J.length, 1, 4001)
    assert kernel == orbit_hits(T, x, J, 4000)


def test_interval_hits_boundary_points():
    # endpoints exactly on orbit points: half-open convention decides
    alpha = Fraction(13, 21)
    x = Fraction(0)
    J = CircleInterval(Fraction(5, 21), Fraction(3, 21))
    hits = rotation_interval_hits(alpha, x, J.left, J.length, 1, 10)
    wants = [i for i in range(1, 10) if J.contains((x + i * alpha) % 1)]
    assert hits == wants


def test_ball_hits_all_families(rng):
    specs = [
        RadiusSpec.harmonic(Fraction(1, 2)),
        RadiusSpec.harmonic(Fraction(2)),
        RadiusSpec.log_harmonic(),
        RadiusSpec.constant(Fraction(1, 7)),
        RadiusSpec.from_table([Fraction(1, k + 2) for k in range(2500)]),
    ]
    for spec in specs:
        cf = random_cf(rng, 14)
        alpha = cf.value()
        x, y = random_point(rng), random_point(rng)
        kernel = rotation_ball_hits(
            alpha, x, y, spec.floats, spec.eval, 1, 2501, sat_until=min(spec.sat_until(), 2500)
        )
        assert kernel == brute_ball_hits(alpha, x, y, spec, 2500)


def test_ball_hits_zero_radius(rng):
    spec = RadiusSpec.from_table([Fraction(0)] * 100)
    alpha = random_cf(rng, 10).value()
    assert rotation_ball_hits(alpha, random_point(rng), Fraction(1, 2), spec.floats, spec.eval, 1, 101) == []


def test_ball_hits_adversarial_boundary_positions(rng):
    # place the orbit exactly on, a hair inside, and a hair outside the
    # ball boundary at a chosen time: only exact arithmetic can decide
    spec = RadiusSpec.harmonic(Fraction(1, 2))
    y = Fraction(1, 2)
    for _ in range(5):
        alpha = random_cf(rng, 14).value()
        i0 = rng.randint(100, 900)
        r = spec.eval(i0)
        eps = Fraction(1, 10**12)
        for target, inside in (
            (y - r, True),        # left endpoint: included
            (y + r, False),       # right endpoint: excluded
            (y + r - eps, True),
            (y - r - eps, False),
            (y + r + eps, False),
        ):
            x = (target - i0 * alpha) % 1
            hits = rotation_ball_hits(alpha, x, y, spec.floats, spec.eval, i0, i0 + 1)
            assert (hits == [i0]) == inside
            assert (i0 in brute_ball_hits(alpha, x, y, spec, i0)) == inside


def test_counts_at():
    assert counts_at([3, 7, 9, 20], [1, 7, 10, 30]) == [0, 2, 3, 4]
    assert counts_at([], [5]) == [0]
