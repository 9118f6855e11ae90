import random
from fractions import Fraction

import pytest

from ietlab.iet import make_iet, rotation_iet
from ietlab.numbers import CFExpansion, cf_value


GOLDEN_40 = cf_value([1] * 40)      # F_40 / F_41
GOLDEN_60 = cf_value([1] * 60)      # F_60 / F_61

# Keane-checked 4-exchange over a prime denominator (seeded search; the
# tower-count bound is sensitive to the map's balance, see tests)
_D4 = 2**31 - 1
KEANE_4IET_LENGTHS = (
    Fraction(483354801, _D4),
    Fraction(669805427, _D4),
    Fraction(397458172, _D4),
    Fraction(_D4 - 483354801 - 669805427 - 397458172, _D4),
)
KEANE_4IET_PERM = (4, 1, 3, 2)


@pytest.fixture
def golden40():
    return rotation_iet(GOLDEN_40)


@pytest.fixture
def golden60():
    return rotation_iet(GOLDEN_60)


@pytest.fixture
def keane_4iet():
    return make_iet(KEANE_4IET_LENGTHS, KEANE_4IET_PERM)


@pytest.fixture
def rng():
    return random.Random(0xDECADE)


def random_cf(rng: random.Random, depth: int, max_quot: int = 4) -> CFExpansion:
    quots = [rng.randint(1, max_quot) for _ in range(depth)]
    if quots[-1] == 1:
        quots[-1] = 2
    return CFExpansion(tuple(quots))


def random_point(rng: random.Random) -> Fraction:
    return Fraction(rng.getrandbits(64) | 1, 1 << 64)
