"""Exact-arithmetic laboratory for shrinking-target dynamics of circle
rotations and interval exchange transformations."""

from .errors import BudgetError, DegenerateError, HorizonError, InvariantError
from .iet import IET, CircleInterval, apply, e_T, keane_check, make_iet, rotation_iet
from .numbers import CFExpansion, Rational, cf_expand, cf_value, dist_nearest_int
from .targets import RadiusSpec, hit_ratio_series, select_scales

__all__ = [
    "BudgetError",
    "DegenerateError",
    "HorizonError",
    "InvariantError",
    "IET",
    "CircleInterval",
    "apply",
    "e_T",
    "keane_check",
    "make_iet",
    "rotation_iet",
    "CFExpansion",
    "Rational",
    "cf_expand",
    "cf_value",
    "dist_nearest_int",
    "RadiusSpec",
    "hit_ratio_series",
    "select_scales",
]
