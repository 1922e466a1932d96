"""Exact algebra behind the WKB recursion."""

from .rational import FactorBasis, RationalFn
from .series import (
    InsufficientOrderError,
    Point,
    PuiseuxSeries,
    SingularSeriesError,
    residue_at_zero,
    series_sqrt,
)
from .terms import MomentumField, WkbTerm, expand, rational_series, wkb_differentiate

__all__ = [
    "FactorBasis",
    "InsufficientOrderError",
    "MomentumField",
    "Point",
    "PuiseuxSeries",
    "RationalFn",
    "SingularSeriesError",
    "WkbTerm",
    "expand",
    "rational_series",
    "residue_at_zero",
    "series_sqrt",
    "wkb_differentiate",
]
