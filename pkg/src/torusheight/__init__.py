"""Exact heights, tropical fans and degree bounds for subvarieties of tori."""

from .bounds import BoundExpr, mu
from .degree import st_degree
from .fan import Cone, Fan, sigma, trop_hypersurface, trop_monomial_curve
from .heights import Approx, Exact, Ordering, compare
from .lattice import IntMatrix, LatticeBasis, RatMatrix

__all__ = [
    "Approx",
    "BoundExpr",
    "Cone",
    "Exact",
    "Fan",
    "IntMatrix",
    "LatticeBasis",
    "Ordering",
    "RatMatrix",
    "compare",
    "mu",
    "sigma",
    "st_degree",
    "trop_hypersurface",
    "trop_monomial_curve",
]

__version__ = "0.1.0"
