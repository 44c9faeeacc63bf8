"""Mixed multiplicities, generalized Koszul complexes and vector field indices over local rings."""

from __future__ import annotations

from .errors import KMError
from .localalg import INFINITE, RingSpec, SubmodulePresentation, colength, standard_basis
from .polyring import Poly, PolyVec, parse_poly

__all__ = [
    "INFINITE",
    "KMError",
    "Poly",
    "PolyVec",
    "RingSpec",
    "SubmodulePresentation",
    "colength",
    "parse_poly",
    "standard_basis",
]
