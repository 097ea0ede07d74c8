"""Exact flat geometry of translation surfaces: saddle connections, cylinder
decompositions, intersection numbers, regular triangulations and geodesic counts."""
from .catalog import load_surface
from .errors import FlatwalkError
from .field import FieldScalar, Vec
from .surface import TranslationSurface, build_surface, stratum

__all__ = ["FieldScalar", "FlatwalkError", "TranslationSurface", "Vec", "build_surface", "load_surface", "stratum"]
__version__ = "0.1.0"
