"""Square, Ammann-Beenker and Penrose patches as embedded graphs."""
from .ammann_beenker import build_ammann_beenker
from .classify import VertexClass, classify_vertices, interior_classes, star_signature
from .patch import Family, LatticePatch
from .penrose import build_penrose
from .square import build_square
from .zones import HopZone, center_vertex, hop_distances, is_connected, make_zone


def build_patch(family, size: int | None = None, iterations: int | None = None) -> LatticePatch:
    family = Family.parse(family)
    if family is Family.SQUARE:
        return build_square(size)
    if family is Family.AMMANN_BEENKER:
        return build_ammann_beenker(iterations)
    return build_penrose(iterations)


__all__ = [
    "Family", "LatticePatch", "VertexClass", "HopZone",
    "build_square", "build_ammann_beenker", "build_penrose", "build_patch",
    "classify_vertices", "interior_classes", "star_signature",
    "hop_distances", "make_zone", "center_vertex", "is_connected",
]
