"""Vertex environments from the local star of incident edges."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .patch import ANGULAR_UNIT, LABEL_PREFIX, LatticePatch

BOUNDARY = "boundary"


@dataclass(frozen=True)
class VertexClass:
    label: str
    degree: int
    star_signature: tuple[int, ...]
    interior: bool


def _gaps(patch: LatticePatch, v: int) -> tuple[np.ndarray, np.ndarray]:
    nbrs = patch.neighbors[v]
    d = patch.positions[nbrs] - patch.positions[v]
    theta = np.degrees(np.arctan2(d[:, 1], d[:, 0])) % 360.0
    order = np.argsort(theta, kind="stable")
    theta, nbrs = theta[order], nbrs[order]
    gaps = (np.roll(theta, -1) - theta) % 360.0
    if len(nbrs) == 1:
        gaps = np.array([360.0])
    return nbrs, gaps


def _is_interior(patch: LatticePatch, v: int, nbrs: np.ndarray, gaps: np.ndarray) -> bool:
    # Every tile is a unit rhomb (squares included), so the wedge between two
    # consecutive edges is covered iff the parallelogram closes inside the patch.
    if len(nbrs) < 3:
        return False
    p = patch.positions
    for k, gap in enumerate(gaps):
        if gap >= 180.0 - 1e-9:
            return False
        a, b = nbrs[k], nbrs[(k + 1) % len(nbrs)]
        w = patch.find_vertex(p[a] + p[b] - p[v])
        if w is None or w not in patch.neighbors[a] or w not in patch.neighbors[b]:
            return False
    return True


def star_signature(patch: LatticePatch, v: int) -> tuple[int, ...]:
    """Sorted angular gaps between consecutive incident edges, in degrees,
    snapped to the family's angular unit."""
    unit = ANGULAR_UNIT[patch.family]
    _, gaps = _gaps(patch, v)
    if len(gaps) == 0:
        return ()
    return tuple(sorted(int(round(g / unit)) * unit for g in gaps))


def classify_vertices(patch: LatticePatch) -> list[VertexClass]:
    """One :class:`VertexClass` per vertex id.

    Interior labels look like ``AB:d5:s(45,45,90,90,90)``; vertices whose star
    is not a complete interior star are labeled ``boundary:<degree>``.
    """
    unit = ANGULAR_UNIT[patch.family]
    prefix = LABEL_PREFIX[patch.family]
    out = []
    for v in range(patch.n_vertices):
        nbrs, gaps = _gaps(patch, v)
        sig = tuple(sorted(int(round(g / unit)) * unit for g in gaps)) if len(gaps) else ()
        interior = _is_interior(patch, v, nbrs, gaps)
        if interior:
            label = f"{prefix}:d{len(nbrs)}:s({','.join(map(str, sig))})"
        else:
            label = f"{BOUNDARY}:{len(nbrs)}"
        out.append(VertexClass(label, len(nbrs), sig, interior))
    return out


def interior_classes(classes: list[VertexClass]) -> dict[str, list[int]]:
    """Label -> sorted vertex ids, interior classes only (the initial-point menu)."""
    menu: dict[str, list[int]] = {}
    for v, c in enumerate(classes):
        if c.interior:
            menu.setdefault(c.label, []).append(v)
    return dict(sorted(menu.items()))
