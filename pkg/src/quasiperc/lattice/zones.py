from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, shortest_path

from ..errors import InvalidParameterError
from .patch import LatticePatch

UNREACHABLE = -1


def _check_vertex(patch: LatticePatch, v: int) -> int:
    if int(v) != v or not 0 <= v < patch.n_vertices:
        raise InvalidParameterError(f"vertex {v!r} not in patch of {patch.n_vertices} vertices")
    return int(v)


def adjacency(patch: LatticePatch):
    n = patch.n_vertices
    e = patch.edges
    ones = np.ones(2 * len(e), dtype=np.int8)
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    return coo_matrix((ones, (rows, cols)), shape=(n, n)).tocsr()


def hop_distances(patch: LatticePatch, origin: int) -> np.ndarray:
    """BFS hop counts from ``origin``; unreachable vertices get -1."""
    origin = _check_vertex(patch, origin)
    dist = shortest_path(adjacency(patch), directed=False, unweighted=True, indices=origin)
    out = np.full(patch.n_vertices, UNREACHABLE, dtype=np.int64)
    finite = np.isfinite(dist)
    out[finite] = dist[finite].astype(np.int64)
    return out


def is_connected(patch: LatticePatch) -> bool:
    if patch.n_vertices == 0:
        return True
    order = breadth_first_order(adjacency(patch), 0, directed=False, return_predecessors=False)
    return len(order) == patch.n_vertices


@dataclass(frozen=True, eq=False)
class HopZone:
    """Vertices within ``radius`` hops of ``origin`` on the pristine patch."""

    origin: int
    radius: int
    inside: np.ndarray

    @property
    def size(self) -> int:
        return int(self.inside.sum())


def make_zone(patch: LatticePatch, origin: int, radius: int) -> HopZone:
    if int(radius) != radius or radius < 0:
        raise InvalidParameterError(f"zone radius must be a nonnegative integer, got {radius!r}")
    dist = hop_distances(patch, origin)
    inside = (dist >= 0) & (dist <= radius)
    inside.setflags(write=False)
    return HopZone(int(origin), int(radius), inside)


def center_vertex(patch: LatticePatch) -> int:
    """Vertex nearest the centroid of all positions; lowest id wins ties."""
    if patch.n_vertices == 0:
        raise InvalidParameterError("empty patch has no center")
    centroid = patch.positions.mean(axis=0)
    d2 = ((patch.positions - centroid) ** 2).sum(axis=1)
    return int(np.argmin(d2))
