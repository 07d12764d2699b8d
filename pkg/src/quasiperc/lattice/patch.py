"""Finite lattice patches: a vertex embedding plus an undirected edge list."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Iterable, Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree

DEDUP_TOL = 1e-6


class Family(str, enum.Enum):
    SQUARE = "square"
    AMMANN_BEENKER = "ammann-beenker"
    PENROSE = "penrose"

    @classmethod
    def parse(cls, value: str | Family) -> Family:
        if isinstance(value, Family):
            return value
        key = value.strip().lower().replace("_", "-")
        aliases = {"ab": "ammann-beenker", "ammannbeenker": "ammann-beenker", "sq": "square"}
        key = aliases.get(key, key)
        return cls(key)


# Smallest angle between edge directions (degrees) for each family.
ANGULAR_UNIT = {Family.SQUARE: 90, Family.AMMANN_BEENKER: 45, Family.PENROSE: 36}
LABEL_PREFIX = {Family.SQUARE: "SQ", Family.AMMANN_BEENKER: "AB", Family.PENROSE: "P"}


@dataclass(frozen=True, eq=False)
class LatticePatch:
    """Immutable embedded graph.

    ``positions`` is an ``(N, 2)`` float array in units of the edge length and
    ``edges`` an ``(E, 2)`` int array with ``i < j`` per row, rows sorted
    lexicographically.
    """

    family: Family
    positions: np.ndarray
    edges: np.ndarray
    generation_params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        pos = np.ascontiguousarray(self.positions, dtype=np.float64).reshape(-1, 2)
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if len(edges):
            edges = np.sort(edges, axis=1)
            edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
        pos.setflags(write=False)
        edges.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "family", Family.parse(self.family))

    @property
    def n_vertices(self) -> int:
        return len(self.positions)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def neighbors(self) -> tuple[np.ndarray, ...]:
        """Sorted neighbor ids per vertex."""
        n = self.n_vertices
        if not self.n_edges:
            return tuple(np.empty(0, dtype=np.int64) for _ in range(n))
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        bounds = np.searchsorted(src, np.arange(n + 1))
        return tuple(dst[bounds[v]:bounds[v + 1]] for v in range(n))

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n_vertices)

    @cached_property
    def kdtree(self) -> cKDTree:
        return cKDTree(self.positions)

    def edge_lengths(self) -> np.ndarray:
        d = self.positions[self.edges[:, 1]] - self.positions[self.edges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    def find_vertex(self, point: Sequence[float], tol: float = DEDUP_TOL) -> int | None:
        dist, idx = self.kdtree.query(point)
        return int(idx) if dist <= tol else None

    def to_json(self, classes: Sequence[str] | None = None) -> str:
        doc = {
            "family": self.family.value,
            "generation_params": self.generation_params,
            # repr(float) is the shortest round-tripping decimal form
            "vertices": [[float(x), float(y)] for x, y in self.positions],
            "edges": [[int(i), int(j)] for i, j in self.edges],
            "classes": list(classes) if classes is not None else [],
        }
        return json.dumps(doc, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> LatticePatch:
        doc = json.loads(text)
        positions = np.array(doc["vertices"], dtype=np.float64).reshape(-1, 2)
        edges = np.array(doc["edges"], dtype=np.int64).reshape(-1, 2)
        return cls(Family.parse(doc["family"]), positions, edges, dict(doc.get("generation_params", {})))


def patch_from_exact(
    family: Family,
    edge_keys: Iterable[tuple[Hashable, Hashable]],
    to_float: Mapping[Hashable, tuple[float, float]] | Any,
    generation_params: dict[str, Any],
) -> LatticePatch:
    """Assemble a patch from edges over exact (hashable) vertex keys.

    Keys are deduplicated by equality, then sorted so vertex ids are
    deterministic. ``to_float`` maps a key to Cartesian coordinates.
    """
    edge_set = set()
    keys = set()
    for a, b in edge_keys:
        if a == b:
            continue
        keys.add(a)
        keys.add(b)
        edge_set.add((a, b) if a < b else (b, a))
    ordered = sorted(keys)
    index = {k: i for i, k in enumerate(ordered)}
    positions = np.array([to_float(k) for k in ordered], dtype=np.float64).reshape(-1, 2)
    edges = np.array(sorted((index[a], index[b]) for a, b in edge_set), dtype=np.int64).reshape(-1, 2)
    return LatticePatch(family, positions, edges, generation_params)
