"""Penrose rhomb (P3) patches by Robinson-triangle inflation.

Coordinates are integer 4-vectors over ``d_k = (cos k*36deg, sin k*36deg)``,
k = 0..3, using ``d_{k+5} = -d_k`` and ``d_4 = -d_0 + d_1 - d_2 + d_3``.
Multiplication by the golden ratio is ``phi * d_k = d_{k-1} + d_{k+1}`` so
inflation is exact.

Triangles are ``(kind, A, B, C)`` with unit legs AB and AC. Kind 0 is half a
thin rhomb (36 degrees at A), kind 1 half a fat rhomb (108 degrees at A).
Vertex order encodes handedness; rhombs are mirror pairs sharing BC.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidParameterError, ResourceLimitError
from .patch import Family, LatticePatch, patch_from_exact

MAX_ITERATIONS = 9

Vec = tuple[int, int, int, int]
ZERO: Vec = (0, 0, 0, 0)
_BASIS = np.array([(math.cos(k * math.pi / 5), math.sin(k * math.pi / 5)) for k in range(4)])

# multiplication by zeta = exp(i*pi/5) and its inverse, acting on column vectors
_ROT = np.array([[0, 0, 0, -1], [1, 0, 0, 1], [0, 1, 0, -1], [0, 0, 1, 1]], dtype=np.int64)
_ROT_INV = np.array([[1, 1, 0, 0], [-1, 0, 1, 0], [1, 0, 0, 1], [-1, 0, 0, 0]], dtype=np.int64)
_PHI = _ROT + _ROT_INV
_INV_PHI = _PHI - np.eye(4, dtype=np.int64)  # 1/phi = phi - 1


def unit(k: int) -> Vec:
    k %= 10
    sign = 1 if k < 5 else -1
    k %= 5
    if k == 4:
        v = (-1, 1, -1, 1)
    else:
        v = tuple(int(i == k) for i in range(4))
    return tuple(sign * c for c in v)


def _mul(mat: np.ndarray, v: Vec) -> Vec:
    return tuple(int(x) for x in mat @ np.asarray(v, dtype=np.int64))


def add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def golden(v: Vec) -> Vec:
    return _mul(_PHI, v)


def inv_golden(v: Vec) -> Vec:
    return _mul(_INV_PHI, v)


def to_float(v: Vec) -> tuple[float, float]:
    x, y = np.asarray(v, dtype=np.float64) @ _BASIS
    return (float(x), float(y))


def seed_triangles() -> list:
    """Sun: five fat rhombs with their 72 degree corners at the origin."""
    tris = []
    for k in range(5):
        left, right = unit(2 * k), unit(2 * k + 2)
        tip = add(left, right)
        tris.append((1, left, ZERO, tip))
        tris.append((1, right, ZERO, tip))
    return tris


def inflate(triangles: list) -> list:
    out = []
    for kind, a, b, c in triangles:
        a, b, c = golden(a), golden(b), golden(c)
        if kind == 0:
            p = add(a, inv_golden(sub(b, a)))
            out.append((0, c, p, b))
            out.append((1, p, c, a))
        else:
            q = add(b, inv_golden(sub(a, b)))
            r = add(b, inv_golden(sub(c, b)))
            out.append((1, r, c, a))
            out.append((1, q, r, b))
            out.append((0, r, q, a))
    return out


def triangles(iterations: int) -> list:
    tris = seed_triangles()
    for _ in range(iterations):
        tris = inflate(tris)
    return tris


def _group_halves(tris: list) -> dict:
    halves: dict = {}
    for kind, a, b, c in tris:
        halves.setdefault((kind, frozenset((b, c))), []).append((a, b, c))
    return halves


def rhombs(tris: list) -> list:
    """Pair mirror halves across their shared base into ``(kind, a, b, a2, c)``."""
    out = []
    for (kind, _), group in _group_halves(tris).items():
        if len(group) == 2:
            (a, b, c), (a2, _, _) = group
            out.append((kind, a, b, a2, c))
    return out


def boundary_halves(tris: list) -> list:
    """Halves whose mirror partner lies outside the patch."""
    return [(kind, *group[0]) for (kind, _), group in _group_halves(tris).items() if len(group) == 1]


def tile_edges(rhomb_list: list, halves: list = ()):
    """Unit sides of rhombs and of boundary halves; bases are diagonals, not edges."""
    for _, a, b, a2, c in rhomb_list:
        yield a, b
        yield b, a2
        yield a2, c
        yield c, a
    # kept so that every corner survives the next subdivision
    for _, a, b, c in halves:
        yield a, b
        yield a, c


def build_penrose(iterations: int, max_iterations: int = MAX_ITERATIONS) -> LatticePatch:
    if int(iterations) != iterations or iterations < 0:
        raise InvalidParameterError(f"iterations must be a nonnegative integer, got {iterations!r}")
    if iterations > max_iterations:
        raise ResourceLimitError(f"Penrose iterations={iterations} exceeds cap {max_iterations}")
    tris = triangles(int(iterations))
    return patch_from_exact(
        Family.PENROSE,
        tile_edges(rhombs(tris), boundary_halves(tris)),
        to_float,
        {"iterations": int(iterations), "dedup_tol": 1e-6, "seed": "penrose-sun"},
    )
