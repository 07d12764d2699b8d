"""Ammann-Beenker patches by silver-ratio stone inflation.

Points are integer 4-vectors over the unit directions ``e_k = (cos k*45deg,
sin k*45deg)`` for k = 0..3 (``e_{k+4} = -e_k``). Scaling by the silver ratio
``1 + sqrt(2)`` and by ``sqrt(2)`` both stay in this lattice, so every vertex is
exact and deduplication is plain tuple equality.

Squares are carried as pairs of half-square triangles so that the inflation
is a proper dissection. A triangle is stored as ``(R, du, dv)``: right angle at
``R``, legs toward ``R + e_du`` and ``R + e_dv``. The two legs are not
interchangeable: the ``du`` leg starts with a unit segment at ``R`` after
inflation, the ``dv`` leg with a square diagonal. Rhombs are ``(A, du, dv)``
with the 45 degree corner at ``A`` and sides ``e_du``, ``e_dv``.
"""
from __future__ import annotations

import math

from ..errors import InvalidParameterError, ResourceLimitError
from .patch import Family, LatticePatch, patch_from_exact

MAX_ITERATIONS = 5

Vec = tuple[int, int, int, int]
ZERO: Vec = (0, 0, 0, 0)
_S = math.sqrt(0.5)
_BASIS = [(1.0, 0.0), (_S, _S), (0.0, 1.0), (-_S, _S)]


def unit(k: int) -> Vec:
    k %= 8
    v = [0, 0, 0, 0]
    v[k % 4] = 1 if k < 4 else -1
    return tuple(v)


def add(*vs: Vec) -> Vec:
    return tuple(sum(c) for c in zip(*vs))


def neg(v: Vec) -> Vec:
    return tuple(-c for c in v)


def sqrt2(v: Vec) -> Vec:
    # sqrt(2) e_k = e_{k-1} + e_{k+1}
    out = ZERO
    for k, c in enumerate(v):
        if c:
            out = add(out, scale(add(unit(k - 1), unit(k + 1)), c))
    return out


def scale(v: Vec, c: int) -> Vec:
    return tuple(c * x for x in v)


def silver(v: Vec) -> Vec:
    return add(v, sqrt2(v))


def to_float(v: Vec) -> tuple[float, float]:
    x = sum(c * b[0] for c, b in zip(v, _BASIS))
    y = sum(c * b[1] for c, b in zip(v, _BASIS))
    return (x, y)


def seed_tiles() -> tuple[list, list]:
    """Eight rhombs around the origin plus eight squares between their tips."""
    rhombs = [(ZERO, k, k + 1) for k in range(8)]
    triangles = []
    for k in range(8):
        tip_right = add(unit(k), unit(k + 1))
        tip_left = add(unit(k - 1), unit(k))
        triangles.append((tip_right, k + 5, k - 1))
        triangles.append((tip_left, k + 3, k + 1))
    return rhombs, triangles


def inflate(rhombs: list, triangles: list) -> tuple[list, list]:
    new_rhombs: list = []
    new_tris: list = []
    for a0, i, j in rhombs:
        o = silver(a0)
        u, v = unit(i), unit(j)
        far = add(o, silver(add(u, v)))
        p = add(o, u, v)
        q = add(o, sqrt2(add(u, v)))
        new_rhombs.append((o, i, j))
        new_rhombs.append((far, i + 4, j + 4))
        new_rhombs.append((add(o, silver(u)), 2 * j - i, 2 * i - j + 4))
        new_tris.append((p, j + 4, 2 * i - j))
        new_tris.append((p, i + 4, 2 * j - i))
        new_tris.append((q, i, 2 * j - i + 4))
        new_tris.append((q, j, 2 * i - j + 4))
    for r, a, b in triangles:
        m = a + 1 if (b - a) % 8 == 2 else a - 1
        o = silver(r)
        w = add(o, unit(m))
        x = add(o, unit(a), unit(m))
        new_rhombs.append((o, a, m))
        new_rhombs.append((add(o, silver(unit(b))), b + 4, 2 * b - m + 4))
        new_tris.append((x, m + 4, 2 * a - m))
        new_tris.append((w, 2 * b - m, m + 4))
        new_tris.append((w, b, a))
    return new_rhombs, new_tris


def tiles(iterations: int) -> tuple[list, list]:
    rhombs, triangles = seed_tiles()
    for _ in range(iterations):
        rhombs, triangles = inflate(rhombs, triangles)
    return rhombs, triangles


def squares(triangles: list) -> list:
    """Pair half-squares sharing a hypotenuse; unpaired halves are dropped."""
    by_hyp: dict = {}
    for r, a, b in triangles:
        ends = frozenset((add(r, unit(a)), add(r, unit(b))))
        by_hyp.setdefault(ends, []).append((r, a, b))
    return [group for group in by_hyp.values() if len(group) == 2]


def tile_edges(rhombs: list, triangles: list):
    """Unit edges of rhombs and of complete squares; diagonals are not edges."""
    triangles = [t for pair in squares(triangles) for t in pair]
    for a0, i, j in rhombs:
        u, v = unit(i), unit(j)
        b, c, d = add(a0, u), add(a0, u, v), add(a0, v)
        yield a0, b
        yield b, c
        yield c, d
        yield d, a0
    for r, a, b in triangles:
        yield r, add(r, unit(a))
        yield r, add(r, unit(b))


def build_ammann_beenker(iterations: int, max_iterations: int = MAX_ITERATIONS) -> LatticePatch:
    if int(iterations) != iterations or iterations < 0:
        raise InvalidParameterError(f"iterations must be a nonnegative integer, got {iterations!r}")
    if iterations > max_iterations:
        raise ResourceLimitError(
            f"Ammann-Beenker iterations={iterations} exceeds cap {max_iterations}")
    rhombs, triangles = tiles(int(iterations))
    return patch_from_exact(
        Family.AMMANN_BEENKER,
        tile_edges(rhombs, triangles),
        to_float,
        {"iterations": int(iterations), "dedup_tol": 1e-6, "seed": "ab-star8"},
    )
