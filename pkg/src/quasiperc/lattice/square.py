from __future__ import annotations

import numpy as np

from ..errors import InvalidParameterError
from .patch import Family, LatticePatch


def build_square(n: int) -> LatticePatch:
    """n x n grid graph; vertex ``r * n + c`` sits at ``(c, r)``."""
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"square size must be a positive integer, got {n!r}")
    n = int(n)
    ids = np.arange(n * n).reshape(n, n)
    cols, rows = np.meshgrid(np.arange(n), np.arange(n))
    positions = np.column_stack([cols.ravel(), rows.ravel()]).astype(np.float64)
    horizontal = np.column_stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()])
    vertical = np.column_stack([ids[:-1, :].ravel(), ids[1:, :].ravel()])
    edges = np.concatenate([horizontal, vertical])
    return LatticePatch(Family.SQUARE, positions, edges, {"size": n})
