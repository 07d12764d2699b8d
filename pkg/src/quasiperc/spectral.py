"""Laplacian Hamiltonians and the CTQW propagator exp(-iHt) (hbar = 1).

Two backends:

* ``dense``: full symmetric eigendecomposition, exact to rounding, O(N^3).
* ``chebyshev``: Chebyshev expansion of the propagator over the Gershgorin
  interval ``[0, 2*gamma*max_degree]``; only sparse mat-vecs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln, jv

from .errors import AccuracyError, InvalidParameterError, ResourceLimitError

DENSE_CAP = 4096
# "auto" only picks the dense backend up to this size; see README.
AUTO_DENSE_MAX = 1024
CHEB_TOL = 1e-12
MAX_CHEB_TERMS = 200_000
NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """H = gamma * (D - A) as a CSR matrix."""

    matrix: sp.csr_matrix
    gamma: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectral_bound(self) -> float:
        """Gershgorin upper bound on the spectrum (lower bound is 0)."""
        if self.dim == 0:
            return 0.0
        return float(2.0 * self.matrix.diagonal().max())

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        if self.dim > DENSE_CAP:
            raise ResourceLimitError(f"dense eigendecomposition of N={self.dim} exceeds cap {DENSE_CAP}")
        return np.linalg.eigh(self.matrix.toarray())

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def laplacian(graph, gamma: float = 1.0) -> Hamiltonian:
    """H = gamma * (D - A) for a patch or an ``(n_vertices, edges)`` pair.

    Isolated vertices give all-zero rows.
    """
    if isinstance(graph, tuple):
        n, edges = graph
    else:
        n, edges = graph.n_vertices, graph.edges
    if not gamma > 0:
        raise InvalidParameterError(f"gamma must be positive, got {gamma!r}")
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    n = int(n)
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    adj = sp.coo_matrix((np.full(len(rows), float(gamma)), (rows, cols)), shape=(n, n)).tocsr()
    deg = np.asarray(adj.sum(axis=1)).ravel()
    h = (sp.diags(deg) - adj).tocsr()
    h.sort_indices()
    return Hamiltonian(h, float(gamma))


@dataclass(frozen=True, eq=False)
class WaveState:
    amplitudes: np.ndarray
    time: float = 0.0

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def localized_state(n: int, origin: int) -> WaveState:
    if int(origin) != origin or not 0 <= origin < n:
        raise InvalidParameterError(f"origin {origin!r} out of range for N={n}")
    psi = np.zeros(n, dtype=np.complex128)
    psi[int(origin)] = 1.0
    return WaveState(psi, 0.0)


def probabilities(psi: WaveState) -> np.ndarray:
    a = psi.amplitudes
    return a.real ** 2 + a.imag ** 2


def dense_propagator(h: Hamiltonian, t: float) -> np.ndarray:
    """U = V exp(-i w t) V^T from the full eigendecomposition."""
    w, v = h.eigh
    return (v * np.exp(-1j * w * t)) @ v.T


def _dense_apply(h: Hamiltonian, vec: np.ndarray, t: float) -> np.ndarray:
    w, v = h.eigh
    return v @ (np.exp(-1j * w * t) * (v.T @ vec))


def chebyshev_order(x: float, tol: float = CHEB_TOL) -> int:
    """Smallest K with 2 * sum_{k>K} |J_k(x)| < tol.

    Uses |J_k(x)| <= (x/2)^k / k! and a geometric tail bound, valid once
    K + 2 > x / 2.
    """
    x = abs(x)
    if x == 0.0:
        return 0
    half = x / 2.0
    k = max(1, int(math.ceil(half)))
    log_tol = math.log(tol / 2.0)
    while k <= MAX_CHEB_TERMS:
        ratio = half / (k + 2)
        if ratio < 1.0:
            log_term = (k + 1) * math.log(half) - gammaln(k + 2) - math.log1p(-ratio)
            if log_term < log_tol:
                return k
        k += max(1, k // 64)
    raise AccuracyError(f"Chebyshev expansion for x={x:g} needs more than {MAX_CHEB_TERMS} terms")


def _chebyshev_apply(h: Hamiltonian, vec: np.ndarray, t: float, tol: float) -> np.ndarray:
    emax = h.spectral_bound
    if emax == 0.0 or t == 0.0:
        return vec.copy()
    center = radius = emax / 2.0
    x = radius * t
    order = chebyshev_order(x, tol)
    coeffs = jv(np.arange(order + 1), x)
    phase = (-1j) ** np.arange(order + 1)
    mat = h.matrix

    def scaled(y: np.ndarray) -> np.ndarray:
        return (mat @ y - center * y) / radius

    t_prev = vec
    t_curr = scaled(vec)
    acc = coeffs[0] * t_prev + 2.0 * coeffs[1] * phase[1] * t_curr if order >= 1 else coeffs[0] * vec
    for k in range(2, order + 1):
        t_next = 2.0 * scaled(t_curr) - t_prev
        acc += 2.0 * coeffs[k] * phase[k] * t_next
        t_prev, t_curr = t_curr, t_next
    return np.exp(-1j * center * t) * acc


def resolve_backend(h: Hamiltonian, backend: str) -> str:
    if backend == "auto":
        return "dense" if h.dim <= AUTO_DENSE_MAX else "chebyshev"
    if backend not in ("dense", "chebyshev"):
        raise InvalidParameterError(f"unknown backend {backend!r}")
    return backend


def evolve(h: Hamiltonian, psi: WaveState, dt: float, backend: str = "auto", tol: float = CHEB_TOL) -> WaveState:
    """exp(-i H dt) psi. Raises AccuracyError if the norm drifts past 1e-10."""
    vec = np.asarray(psi.amplitudes, dtype=np.complex128)
    if len(vec) != h.dim:
        raise InvalidParameterError(f"state length {len(vec)} does not match H dimension {h.dim}")
    if dt == 0.0:
        out = vec.copy()
    elif resolve_backend(h, backend) == "dense":
        out = _dense_apply(h, vec, dt)
    else:
        out = _chebyshev_apply(h, vec, dt, tol)
    _check_norm(out, psi.norm_sq)
    return WaveState(out, psi.time + dt)


def evolve_series(h: Hamiltonian, psi: WaveState, times: Sequence[float], backend: str = "auto",
                  tol: float = CHEB_TOL) -> list[WaveState]:
    """States at each of the increasing ``times`` (absolute, measured from ``psi.time``).

    The dense backend evaluates every time directly from ``psi``; Chebyshev
    steps between consecutive times.
    """
    times = [float(t) for t in times]
    if any(b < a for a, b in zip(times, times[1:])):
        raise InvalidParameterError("times must be nondecreasing")
    kind = resolve_backend(h, backend)
    base = np.asarray(psi.amplitudes, dtype=np.complex128)
    norm0 = psi.norm_sq
    out = []
    if kind == "dense":
        w, v = h.eigh
        coeff = v.T @ base
        for t in times:
            # U(0) is exactly the identity
            vec = base.copy() if t == 0.0 else v @ (np.exp(-1j * w * t) * coeff)
            _check_norm(vec, norm0)
            out.append(WaveState(vec, psi.time + t))
        return out
    prev_t, vec = 0.0, base
    for t in times:
        vec = _chebyshev_apply(h, vec, t - prev_t, tol)
        _check_norm(vec, norm0)
        prev_t = t
        out.append(WaveState(vec, psi.time + t))
    return out


def _check_norm(vec: np.ndarray, expected: float) -> None:
    drift = abs(float(np.vdot(vec, vec).real) - expected)
    if not drift < NORM_TOL:
        raise AccuracyError(f"propagated norm drifted by {drift:.3e}")
