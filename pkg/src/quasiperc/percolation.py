"""Bond disorder, escape mass, and seeded CTQW ensembles."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import InvalidParameterError
from .lattice import LatticePatch, classify_vertices, interior_classes
from .lattice.zones import HopZone, make_zone
from .spectral import evolve_series, laplacian, localized_state, probabilities

DEFAULT_THRESHOLD = 0.02
DEFAULT_TRIALS = 50
DEFAULT_ZONE = 40
FLOAT_FMT = "{:.12g}"


def trial_seed(base_seed: int, trial_index: int) -> int:
    """64-bit per-trial seed; independent of how many trials are run."""
    ss = np.random.SeedSequence([int(base_seed) & 0xFFFFFFFFFFFFFFFF, int(trial_index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def removal_count(fraction: float, n_edges: int) -> int:
    # Python's round() is half-to-even
    return int(round(fraction * n_edges))


@dataclass(frozen=True, eq=False)
class DisorderRealization:
    patch: LatticePatch
    fraction: float
    seed: int
    removed: np.ndarray  # sorted row indices into patch.edges

    @property
    def removed_edges(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.patch.edges[self.removed]}

    @property
    def kept_edges(self) -> np.ndarray:
        mask = np.ones(self.patch.n_edges, dtype=bool)
        mask[self.removed] = False
        return self.patch.edges[mask]


def remove_edges(patch: LatticePatch, fraction: float, seed: int) -> DisorderRealization:
    """Remove ``round(f*|E|)`` edges uniformly without replacement.

    The stream is Philox (counter-based) keyed by ``seed``.
    """
    if not 0.0 <= fraction <= 1.0:
        raise InvalidParameterError(f"edge disconnection fraction must lie in [0, 1], got {fraction!r}")
    k = removal_count(fraction, patch.n_edges)
    if k == 0:
        removed = np.empty(0, dtype=np.int64)
    else:
        rng = np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))
        removed = np.sort(rng.permutation(patch.n_edges)[:k])
    removed.setflags(write=False)
    return DisorderRealization(patch, float(fraction), int(seed), removed)


def escape_mass(prob: np.ndarray, zone: HopZone) -> float:
    """Probability found outside the zone."""
    outside = float(np.sum(prob[~zone.inside]))
    return min(max(outside, 0.0), 1.0)


def percolated(prob: np.ndarray, zone: HopZone, threshold: float = DEFAULT_THRESHOLD) -> bool:
    if not 0.0 < threshold < 1.0:
        raise InvalidParameterError(f"threshold must lie in (0, 1), got {threshold!r}")
    return escape_mass(prob, zone) >= threshold


def time_grid(stop: float = 200.0, step: float = 1.0, start: float = 0.0) -> np.ndarray:
    if step <= 0 or stop < start:
        raise InvalidParameterError(f"bad time grid start={start} stop={stop} step={step}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


@dataclass(frozen=True)
class TrialRecord:
    times: np.ndarray
    escape_mass: np.ndarray
    percolated: np.ndarray


def run_trial(
    patch: LatticePatch,
    origin: int,
    zone: HopZone | int,
    fraction: float,
    seed: int,
    times: Sequence[float],
    gamma: float = 1.0,
    threshold: float = DEFAULT_THRESHOLD,
    backend: str = "auto",
) -> TrialRecord:
    """One quenched-disorder realization evolved over ``times``.

    ``zone`` may be a prebuilt :class:`HopZone` or a radius; either way the
    zone lives on the pristine patch.
    """
    if not isinstance(zone, HopZone):
        zone = make_zone(patch, origin, zone)
    if zone.origin != origin:
        raise InvalidParameterError("zone origin differs from trial origin")
    disorder = remove_edges(patch, fraction, seed)
    h = laplacian((patch.n_vertices, disorder.kept_edges), gamma)
    states = evolve_series(h, localized_state(patch.n_vertices, origin), times, backend=backend)
    mass = np.array([escape_mass(probabilities(s), zone) for s in states])
    return TrialRecord(np.asarray(times, dtype=float), mass, mass >= threshold)


@dataclass
class PercolationSeries:
    times: np.ndarray
    escape_mass: np.ndarray
    escape_sem: np.ndarray
    indicator_fraction: np.ndarray
    trials: int
    threshold: float
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_csv(self) -> str:
        cols = ["t", "mean_escape_mass", "indicator_fraction", "trials",
                "f", "zone_radius", "origin_class", "family", "seed", "escape_mass_sem"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        m = self.metadata
        for t, mean, sem, ind in zip(self.times, self.escape_mass, self.escape_sem, self.indicator_fraction):
            w.writerow([FLOAT_FMT.format(t), FLOAT_FMT.format(mean), FLOAT_FMT.format(ind), self.trials,
                        FLOAT_FMT.format(m.get("f", float("nan"))), m.get("zone_radius"),
                        m.get("origin_class"), m.get("family"), m.get("seed"), FLOAT_FMT.format(sem)])
        return buf.getvalue()


def resolve_origin(patch: LatticePatch, origin: int | str | None) -> tuple[int, str]:
    """Vertex id and class label for an origin selector.

    ``None``/``"center"`` picks :func:`center_vertex`; a class label picks the
    interior vertex of that class nearest the patch center; an int is taken
    as a vertex id.
    """
    from .lattice import center_vertex

    classes = classify_vertices(patch)
    if origin is None or origin == "center":
        v = center_vertex(patch)
        return v, classes[v].label
    if isinstance(origin, (int, np.integer)) or (isinstance(origin, str) and origin.isdigit()):
        v = int(origin)
        if not 0 <= v < patch.n_vertices:
            raise InvalidParameterError(f"origin vertex {v} out of range")
        return v, classes[v].label
    menu = interior_classes(classes)
    if origin not in menu:
        raise InvalidParameterError(f"unknown origin class {origin!r}; known: {sorted(menu)}")
    centroid = patch.positions.mean(axis=0)
    ids = np.array(menu[origin])
    d2 = ((patch.positions[ids] - centroid) ** 2).sum(axis=1)
    return int(ids[np.argmin(d2)]), origin


def ensemble(
    patch: LatticePatch,
    origin: int | str | None,
    zone_radius: int,
    fraction: float,
    trials: int = DEFAULT_TRIALS,
    base_seed: int = 0,
    times: Sequence[float] | None = None,
    gamma: float = 1.0,
    threshold: float = DEFAULT_THRESHOLD,
    backend: str = "auto",
    workers: int = 1,
) -> PercolationSeries:
    """Average ``trials`` independent realizations pointwise in time.

    Trial ``i`` uses ``trial_seed(base_seed, i)``; results are reduced in
    trial order, so output does not depend on ``workers``.
    """
    if int(trials) != trials or trials < 1:
        raise InvalidParameterError(f"trials must be a positive integer, got {trials!r}")
    times = time_grid() if times is None else np.asarray(times, dtype=float)
    v, label = resolve_origin(patch, origin)
    zone = make_zone(patch, v, zone_radius)

    def one(i: int) -> TrialRecord:
        return run_trial(patch, v, zone, fraction, trial_seed(base_seed, i), times, gamma, threshold, backend)

    if fraction == 0.0:
        # no randomness is consumed; every trial is the pristine walk
        first = one(0)
        records = [first] * int(trials)
    elif workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(int(trials))))
    else:
        records = [one(i) for i in range(int(trials))]

    mass = np.stack([r.escape_mass for r in records])
    hits = np.stack([r.percolated for r in records]).astype(float)
    if fraction == 0.0:
        # identical trials: report the walk itself, not a rounded average
        mean, ind, sem = records[0].escape_mass.copy(), hits[0], np.zeros(len(times))
    else:
        mean, ind = mass.mean(axis=0), hits.mean(axis=0)
        sem = mass.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(len(times))
    meta = {
        "family": patch.family.value,
        "patch_params": dict(patch.generation_params),
        "origin": v,
        "origin_class": label,
        "zone_radius": int(zone_radius),
        "f": float(fraction),
        "seed": int(base_seed),
        "gamma": float(gamma),
    }
    return PercolationSeries(times, mean, sem, ind, int(trials), float(threshold), meta)


@dataclass
class SweepRow:
    fraction: float
    t_eval: float
    mean_escape_mass: float
    escape_sem: float
    indicator_fraction: float
    trials: int


@dataclass
class SweepResult:
    rows: list[SweepRow]
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_csv(self) -> str:
        cols = ["f", "t_eval", "mean_escape_mass", "indicator_fraction", "trials",
                "escape_mass_sem", "zone_radius", "origin_class", "family", "seed"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        m = self.metadata
        for r in self.rows:
            w.writerow([FLOAT_FMT.format(r.fraction), FLOAT_FMT.format(r.t_eval),
                        FLOAT_FMT.format(r.mean_escape_mass), FLOAT_FMT.format(r.indicator_fraction),
                        r.trials, FLOAT_FMT.format(r.escape_sem), m.get("zone_radius"),
                        m.get("origin_class"), m.get("family"), m.get("seed")])
        return buf.getvalue()


def sweep_fraction(
    patch: LatticePatch,
    origin: int | str | None,
    zone_radius: int,
    fractions: Sequence[float],
    trials: int = DEFAULT_TRIALS,
    base_seed: int = 0,
    t_eval: float = 200.0,
    gamma: float = 1.0,
    threshold: float = DEFAULT_THRESHOLD,
    backend: str = "auto",
    workers: int = 1,
) -> SweepResult:
    if not t_eval > 0:
        raise InvalidParameterError(f"t_eval must be positive, got {t_eval!r}")
    for f in fractions:
        if not 0.0 <= f <= 1.0:
            raise InvalidParameterError(f"fraction {f!r} outside [0, 1]")
    rows = []
    meta: dict[str, Any] = {}
    for f in sorted(fractions):
        s = ensemble(patch, origin, zone_radius, f, trials, base_seed, [t_eval], gamma, threshold, backend, workers)
        rows.append(SweepRow(float(f), float(t_eval), float(s.escape_mass[0]), float(s.escape_sem[0]),
                             float(s.indicator_fraction[0]), s.trials))
        meta = {k: v for k, v in s.metadata.items() if k != "f"}
    return SweepResult(rows, meta)
