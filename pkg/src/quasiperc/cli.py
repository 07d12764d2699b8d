"""Command-line front end.

Every flag can also be given in a flat ``key = value`` config file using the
flag name without dashes (``t-stop = 200``). Flags override the file, the
file overrides defaults, and unknown keys are rejected.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import AccuracyError, ConfigError, QuasipercError, ResourceLimitError
from .lattice import Family, build_patch, classify_vertices
from .lattice.zones import make_zone
from .percolation import ensemble, resolve_origin, sweep_fraction, time_grid
from .spectral import evolve_series, laplacian, localized_state, probabilities

log = logging.getLogger("quasiperc")

MODES = ("dump-distribution", "timeseries", "sweep", "patch-export")
BACKENDS = ("auto", "dense", "chebyshev")
EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_RESOURCE, EXIT_ACCURACY = 0, 1, 2, 3, 4


@dataclass
class ExperimentConfig:
    family: str = "square"
    size: int = 30
    iterations: int = 3
    origin: str = "center"
    zone: int = 40
    gamma: float = 1.0
    threshold: float = 0.02
    t_start: float = 0.0
    t_stop: float = 200.0
    t_step: float = 1.0
    times: list[float] | None = None
    fractions: list[float] = field(default_factory=lambda: [0.0])
    trials: int = 50
    seed: int = 0
    mode: str = "timeseries"
    out: str = "out"
    backend: str = "auto"
    workers: int = 1

    def validate(self) -> ExperimentConfig:
        try:
            self.family = Family.parse(self.family).value
        except ValueError:
            raise ConfigError("family", f"unknown lattice family {self.family!r}") from None
        checks = [
            ("size", self.size >= 1, "must be >= 1"),
            ("iterations", self.iterations >= 0, "must be >= 0"),
            ("gamma", self.gamma > 0 and math.isfinite(self.gamma), "must be positive"),
            ("threshold", 0 < self.threshold < 1, "must lie in (0, 1)"),
            ("t-start", self.t_start >= 0, "must be >= 0"),
            ("t-stop", self.t_stop >= self.t_start, "must be >= t-start"),
            ("t-step", self.t_step > 0, "must be positive"),
            ("trials", self.trials >= 1, "must be >= 1"),
            ("seed", 0 <= self.seed < 2 ** 64, "must be a 64-bit unsigned integer"),
            ("mode", self.mode in MODES, f"must be one of {', '.join(MODES)}"),
            ("backend", self.backend in BACKENDS, f"must be one of {', '.join(BACKENDS)}"),
            ("workers", self.workers >= 1, "must be >= 1"),
            ("fractions", len(self.fractions) > 0 and all(0 <= f <= 1 for f in self.fractions),
             "must be a nonempty list of values in [0, 1]"),
        ]
        if self.zone < 0:
            raise ConfigError("zone_radius", f"hop-zone radius (--zone) must be >= 0 (got {self.zone!r})")
        for key, ok, msg in checks:
            if not ok:
                raise ConfigError(key, f"{msg} (got {getattr(self, key.replace('-', '_'))!r})")
        if self.times is not None and any(t < 0 for t in self.times):
            raise ConfigError("times", "must be nonnegative")
        if self.mode == "sweep" and self.t_stop <= 0:
            raise ConfigError("t-stop", "sweep evaluates at t-stop, which must be positive")
        return self

    def time_points(self) -> np.ndarray:
        if self.times is not None:
            return np.array(sorted(self.times), dtype=float)
        return time_grid(self.t_stop, self.t_step, self.t_start)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, list):
                v = ",".join(repr(float(x)) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name.replace('_', '-')} = {v}")
        return "\n".join(lines) + "\n"


_ALIASES = {"zone-radius": "zone"}
_FIELDS = {f.name.replace("_", "-"): f for f in fields(ExperimentConfig)}


def _convert(key: str, raw: Any) -> Any:
    f = _FIELDS[key]
    kind = str(f.type)
    try:
        if isinstance(raw, str):
            raw = raw.strip()
        if kind.startswith("list") or "list[float]" in kind:
            if isinstance(raw, (list, tuple)):
                return [float(x) for x in raw]
            return [float(x) for x in str(raw).split(",") if x.strip()]
        if kind == "int":
            try:
                return int(raw)
            except ValueError:
                value = float(raw)
                if not value.is_integer():
                    raise
                return int(value)
        if kind == "float":
            return float(raw)
        return str(raw)
    except (TypeError, ValueError):
        raise ConfigError(key, f"cannot parse {raw!r} as {kind}") from None


def read_config_file(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    values: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key.replace("_", "-"), key.replace("_", "-"))
        if key not in _FIELDS:
            raise ConfigError(key, "unknown configuration key")
        values[key] = _convert(key, raw)
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise ConfigError("argv", message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quasiperc", allow_abbrev=False,
                description="CTQW quantum percolation on square and quasicrystal lattices")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--mode", help=f"one of {', '.join(MODES)}")
    p.add_argument("--family", help="square | ammann-beenker | penrose")
    p.add_argument("--size", help="square side length n (n x n vertices)")
    p.add_argument("--iterations", help="substitution iterations for quasicrystals")
    p.add_argument("--origin", help="'center', an interior class label, or a vertex id")
    p.add_argument("--zone", help="hop-zone radius (default 40)")
    p.add_argument("--gamma", help="hopping rate (default 1)")
    p.add_argument("--threshold", help="percolation threshold on escape mass (default 0.02)")
    p.add_argument("--t-start", dest="t_start")
    p.add_argument("--t-stop", dest="t_stop", help="last time; also the sweep evaluation time (default 200)")
    p.add_argument("--t-step", dest="t_step")
    p.add_argument("--times", help="explicit comma-separated times (overrides the grid)")
    p.add_argument("--fractions", help="comma-separated edge disconnection fractions")
    p.add_argument("--trials", help="realizations per fraction (default 50)")
    p.add_argument("--seed", help="base seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--backend", help="auto | dense | chebyshev")
    p.add_argument("--workers", help="threads for trials")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_config(argv: Sequence[str] | None = None) -> ExperimentConfig:
    args = build_parser().parse_args(argv)
    values: dict[str, Any] = {}
    if args.config:
        values.update(read_config_file(args.config))
    for key in _FIELDS:
        raw = getattr(args, key.replace("-", "_"), None)
        if raw is not None:
            values[key] = _convert(key, raw)
    cfg = ExperimentConfig(**{k.replace("-", "_"): v for k, v in values.items()})
    return cfg.validate()


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _time_tag(t: float) -> str:
    return _fmt(t).replace(".", "p").replace("-", "m")


def _write(path: Path, text: str, written: list[Path]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    written.append(path)
    path.write_text(text, encoding="utf-8", newline="")


def run(cfg: ExperimentConfig) -> dict[str, str]:
    """Execute ``cfg``; returns artifact name -> sha256. Removes partial output on failure."""
    out = Path(cfg.out)
    written: list[Path] = []
    try:
        artifacts = _dispatch(cfg, out, written)
        manifest = {
            "config": asdict(cfg),
            "config_text": cfg.to_text(),
            "artifacts": artifacts,
        }
        _write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n", written)
        return artifacts
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise


def _dispatch(cfg: ExperimentConfig, out: Path, written: list[Path]) -> dict[str, str]:
    patch = build_patch(cfg.family, size=cfg.size, iterations=cfg.iterations)
    origin = cfg.origin if cfg.origin == "center" or not cfg.origin.isdigit() else int(cfg.origin)
    log.info("patch %s: %d vertices, %d edges", cfg.family, patch.n_vertices, patch.n_edges)
    files: dict[str, str] = {}

    def emit(name: str, text: str) -> None:
        _write(out / name, text, written)
        files[name] = hashlib.sha256(text.encode("utf-8")).hexdigest()

    if cfg.mode == "patch-export":
        classes = [c.label for c in classify_vertices(patch)]
        emit("patch.json", patch.to_json(classes))
    elif cfg.mode == "dump-distribution":
        v, _ = resolve_origin(patch, origin)
        h = laplacian(patch, cfg.gamma)
        times = cfg.time_points()
        states = evolve_series(h, localized_state(patch.n_vertices, v), times, backend=cfg.backend)
        for t, state in zip(times, states):
            prob = probabilities(state)
            rows = ["vertex_id,x,y,probability"]
            rows += [f"{i},{x!r},{y!r},{p:.15e}" for i, ((x, y), p) in enumerate(zip(patch.positions.tolist(), prob))]
            emit(f"distribution_t{_time_tag(t)}.csv", "\n".join(rows) + "\n")
    elif cfg.mode == "timeseries":
        make_zone(patch, resolve_origin(patch, origin)[0], cfg.zone)  # fail fast on bad radius
        for f in cfg.fractions:
            series = ensemble(patch, origin, cfg.zone, f, cfg.trials, cfg.seed, cfg.time_points(),
                              cfg.gamma, cfg.threshold, cfg.backend, cfg.workers)
            emit(f"timeseries_f{_time_tag(f)}.csv", series.to_csv())
    else:
        result = sweep_fraction(patch, origin, cfg.zone, cfg.fractions, cfg.trials, cfg.seed, cfg.t_stop,
                                cfg.gamma, cfg.threshold, cfg.backend, cfg.workers)
        emit("sweep.csv", result.to_csv())
    return files


def _error_line(kind: str, exc: BaseException, key: str | None = None) -> str:
    doc = {"error": kind, "message": str(exc)}
    if key:
        doc["key"] = key
    return json.dumps(doc, sort_keys=True)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO if ("-v" in argv or "--verbose" in argv) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(argv)
        artifacts = run(cfg)
    except ConfigError as exc:
        print(_error_line("config", exc, exc.key), file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(_error_line("resource-limit", exc), file=sys.stderr)
        return EXIT_RESOURCE
    except AccuracyError as exc:
        print(_error_line("accuracy", exc), file=sys.stderr)
        return EXIT_ACCURACY
    except QuasipercError as exc:
        print(_error_line("invalid-parameter", exc), file=sys.stderr)
        return EXIT_CONFIG
    for name in sorted(artifacts):
        print(Path(cfg.out) / name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
