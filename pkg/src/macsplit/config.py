"""Run configuration: flat ``key = value`` files, presets, and CSV timeline output."""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import UsageError
from .field import Grid, MatrixField, read_snapshot
from .initial import ic_admissible, ic_random, ic_rotation, ic_structured
from .sim import SchemeParams, Timeline

IC_CHOICES = ("random", "admissible", "structured", "rotation", "snapshot")


@dataclass(frozen=True)
class RunConfig:
    d: int = 2
    n: int = 64
    length: float = 2 * math.pi
    m: int = 2
    tau: float = 0.1
    eps: float = 0.1
    mode: str = "physical"
    scheme: str = "strang"
    tmax: float = 1.0
    record_every: int = 1
    ic: str = "random"
    seed: int | None = 0
    ic_path: str = ""
    out: str = "out"
    snapshot_every: int = 0
    levels: int = 4
    samples: int = 100000

    def validate(self) -> "RunConfig":
        Grid(self.d, self.n, self.length)
        self.params()
        if self.m < 1:
            raise UsageError("m must be >= 1")
        if self.tmax < 0:
            raise UsageError("tmax must be >= 0")
        if self.record_every < 1:
            raise UsageError("record_every must be >= 1")
        if self.snapshot_every < 0:
            raise UsageError("snapshot_every must be >= 0")
        if self.ic not in IC_CHOICES:
            raise UsageError(f"ic must be one of {IC_CHOICES}, got {self.ic!r}")
        if self.ic in ("random", "admissible") and self.seed is None:
            raise UsageError("random initial data needs a seed")
        if self.ic == "snapshot" and not self.ic_path:
            raise UsageError("snapshot initial data needs ic_path")
        if self.levels < 2 or self.samples < 1:
            raise UsageError("levels must be >= 2 and samples >= 1")
        return self

    @property
    def grid(self) -> Grid:
        return Grid(self.d, self.n, self.length)

    def params(self) -> SchemeParams:
        return SchemeParams(self.tau, self.eps, self.mode, self.scheme)

    def initial_field(self) -> MatrixField:
        g = self.grid
        if self.ic == "random":
            return ic_random(g, self.m, self.seed)
        if self.ic == "admissible":
            return ic_admissible(g, self.m, self.seed)
        if self.ic == "structured":
            return ic_structured(g, self.m)
        if self.ic == "rotation":
            return ic_rotation(g, self.m)
        u, _ = read_snapshot(self.ic_path)
        if u.grid != g or u.m != self.m:
            raise UsageError(f"{self.ic_path}: snapshot grid/m disagree with the config")
        return u


PRESETS: dict[str, dict] = {
    # Strang vs thresholding on the flower data, rescaled time
    "ex-compare": dict(
        n=256, m=2, tau=0.01, eps=0.05, mode="rescaled", tmax=2.0, ic="structured", record_every=10
    ),
    # random data in [0, 0.1], unscaled equation
    "ex-random": dict(n=256, m=2, tau=0.1, eps=0.1, mode="physical", tmax=20.0, ic="random", seed=0),
    "converge-default": dict(
        n=32, m=2, tau=0.1, eps=0.5, mode="physical", tmax=0.5, ic="rotation", levels=4
    ),
}

_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, value: str):
    if key not in _TYPES:
        raise UsageError(f"unknown config key {key!r}")
    kind = _TYPES[key]
    try:
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        if kind == "int | None":
            return None if value.lower() in ("", "none") else int(value)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {value!r}") from exc
    return value


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = _coerce(key, value)
    return values


def load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)


def build_config(preset: str | None = None, file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults < preset < config file < flag overrides."""
    cfg = RunConfig()
    if preset is not None:
        if preset not in PRESETS:
            raise UsageError(f"unknown preset {preset!r}")
        cfg = replace(cfg, **PRESETS[preset])
    if file_values:
        cfg = replace(cfg, **file_values)
    if overrides:
        cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg.validate()


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for key, value in asdict(cfg).items():
        text = repr(value) if isinstance(value, float) else ("none" if value is None else str(value))
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


CSV_COLUMNS = ("t", "energy", "modified_energy", "max_frobenius", "max_abs_det", "h1_seminorm_sq")


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_timeline_csv(timeline: Timeline, path) -> None:
    try:
        with open(path, "w", newline="", encoding="ascii") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for rec in timeline.records:
                fh.write(",".join(_fmt(getattr(rec, c)) for c in CSV_COLUMNS) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write timeline {path}: {exc}") from exc


def read_timeline_csv(path) -> list[dict]:
    with open(path, newline="", encoding="ascii") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_series_csv(path, header: tuple[str, ...], rows) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(float(v)) for v in row) + "\n")
