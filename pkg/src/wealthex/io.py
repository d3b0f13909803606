"""Text formats: density and trace CSVs, JSON run manifests.

Reals are written with 17 significant digits, which round-trips float64.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import FitReport
from .errors import (
    GridError,
    MalformedRowError,
    MissingFieldError,
    NegativeDensityError,
    NonUniformSpacingError,
    SchemaVersionError,
)
from .fixed_point import IterationRecord, IterationTrace
from .grid import DensityField, Grid

SCHEMA_VERSION = 1
TRACE_COLUMNS = ("n", "l1_prev", "l1_exp", "mass", "mean", "entropy", "sup_prev", "kl_exp")
# relative slack when checking that the x column is evenly spaced
SPACING_RTOL = 1e-9


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_density_csv(f: DensityField, path) -> None:
    lines = ["x,f"]
    lines += [f"{fmt(x)},{fmt(v)}" for x, v in zip(f.x, f.values)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_density_csv(path) -> DensityField:
    text = Path(path).read_text().splitlines()
    if not text or text[0].strip().replace(" ", "") != "x,f":
        raise MalformedRowError(1, "expected header 'x,f'")
    xs, fs = [], []
    for lineno, line in enumerate(text[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise MalformedRowError(lineno, f"expected 2 columns, got {len(parts)}")
        try:
            x, v = float(parts[0]), float(parts[1])
        except ValueError:
            raise MalformedRowError(lineno, f"cannot parse numbers from {line!r}") from None
        if not (math.isfinite(x) and math.isfinite(v)):
            raise MalformedRowError(lineno, "non-finite value")
        if v < 0:
            raise NegativeDensityError(lineno, v, where="row")
        xs.append(x)
        fs.append(v)
    if len(xs) < 2:
        raise MalformedRowError(len(text), "need at least two data rows")
    x = np.array(xs)
    if x[0] != 0.0:
        raise NonUniformSpacingError(f"grid must start at x=0, found {x[0]!r}")
    bad = np.abs(x - np.linspace(0.0, x[-1], x.size)) > SPACING_RTOL * abs(x[-1])
    if np.any(bad):
        row = int(np.argmax(bad)) + 2
        raise NonUniformSpacingError(f"x column is not evenly spaced (first deviation at line {row})")
    try:
        g = Grid(float(x[-1]), len(xs))
    except GridError as exc:
        raise MalformedRowError(len(text), str(exc)) from None
    return DensityField(g, np.array(fs))


def write_trace(t: IterationTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for r in t.records:
            w.writerow([r.n] + [fmt(getattr(r, c)) for c in TRACE_COLUMNS[1:]])


def read_trace(path) -> list[IterationRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0][: len(TRACE_COLUMNS[:6])]) != TRACE_COLUMNS[:6]:
        raise MalformedRowError(1, f"expected trace header starting with {','.join(TRACE_COLUMNS[:6])}")
    header = rows[0]
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise MalformedRowError(lineno, f"expected {len(header)} columns, got {len(row)}")
        try:
            vals = dict(zip(header, row))
            out.append(
                IterationRecord(
                    n=int(vals["n"]),
                    **{c: float(vals[c]) for c in header[1:] if c in TRACE_COLUMNS},
                )
            )
        except ValueError:
            raise MalformedRowError(lineno, "cannot parse trace row") from None
    return out


# --- manifests ---------------------------------------------------------------

_REQUIRED = ("schema_version", "artifact_version", "command", "config", "seed", "started", "finished", "status", "fit")


@dataclass
class RunManifest:
    command: str
    config: dict
    status: str
    started: str
    finished: str
    seed: int | None = None
    fit: FitReport | None = None
    extra: dict = field(default_factory=dict)
    artifact_version: str = __version__
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "artifact_version": self.artifact_version,
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "started": self.started,
            "finished": self.finished,
            "status": self.status,
            "fit": None if self.fit is None else self.fit.to_dict(),
            "extra": self.extra,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        if "schema_version" not in d:
            raise MissingFieldError("schema_version")
        if d["schema_version"] != SCHEMA_VERSION:
            raise SchemaVersionError(d["schema_version"], SCHEMA_VERSION)
        for name in _REQUIRED:
            if name not in d:
                raise MissingFieldError(name)
        fit = d["fit"]
        return cls(
            command=d["command"],
            config=d["config"],
            status=d["status"],
            started=d["started"],
            finished=d["finished"],
            seed=d["seed"],
            fit=None if fit is None else FitReport.from_dict(fit),
            extra=d.get("extra", {}),
            artifact_version=d["artifact_version"],
            schema_version=d["schema_version"],
        )


def write_manifest(m: RunManifest, path) -> None:
    # json writes inf as Infinity, which json.loads reads back
    Path(path).write_text(json.dumps(m.to_dict(), indent=2, sort_keys=True) + "\n")


def read_manifest(path) -> RunManifest:
    return RunManifest.from_dict(json.loads(Path(path).read_text()))


def write_population_csv(wealths: np.ndarray, path) -> None:
    body = "\n".join(fmt(w) for w in np.asarray(wealths, dtype=float))
    Path(path).write_text("wealth\n" + body + "\n")


def read_population_csv(path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != "wealth":
        raise MalformedRowError(1, "expected header 'wealth'")
    out = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            w = float(line)
        except ValueError:
            raise MalformedRowError(lineno, f"cannot parse wealth {line!r}") from None
        if not math.isfinite(w) or w < 0:
            raise MalformedRowError(lineno, f"wealth must be finite and nonnegative, got {line!r}")
        out.append(w)
    return np.array(out)
