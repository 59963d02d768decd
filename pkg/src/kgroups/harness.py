"""Replicated benchmark harness.

Runs seeded mixture experiments over a parameter sweep: every replicate
draws one data set (seed = base_seed + replicate), fits every requested
algorithm on that same draw, and scores the result against the generating
labels.  Per-replicate raw scores are always kept alongside the aggregated
means and standard errors, and emission to CSV/JSON is byte-deterministic.
"""

from __future__ import annotations

import csv
import io as _io
import json
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .charts import line_chart_svg
from .datagen import Component, MixtureSpec, generate
from .errors import InputError
from .indices import ContingencyTable, index_report
from .solver import FitConfig, fit

__all__ = [
    "ALGORITHMS",
    "DESIGNS",
    "SWEEP_PARAMS",
    "default_alpha",
    "design_mixture",
    "ExperimentSpec",
    "ReplicateRecord",
    "ResultTable",
    "ExperimentResult",
    "run_experiment",
    "emit_outputs",
    "table_from_csv",
    "records_from_csv",
]

ALGORITHMS = ("kgroups_first", "kgroups_second", "kmeans")
DESIGNS = ("normal", "lognormal", "cauchy", "cubic")
SWEEP_PARAMS = ("separation", "alpha", "dim")

_MODE_FOR = {
    "kgroups_first": "first_variation",
    "kgroups_second": "second_variation",
    "kmeans": "kmeans_alpha2",
}

SCHEMA_VERSION = 1

# Wall-clock fields are volatile: they live on the in-memory objects and in
# the timings sidecar, but stay out of the byte-deterministic artifacts.
TABLE_COLUMNS = (
    "algorithm",
    "sweep_value",
    "reps",
    "failures",
    "diag_mean",
    "diag_se",
    "kappa_mean",
    "kappa_se",
    "rand_mean",
    "rand_se",
    "crand_mean",
    "crand_se",
)

RAW_COLUMNS = (
    "sweep_value",
    "replicate",
    "seed",
    "draw_checksum",
    "algorithm",
    "diag",
    "kappa",
    "rand",
    "crand",
    "failed",
    "error",
)

TIMING_COLUMNS = ("sweep_value", "replicate", "algorithm", "runtime_s")


def default_alpha(design: str) -> float:
    """Distance exponent policy: 0.5 for the heavy-tailed cauchy design
    (finite moments demand alpha < 1 there), 1.0 everywhere else."""
    return 0.5 if design == "cauchy" else 1.0


def design_mixture(design, *, separation=3.0, dim=1, n=200, seed=0) -> MixtureSpec:
    """Two-component benchmark mixture for one of the named designs.

    normal/lognormal/cauchy: equal-weight location mixtures with the second
    component shifted by `separation`.  cubic: equal-weight uniform cubes
    [0,1]^dim vs [0.3,0.7]^dim (separation is ignored).
    """
    if design not in DESIGNS:
        raise InputError(f"unknown design {design!r}, expected one of {DESIGNS}")
    if design == "cubic":
        comps = (
            Component(0.5, "cubic_uniform", (0.0, 1.0)),
            Component(0.5, "cubic_uniform", (0.3, 0.7)),
        )
        return MixtureSpec(components=comps, dim=int(dim), n=int(n), seed=int(seed))
    family = {"normal": "normal", "lognormal": "lognormal", "cauchy": "cauchy"}[design]
    comps = (
        Component(0.5, family, (0.0, 1.0)),
        Component(0.5, family, (float(separation), 1.0)),
    )
    return MixtureSpec(components=comps, dim=int(dim), n=int(n), seed=int(seed))


@dataclass(frozen=True)
class ExperimentSpec:
    """One benchmark: a design, a sweep, algorithms, and replicate budget."""

    design: str
    sweep_param: str
    sweep_values: tuple
    algorithms: tuple = ALGORITHMS
    reps: int = 100
    base_seed: int = 0
    n: int = 200
    k: int = 2
    alpha: float | None = None  # None -> default_alpha(design) for k-groups
    separation: float = 3.0
    dim: int = 1
    restarts: int = 5
    max_passes: int = 50

    def __post_init__(self):
        if self.design not in DESIGNS:
            raise InputError(f"unknown design {self.design!r}")
        if self.sweep_param not in SWEEP_PARAMS:
            raise InputError(f"unknown sweep parameter {self.sweep_param!r}")
        vals = tuple(float(v) for v in self.sweep_values)
        if not vals:
            raise InputError("sweep_values must be nonempty")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise InputError("sweep_values must be strictly increasing")
        object.__setattr__(self, "sweep_values", vals)
        algos = tuple(self.algorithms)
        if not algos:
            raise InputError("algorithms must be nonempty")
        unknown = [a for a in algos if a not in ALGORITHMS]
        if unknown:
            raise InputError(f"unknown algorithms {unknown}, expected from {ALGORITHMS}")
        if len(set(algos)) != len(algos):
            raise InputError("algorithms must be unique")
        object.__setattr__(self, "algorithms", algos)
        if self.reps < 1:
            raise InputError("reps must be at least 1")
        if self.sweep_param == "alpha" and (vals[0] <= 0 or vals[-1] > 2):
            raise InputError("alpha sweep values must lie in (0, 2]")

    def meta(self) -> dict:
        d = asdict(self)
        d["sweep_values"] = list(self.sweep_values)
        d["algorithms"] = list(self.algorithms)
        return d


@dataclass(frozen=True)
class ReplicateRecord:
    """Raw scores for one (sweep value, replicate, algorithm) cell."""

    sweep_value: float
    replicate: int
    seed: int
    draw_checksum: int
    algorithm: str
    diag: float | None
    kappa: float | None
    rand: float | None
    crand: float | None
    runtime_s: float | None
    failed: bool = False
    error: str = ""


@dataclass
class ResultTable:
    """Aggregated index means and standard errors per (algorithm, sweep value).

    Rows carry a volatile `runtime_mean_s` alongside the score columns;
    equality covers only the persistent content (meta plus score columns),
    since wall-clock timings differ run to run by nature.
    """

    meta: dict
    rows: list

    @staticmethod
    def _persistent(row):
        return {k: row.get(k) for k in TABLE_COLUMNS}

    def __eq__(self, other):
        return (
            isinstance(other, ResultTable)
            and self.meta == other.meta
            and [self._persistent(r) for r in self.rows]
            == [self._persistent(r) for r in other.rows]
        )


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    table: ResultTable
    records: list = field(default_factory=list)


def _mixture_for(spec: ExperimentSpec, value: float, seed: int) -> MixtureSpec:
    separation = spec.separation
    dim = spec.dim
    if spec.sweep_param == "separation":
        separation = value
    elif spec.sweep_param == "dim":
        dim = int(value)
        if dim != value:
            raise InputError(f"dim sweep values must be integers, got {value}")
    return design_mixture(
        spec.design, separation=separation, dim=dim, n=spec.n, seed=seed
    )


def _alpha_for(spec: ExperimentSpec, algorithm: str, value: float) -> float:
    if algorithm == "kmeans":
        return 2.0
    if spec.sweep_param == "alpha":
        return value
    if spec.alpha is not None:
        return spec.alpha
    return default_alpha(spec.design)


def _run_replicate(spec: ExperimentSpec, value: float, b: int) -> list:
    """All algorithm scores for one replicate (picklable for worker pools)."""
    seed = spec.base_seed + b
    sample = generate(_mixture_for(spec, value, seed))
    checksum = zlib.crc32(sample.data.tobytes())
    records = []
    for algorithm in spec.algorithms:
        cfg = FitConfig(
            k=spec.k,
            alpha=_alpha_for(spec, algorithm, value),
            restarts=spec.restarts,
            max_passes=spec.max_passes,
            rng_seed=seed,
            mode=_MODE_FOR[algorithm],
        )
        start = time.perf_counter()
        try:
            result = fit(sample.data, cfg)
            elapsed = time.perf_counter() - start
            table = ContingencyTable.from_labels(sample.truth, result.partition.labels)
            rep = index_report(table)
            records.append(
                ReplicateRecord(
                    sweep_value=value,
                    replicate=b,
                    seed=seed,
                    draw_checksum=checksum,
                    algorithm=algorithm,
                    diag=rep.diag,
                    kappa=rep.kappa,
                    rand=rep.rand,
                    crand=rep.crand,
                    runtime_s=elapsed,
                )
            )
        except Exception as exc:  # recorded as a missing cell, never dropped
            records.append(
                ReplicateRecord(
                    sweep_value=value,
                    replicate=b,
                    seed=seed,
                    draw_checksum=checksum,
                    algorithm=algorithm,
                    diag=None,
                    kappa=None,
                    rand=None,
                    crand=None,
                    runtime_s=None,
                    failed=True,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return records


def _mean_se(values):
    if not values:
        return None, None
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, None
    se = float(arr.std(ddof=1) / np.sqrt(arr.size))
    return mean, se


def _aggregate(spec: ExperimentSpec, records: list) -> ResultTable:
    rows = []
    for value in spec.sweep_values:
        for algorithm in spec.algorithms:
            cell = [
                r
                for r in records
                if r.sweep_value == value and r.algorithm == algorithm
            ]
            ok = [r for r in cell if not r.failed]
            row = {"algorithm": algorithm, "sweep_value": value}
            row["reps"] = len(cell)
            row["failures"] = len(cell) - len(ok)
            for name in ("diag", "kappa", "rand", "crand"):
                mean, se = _mean_se([getattr(r, name) for r in ok])
                row[f"{name}_mean"] = mean
                row[f"{name}_se"] = se
            runtime_mean, _ = _mean_se([r.runtime_s for r in ok])
            row["runtime_mean_s"] = runtime_mean
            rows.append(row)
    meta = spec.meta()
    meta["schema_version"] = SCHEMA_VERSION
    return ResultTable(meta=meta, rows=rows)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Run the full sweep x replicate grid and aggregate the scores.

    Fully deterministic for a fixed spec, independent of `workers`: each
    replicate derives everything from base_seed + replicate index, and
    results are reduced in (sweep value, replicate) order.
    """
    jobs = [(value, b) for value in spec.sweep_values for b in range(spec.reps)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(
                pool.map(
                    _run_replicate,
                    [spec] * len(jobs),
                    [v for v, _ in jobs],
                    [b for _, b in jobs],
                    chunksize=max(1, len(jobs) // (4 * workers)),
                )
            )
    else:
        chunks = [_run_replicate(spec, v, b) for v, b in jobs]
    records = [r for chunk in chunks for r in chunk]
    return ExperimentResult(spec=spec, table=_aggregate(spec, records), records=records)


# ---------------------------------------------------------------------------
# Emission


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _table_csv_text(table: ResultTable) -> str:
    buf = _io.StringIO()
    buf.write("#meta=" + json.dumps(table.meta, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    for row in table.rows:
        writer.writerow([_cell(row[c]) for c in TABLE_COLUMNS])
    return buf.getvalue()


def table_from_csv(text: str) -> ResultTable:
    """Parse `_table_csv_text` output back into an equal ResultTable.

    The parsed rows have no runtime column (timings are not part of the
    persistent artifact), which is exactly what ResultTable equality
    compares.
    """
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#meta="):
        raise InputError("result-table CSV is missing its #meta header")
    meta = json.loads(lines[0][len("#meta=") :])
    reader = csv.reader(lines[1:])
    header = next(reader)
    if tuple(header) != TABLE_COLUMNS:
        raise InputError(f"unexpected result-table columns: {header}")
    int_cols = {"reps", "failures"}
    str_cols = {"algorithm"}
    rows = []
    for rec in reader:
        row = {}
        for name, cell in zip(TABLE_COLUMNS, rec):
            if name in str_cols:
                row[name] = cell
            elif cell == "":
                row[name] = None
            elif name in int_cols:
                row[name] = int(cell)
            else:
                row[name] = float(cell)
        rows.append(row)
    return ResultTable(meta=meta, rows=rows)


def _raw_csv_text(records: list) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RAW_COLUMNS)
    for r in records:
        writer.writerow([_cell(getattr(r, c)) for c in RAW_COLUMNS])
    return buf.getvalue()


def records_from_csv(text: str) -> list:
    """Parse `_raw_csv_text` output back into ReplicateRecord objects.

    `runtime_s` is None on parsed records: timings live in the separate
    timings sidecar, not in the persistent raw-score file.
    """
    reader = csv.reader(text.splitlines())
    header = next(reader)
    if tuple(header) != RAW_COLUMNS:
        raise InputError(f"unexpected raw-score columns: {header}")
    out = []
    for rec in reader:
        d = dict(zip(RAW_COLUMNS, rec))
        out.append(
            ReplicateRecord(
                sweep_value=float(d["sweep_value"]),
                replicate=int(d["replicate"]),
                seed=int(d["seed"]),
                draw_checksum=int(d["draw_checksum"]),
                algorithm=d["algorithm"],
                diag=None if d["diag"] == "" else float(d["diag"]),
                kappa=None if d["kappa"] == "" else float(d["kappa"]),
                rand=None if d["rand"] == "" else float(d["rand"]),
                crand=None if d["crand"] == "" else float(d["crand"]),
                runtime_s=None,
                failed=d["failed"] == "true",
                error=d["error"],
            )
        )
    return out


def _json_text(result: ExperimentResult) -> str:
    rows = [{k: row.get(k) for k in TABLE_COLUMNS} for row in result.table.rows]
    raw = [{k: getattr(r, k) for k in RAW_COLUMNS} for r in result.records]
    payload = {
        "schema_version": SCHEMA_VERSION,
        "meta": result.table.meta,
        "rows": rows,
        "raw": raw,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _timings_csv_text(result: ExperimentResult) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TIMING_COLUMNS)
    for r in result.records:
        writer.writerow([_cell(getattr(r, c)) for c in TIMING_COLUMNS])
    return buf.getvalue()


def _svg_text(result: ExperimentResult) -> str:
    spec = result.spec
    series = []
    for algorithm in spec.algorithms:
        xs, ys = [], []
        for row in result.table.rows:
            if row["algorithm"] == algorithm and row["crand_mean"] is not None:
                xs.append(row["sweep_value"])
                ys.append(row["crand_mean"])
        series.append((algorithm, xs, ys))
    return line_chart_svg(
        series,
        title=f"{spec.design} mixture: mean corrected Rand vs {spec.sweep_param}",
        x_label=spec.sweep_param,
        y_label="mean cRand",
    )


def emit_outputs(result: ExperimentResult, out_dir, formats=("csv", "json", "svg"), prefix="experiment") -> dict:
    """Write the experiment outputs; returns {kind: path}.

    Raw per-replicate scores are always persisted next to whichever formats
    were requested, and every artifact except the wall-clock timings
    sidecar is byte-identical across repeated runs of the same spec.
    """
    formats = tuple(formats)
    unknown = [f for f in formats if f not in ("csv", "json", "svg")]
    if unknown:
        raise InputError(f"unknown output formats {unknown}")
    if not formats:
        raise InputError("at least one output format is required")
    if not result.table.rows:
        raise InputError("refusing to emit an empty result table")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    raw_path = out / f"{prefix}_replicates.csv"
    raw_path.write_text(_raw_csv_text(result.records))
    paths["raw"] = raw_path
    timings_path = out / f"{prefix}_timings.csv"
    timings_path.write_text(_timings_csv_text(result))
    paths["timings"] = timings_path
    if "csv" in formats:
        p = out / f"{prefix}_table.csv"
        p.write_text(_table_csv_text(result.table))
        paths["csv"] = p
    if "json" in formats:
        p = out / f"{prefix}.json"
        p.write_text(_json_text(result))
        paths["json"] = p
    if "svg" in formats:
        p = out / f"{prefix}_crand.svg"
        p.write_text(_svg_text(result))
        paths["svg"] = p
    return paths
