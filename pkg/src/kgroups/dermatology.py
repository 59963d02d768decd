"""UCI dermatology case study: ingestion, standardization, clustering.

The raw file has 366 comma-separated records of 34 attributes plus a
disease class in 1..6; eight records are missing the age attribute
(marker "?").  Rows with any missing value are dropped, every attribute is
standardized to zero mean and unit standard deviation, and the six disease
classes become the ground-truth partition for a k=6 comparison of the
clustering algorithms.
"""

from __future__ import annotations

import hashlib
import os
import urllib.request
from pathlib import Path

import numpy as np

from .datagen import LabeledSample
from .errors import IngestionError, InputError
from .indices import ContingencyTable, index_report
from .solver import FitConfig, fit

__all__ = [
    "DERMATOLOGY_URL",
    "N_ATTRIBUTES",
    "load_dermatology",
    "fetch_dermatology",
    "find_dermatology",
    "run_dermatology",
]

DERMATOLOGY_URL = (
    "https://archive.ics.uci.edu/ml/machine-learning-databases/dermatology/dermatology.data"
)
N_ATTRIBUTES = 34
ENV_VAR = "KGROUPS_DERMATOLOGY_DATA"
_DEFAULT_PATHS = ("data/dermatology.data", "dermatology.data")


def load_dermatology(path, expected_sha256=None) -> LabeledSample:
    """Parse, filter, and standardize the dermatology data file.

    Rows containing any missing marker "?" are excluded (on the canonical
    UCI file that removes exactly the 8 records with missing age, leaving
    358).  Attributes are standardized columnwise to mean 0 and sample
    standard deviation 1; class codes map to 0-based truth labels.
    """
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    if expected_sha256:
        digest = hashlib.sha256(raw).hexdigest()
        if digest != expected_sha256.lower():
            raise IngestionError(
                f"{path}: sha256 {digest} does not match expected {expected_sha256}"
            )

    rows = []
    classes = []
    kept = 0
    for ln, line in enumerate(raw.decode("utf-8", errors="strict").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != N_ATTRIBUTES + 1:
            raise IngestionError(
                f"{path}: row {ln} has {len(fields)} fields, expected {N_ATTRIBUTES + 1}"
            )
        if any(f.strip() == "?" for f in fields):
            continue
        try:
            values = [float(f) for f in fields[:N_ATTRIBUTES]]
            cls = int(fields[N_ATTRIBUTES])
        except ValueError as exc:
            raise IngestionError(f"{path}: row {ln}: {exc}") from exc
        if cls < 1:
            raise IngestionError(f"{path}: row {ln} has class {cls}, expected >= 1")
        rows.append(values)
        classes.append(cls)
        kept += 1
    if kept < 2:
        raise IngestionError(f"{path}: only {kept} usable rows")

    x = np.asarray(rows, dtype=np.float64)
    mean = x.mean(axis=0)
    sd = x.std(axis=0, ddof=1)
    flat = np.flatnonzero(sd == 0)
    if flat.size:
        raise IngestionError(
            f"{path}: column {int(flat[0]) + 1} is constant and cannot be standardized"
        )
    z = (x - mean) / sd
    _, truth = np.unique(np.asarray(classes), return_inverse=True)
    return LabeledSample(data=z, truth=truth.astype(np.intp))


def fetch_dermatology(dest, url=DERMATOLOGY_URL, timeout=60) -> Path:
    """Download the raw data file to `dest` (network required)."""
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            dest.write_bytes(resp.read())
    except OSError as exc:
        raise IngestionError(f"could not fetch {url}: {exc}") from exc
    return dest


def find_dermatology() -> Path | None:
    """Locate a local copy: $KGROUPS_DERMATOLOGY_DATA, then ./data/, then cwd."""
    env = os.environ.get(ENV_VAR)
    candidates = ([env] if env else []) + list(_DEFAULT_PATHS)
    for c in candidates:
        p = Path(c)
        if p.is_file():
            return p
    return None


def run_dermatology(
    sample: LabeledSample,
    algorithms=("kgroups_first", "kgroups_second", "kmeans"),
    restarts=20,
    seed=0,
    alpha=1.0,
    max_passes=50,
) -> dict:
    """Fit each algorithm with k=6 and score it against the disease classes."""
    from .harness import _MODE_FOR  # avoid a module cycle at import time

    k = int(np.max(sample.truth)) + 1
    reports = {}
    for algorithm in algorithms:
        if algorithm not in _MODE_FOR:
            raise InputError(f"unknown algorithm {algorithm!r}")
        cfg = FitConfig(
            k=k,
            alpha=2.0 if algorithm == "kmeans" else alpha,
            restarts=restarts,
            max_passes=max_passes,
            rng_seed=seed,
            mode=_MODE_FOR[algorithm],
        )
        result = fit(sample.data, cfg)
        table = ContingencyTable.from_labels(sample.truth, result.partition.labels)
        reports[algorithm] = index_report(table)
    return reports
