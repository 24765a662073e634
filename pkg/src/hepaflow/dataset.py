"""ILPD ingestion: CSV parsing, schema validation, target binarization.

The raw file carries eleven columns (Age, Gender, TB, DB, Alkphos, Sgpt,
Sgot, TP, ALB, A/G, Target). Loading drops the categorical Gender column,
maps the raw target (1 = liver disease, 2 = no disease) onto {1, 0} with
disease as the positive class, and records missing A/G cells as NaN for the
imputation stage. Missing values in any other column are an error.

Header matching is case- and punctuation-insensitive and accepts the common
aliases found in public copies of the file; a headerless file is assumed to
be in schema order.
"""

from __future__ import annotations

import csv
import importlib.resources
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

RAW_COLUMNS = ("Age", "Gender", "TB", "DB", "Alkphos", "Sgpt", "Sgot", "TP", "ALB", "A/G", "Target")
FEATURE_COLUMNS = ("Age", "TB", "DB", "Alkphos", "Sgpt", "Sgot", "TP", "ALB", "A/G")

_ALIASES = {
    "Age": {"age"},
    "Gender": {"gender", "sex"},
    "TB": {"tb", "totalbilirubin", "totbilirubin"},
    "DB": {"db", "directbilirubin"},
    "Alkphos": {"alkphos", "alkalinephosphotase", "alkalinephosphatase", "alp"},
    "Sgpt": {"sgpt", "alamineaminotransferase", "alt"},
    "Sgot": {"sgot", "aspartateaminotransferase", "ast"},
    "TP": {"tp", "totalprotiens", "totalproteins"},
    "ALB": {"alb", "albumin"},
    "A/G": {"ag", "agratio", "albuminandglobulinratio", "albuminglobulinratio"},
    "Target": {"target", "dataset", "selector", "class", "ispatient", "result", "label"},
}

_MISSING_TOKENS = {"", "na", "nan", "null", "?"}


@dataclass
class Dataset:
    """Numeric feature matrix, binary labels, and feature names."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: list[str] = field(default_factory=lambda: list(FEATURE_COLUMNS))

    def __post_init__(self):
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        self.labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {self.features.shape}")
        if self.features.shape[0] != self.labels.shape[0]:
            raise DataError(
                f"{self.features.shape[0]} feature rows vs {self.labels.shape[0]} labels"
            )
        if self.labels.size and not np.isin(self.labels, (0, 1)).all():
            raise DataError("labels must be 0/1")
        if len(self.feature_names) != self.features.shape[1]:
            raise DataError("feature_names length must match feature count")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def copy(self) -> "Dataset":
        return Dataset(self.features.copy(), self.labels.copy(), list(self.feature_names))

    def take(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], list(self.feature_names))


def _normalize(name: str) -> str:
    return "".join(ch for ch in name.lower() if ch.isalnum())


def _match_header(cells: list[str]) -> dict[str, int] | None:
    """Map canonical column names to positions, or None if not a header row."""
    normalized = [_normalize(c) for c in cells]
    positions: dict[str, int] = {}
    for canonical, aliases in _ALIASES.items():
        hits = [i for i, cell in enumerate(normalized) if cell in aliases]
        if len(hits) > 1:
            raise DataError(f"duplicate column for {canonical!r} in header")
        if hits:
            positions[canonical] = hits[0]
    if not positions:
        return None
    if len(positions) != len(RAW_COLUMNS):
        missing = [c for c in RAW_COLUMNS if c not in positions]
        unknown = [cells[i] for i in range(len(cells)) if i not in positions.values()]
        raise DataError(f"header missing columns {missing}, unrecognized {unknown}")
    if len(cells) != len(RAW_COLUMNS):
        raise DataError(f"expected {len(RAW_COLUMNS)} columns, header has {len(cells)}")
    return positions


def _parse_cell(text: str, column: str, row: int) -> float:
    token = text.strip()
    if token.lower() in _MISSING_TOKENS:
        if column == "A/G":
            return math.nan
        raise DataError(f"missing value in column {column!r} at row {row}")
    try:
        return float(token)
    except ValueError:
        raise DataError(
            f"non-numeric cell {token!r} in column {column!r} at row {row}"
        ) from None


def load_ilpd(path) -> tuple[Dataset, dict[str, int]]:
    """Load and validate an ILPD CSV.

    Returns the dataset (Gender dropped, target binarized with disease = 1)
    and a per-column missing-value report. Row numbers in error messages are
    1-based data rows (the header, when present, is row 0).
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    if not rows:
        raise DataError(f"{path}: empty file")

    positions = _match_header(rows[0])
    data_rows = rows[1:] if positions is not None else rows
    if positions is None:
        positions = {name: i for i, name in enumerate(RAW_COLUMNS)}
    if not data_rows:
        raise DataError(f"{path}: no data rows")

    n = len(data_rows)
    features = np.empty((n, len(FEATURE_COLUMNS)), dtype=np.float64)
    labels = np.empty(n, dtype=np.int64)
    missing = {name: 0 for name in FEATURE_COLUMNS}

    for r, row in enumerate(data_rows, start=1):
        if len(row) != len(RAW_COLUMNS):
            raise DataError(f"row {r}: expected {len(RAW_COLUMNS)} cells, got {len(row)}")
        for c, name in enumerate(FEATURE_COLUMNS):
            value = _parse_cell(row[positions[name]], name, r)
            if math.isnan(value):
                missing[name] += 1
            features[r - 1, c] = value
        raw_label = _parse_cell(row[positions["Target"]], "Target", r)
        if raw_label == 1.0:
            labels[r - 1] = 1
        elif raw_label == 2.0:
            labels[r - 1] = 0
        else:
            raise DataError(f"row {r}: Target value {raw_label:g} outside {{1, 2}}")

    return Dataset(features, labels), missing


def class_counts(d: Dataset) -> tuple[int, int]:
    """(count of label 0, count of label 1)."""
    ones = int(d.labels.sum())
    return d.n_rows - ones, ones


def dump_csv(d: Dataset, path) -> None:
    """Debug dump: features + label with round-trip-exact float formatting."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(d.feature_names) + ["label"])
        for i in range(d.n_rows):
            cells = [
                "NA" if math.isnan(v) else repr(v) for v in d.features[i].tolist()
            ]
            writer.writerow(cells + [str(int(d.labels[i]))])


def load_feature_csv(path) -> Dataset:
    """Load a dataset written by :func:`dump_csv` or the ``simulate`` command
    (arbitrary numeric feature columns, label column last)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    if len(rows) < 2:
        raise DataError(f"{path}: expected a header and at least one data row")
    header = [c.strip() for c in rows[0]]
    if _normalize(header[-1]) not in ("label", "target", "y"):
        raise DataError(f"{path}: last column must be the label, got {header[-1]!r}")
    names = header[:-1]
    n = len(rows) - 1
    features = np.empty((n, len(names)), dtype=np.float64)
    labels = np.empty(n, dtype=np.int64)
    for r, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise DataError(f"row {r}: expected {len(header)} cells, got {len(row)}")
        for c, name in enumerate(names):
            features[r - 1, c] = _parse_cell(row[c], name, r)
        raw = row[-1].strip()
        if raw not in ("0", "1"):
            raise DataError(f"row {r}: label {raw!r} outside {{0, 1}}")
        labels[r - 1] = int(raw)
    return Dataset(features, labels, names)


def standin_path() -> str:
    """Path of the bundled ILPD stand-in (same shape and marginals as the
    public file: 583 rows, 416/167 class split, 4 missing A/G cells)."""
    return str(importlib.resources.files("hepaflow").joinpath("data/ilpd_standin.csv"))


def resolve_data_path(path: str) -> str:
    """Resolve the CLI/config data path; the literal ``standin`` selects the
    bundled stand-in file."""
    if path == "standin":
        return standin_path()
    return path
