"""Dataset ingestion: Mulan-style ARFF (dense and sparse) with an XML
label manifest, plus a CSV pair fallback, validation diagnostics, and
round-trippable export.
"""
from __future__ import annotations

import csv
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class DataFormatError(ValueError):
    """Malformed or unsupported dataset file."""


@dataclass(frozen=True)
class Dataset:
    name: str
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    label_names: tuple[str, ...]
    source_format: str

    def __post_init__(self):
        n, m = self.features.shape
        nl, l = self.labels.shape
        if n != nl:
            raise DataFormatError("feature and label row counts differ")
        if n == 0 or m == 0 or l == 0:
            raise DataFormatError("empty dataset")
        if not np.all((self.labels == 0) | (self.labels == 1)):
            raise DataFormatError("label columns must be binary")
        if not np.all(np.isfinite(self.features)):
            raise DataFormatError("features contain non-finite values")

    @property
    def n_instances(self) -> int:
        return self.features.shape[0]


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset

    def __post_init__(self):
        if self.train.feature_names != self.test.feature_names:
            raise DataFormatError("train/test feature schemas differ")
        if self.train.label_names != self.test.label_names:
            raise DataFormatError("train/test label schemas differ")


@dataclass(frozen=True)
class Diagnostics:
    duplicate_feature_rows: int
    all_zero_label_rows: int
    constant_features: int

    def is_clean(self) -> bool:
        return not (
            self.duplicate_feature_rows
            or self.all_zero_label_rows
            or self.constant_features
        )


def read_label_manifest(path) -> tuple[str, ...]:
    """Label attribute names from a Mulan XML manifest."""
    root = ET.parse(path).getroot()
    names = []
    for el in root.iter():
        tag = el.tag.rsplit("}", 1)[-1]
        if tag == "label" and "name" in el.attrib:
            names.append(el.attrib["name"])
    if not names:
        raise DataFormatError(f"no label entries found in manifest {path}")
    return tuple(names)


def _parse_attribute(line: str, lineno: int) -> tuple[str, str]:
    body = line.split(None, 1)[1].strip()
    if body.startswith(("'", '"')):
        quote = body[0]
        end = body.index(quote, 1)
        name = body[1:end]
        rest = body[end + 1 :].strip()
    else:
        parts = body.split(None, 1)
        if len(parts) != 2:
            raise DataFormatError(f"line {lineno}: malformed @attribute")
        name, rest = parts
    kind = rest.strip().lower()
    if kind in ("numeric", "real", "integer"):
        return name, "numeric"
    if kind.startswith("{"):
        values = {v.strip().strip("'\"") for v in kind.strip("{}").split(",")}
        if values <= {"0", "1"}:
            return name, "numeric"
        raise DataFormatError(
            f"line {lineno}: nominal attribute '{name}' is not binary {{0,1}}"
        )
    raise DataFormatError(f"line {lineno}: unsupported attribute type '{kind}'")


def _split_dense_row(line: str) -> list[str]:
    return next(csv.reader([line], skipinitialspace=True))


def _parse_value(tok: str, lineno: int) -> float:
    tok = tok.strip().strip("'\"")
    if tok == "" or tok == "?":
        raise DataFormatError(f"line {lineno}: missing value")
    try:
        v = float(tok)
    except ValueError as exc:
        raise DataFormatError(f"line {lineno}: non-numeric value '{tok}'") from exc
    if not np.isfinite(v):
        raise DataFormatError(f"line {lineno}: non-finite value '{tok}'")
    return v


def parse_arff(
    path,
    label_manifest=None,
    labels_last: int | None = None,
    name: str | None = None,
) -> Dataset:
    """Load a Mulan-style ARFF file.

    Label attributes are identified either by the XML manifest
    (label_manifest) or as the trailing labels_last attributes. Row order
    is preserved exactly as in the file.
    """
    path = Path(path)
    attr_names: list[str] = []
    rows: list[np.ndarray] = []
    n_attrs = 0
    in_data = False
    sparse_seen = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            low = line.lower()
            if not in_data:
                if low.startswith("@relation"):
                    continue
                if low.startswith("@attribute"):
                    aname, _ = _parse_attribute(line, lineno)
                    attr_names.append(aname)
                    continue
                if low.startswith("@data"):
                    in_data = True
                    n_attrs = len(attr_names)
                    if n_attrs == 0:
                        raise DataFormatError("no attributes declared before @data")
                    continue
                raise DataFormatError(f"line {lineno}: unexpected header line")
            row = np.zeros(n_attrs)
            if line.startswith("{"):
                sparse_seen = True
                body = line.strip("{}").strip()
                if body:
                    for item in body.split(","):
                        parts = item.split()
                        if len(parts) != 2:
                            raise DataFormatError(
                                f"line {lineno}: malformed sparse entry '{item}'"
                            )
                        idx = int(parts[0])
                        if not 0 <= idx < n_attrs:
                            raise DataFormatError(
                                f"line {lineno}: sparse index {idx} out of range"
                            )
                        row[idx] = _parse_value(parts[1], lineno)
            else:
                toks = _split_dense_row(line)
                if len(toks) != n_attrs:
                    raise DataFormatError(
                        f"line {lineno}: expected {n_attrs} values, got {len(toks)}"
                    )
                row[:] = [_parse_value(t, lineno) for t in toks]
            rows.append(row)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    values = np.vstack(rows)

    if label_manifest is not None:
        label_names = read_label_manifest(label_manifest)
        missing = [n for n in label_names if n not in attr_names]
        if missing:
            raise DataFormatError(
                f"manifest labels missing from ARFF header: {missing}"
            )
        label_idx = [attr_names.index(n) for n in label_names]
    elif labels_last is not None:
        if not 0 < labels_last < len(attr_names):
            raise DataFormatError("labels_last out of range")
        label_idx = list(range(len(attr_names) - labels_last, len(attr_names)))
        label_names = tuple(attr_names[i] for i in label_idx)
    else:
        raise DataFormatError("either label_manifest or labels_last is required")

    label_set = set(label_idx)
    feat_idx = [i for i in range(len(attr_names)) if i not in label_set]
    return Dataset(
        name=name or path.stem,
        features=values[:, feat_idx],
        labels=values[:, label_idx],
        feature_names=tuple(attr_names[i] for i in feat_idx),
        label_names=tuple(label_names),
        source_format="arff_sparse" if sparse_seen else "arff_dense",
    )


def _read_csv_matrix(path) -> tuple[tuple[str, ...], np.ndarray]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataFormatError(f"{path} line {lineno}: ragged row")
            rows.append([_parse_value(t, lineno) for t in row])
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return header, np.array(rows)


def parse_csv(features_path, labels_path, name: str | None = None) -> Dataset:
    """Load a (features.csv, labels.csv) pair; both need a header row."""
    feat_names, X = _read_csv_matrix(features_path)
    label_names, Y = _read_csv_matrix(labels_path)
    if X.shape[0] != Y.shape[0]:
        raise DataFormatError(
            f"row count mismatch: {X.shape[0]} feature rows vs {Y.shape[0]} label rows"
        )
    return Dataset(
        name=name or Path(features_path).stem,
        features=X,
        labels=Y,
        feature_names=feat_names,
        label_names=label_names,
        source_format="csv",
    )


def export_csv(ds: Dataset, features_path, labels_path) -> None:
    """Write the dataset back out as a CSV pair (round-trips bit-exactly)."""
    for path, names, mat in (
        (features_path, ds.feature_names, ds.features),
        (labels_path, ds.label_names, ds.labels),
    ):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(names)
            for row in mat:
                w.writerow([repr(float(v)) for v in row])


def min_max_scale(ds: Dataset) -> Dataset:
    """Scale each feature column to [0, 1]; constant columns map to 0."""
    X = ds.features
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    span = np.where(span > 0, span, 1.0)
    return Dataset(
        name=ds.name,
        features=(X - lo) / span,
        labels=ds.labels,
        feature_names=ds.feature_names,
        label_names=ds.label_names,
        source_format=ds.source_format,
    )


def validate(ds: Dataset) -> Diagnostics:
    """Non-mutating structural checks relevant to the distance models."""
    n = ds.n_instances
    n_unique = np.unique(ds.features, axis=0).shape[0]
    zero_rows = int((ds.labels.sum(axis=1) == 0).sum())
    const = int((ds.features.min(axis=0) == ds.features.max(axis=0)).sum())
    return Diagnostics(
        duplicate_feature_rows=n - n_unique,
        all_zero_label_rows=zero_rows,
        constant_features=const,
    )
