"""Text file formats: dataset CSV, representation CSV and model checkpoints.

Floats are written with 17 significant digits, which round-trips every
finite double exactly.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import DomainError, ShapeError
from .geometry import RepresentationSet
from .linalg import GaugeTransform
from .model import Dataset, MlpModel

__all__ = [
    "fmt",
    "read_dataset_csv",
    "write_dataset_csv",
    "read_reps_csv",
    "write_reps_csv",
    "save_model",
    "load_model",
    "CHECKPOINT_MAGIC",
]

CHECKPOINT_MAGIC = "GAUGELENS-MLP v1"


def fmt(x) -> str:
    return "%.17g" % x


def _parse_float(text, where):
    try:
        v = float(text)
    except ValueError:
        raise DomainError(f"{where}: cannot parse {text!r} as a number") from None
    if not np.isfinite(v):
        raise DomainError(f"{where}: non-finite value {text!r}")
    return v


def read_dataset_csv(path, C=None) -> Dataset:
    """Read ``label,f0,...,f{d-1}`` rows into a column-major Dataset."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    d = len(header) - 1
    if d < 1 or header != ["label"] + [f"f{i}" for i in range(d)]:
        raise DomainError(f"{path}: header must be label,f0,...,f<d-1>, got {','.join(header)}")
    labels, feats = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != d + 1:
            raise ShapeError(f"{path}:{lineno}: expected {d + 1} fields, got {len(row)}")
        lab = row[0].strip()
        if not lab.isdigit():
            raise DomainError(f"{path}:{lineno}: label {lab!r} is not a nonnegative integer")
        labels.append(int(lab))
        feats.append([_parse_float(v, f"{path}:{lineno}") for v in row[1:]])
    y = np.array(labels, dtype=np.int64)
    if y.size == 0:
        raise DomainError(f"{path}: no samples")
    return Dataset(np.array(feats).T, y, int(C) if C is not None else int(y.max()) + 1)


def write_dataset_csv(path, data: Dataset):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["label"] + [f"f{i}" for i in range(data.d_in)]) + "\n")
        for j in range(data.n):
            fh.write(",".join([str(int(data.y[j]))] + [fmt(v) for v in data.X[:, j]]) + "\n")


def read_reps_csv(path) -> RepresentationSet:
    """Read ``dim0,...,dim{d-1}[,label]`` rows (one sample per row, i.e. H^T)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    has_labels = header[-1] == "label"
    d = len(header) - has_labels
    if d < 1 or header[:d] != [f"dim{i}" for i in range(d)]:
        raise DomainError(f"{path}: header must be dim0,...,dim<d-1>[,label]")
    cols, labels = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ShapeError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        cols.append([_parse_float(v, f"{path}:{lineno}") for v in row[:d]])
        if has_labels:
            labels.append(int(row[d]))
    return RepresentationSet(np.array(cols).T, np.array(labels) if has_labels else None)


def write_reps_csv(path, R: RepresentationSet):
    header = [f"dim{i}" for i in range(R.d)] + (["label"] if R.labels is not None else [])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for j in range(R.n):
            row = [fmt(v) for v in R.H[:, j]]
            if R.labels is not None:
                row.append(str(int(R.labels[j])))
            fh.write(",".join(row) + "\n")


def _write_block(fh, a):
    a = np.atleast_2d(a)
    for row in a:
        fh.write(" ".join(fmt(v) for v in row) + "\n")


def save_model(path, m: MlpModel):
    """Write the versioned text checkpoint (bit-exact for finite doubles)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CHECKPOINT_MAGIC + "\n")
        fh.write(f"{m.d_in} {m.d_h} {m.C}\n")
        _write_block(fh, m.W1)
        _write_block(fh, m.b1)
        _write_block(fh, m.W2)
        _write_block(fh, m.b2)
        if m.gauge is not None:
            fh.write("GAUGE\n")
            _write_block(fh, m.gauge.D)


def load_model(path) -> MlpModel:
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != CHECKPOINT_MAGIC:
        raise DomainError(f"{path}: not a {CHECKPOINT_MAGIC} checkpoint")
    try:
        d_in, d_h, C = (int(t) for t in lines[1].split())
    except (IndexError, ValueError):
        raise DomainError(f"{path}: bad dimension header") from None
    pos = 2

    def block(rows, cols):
        nonlocal pos
        if pos + rows > len(lines):
            raise ShapeError(f"{path}: checkpoint truncated")
        out = []
        for ln in lines[pos:pos + rows]:
            vals = [_parse_float(t, str(path)) for t in ln.split()]
            if len(vals) != cols:
                raise ShapeError(f"{path}: expected {cols} values per row, got {len(vals)}")
            out.append(vals)
        pos += rows
        return np.array(out)

    W1 = block(d_h, d_in)
    b1 = block(1, d_h)[0]
    W2 = block(C, d_h)
    b2 = block(1, C)[0]
    gauge = None
    if pos < len(lines):
        if lines[pos] != "GAUGE":
            raise DomainError(f"{path}: unexpected content {lines[pos]!r}")
        pos += 1
        gauge = GaugeTransform.from_matrix(block(d_h, d_h))
    return MlpModel(W1, b1, W2, b2, gauge=gauge)
