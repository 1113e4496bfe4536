"""File formats: CSV point clouds and queries, JSON distance matrices."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .functions import BoundedFunction
from .metric import EuclideanMetric, MatrixMetric, Metric, MetricError, PointCloudSet, RealLineMetric


class InputError(ValueError):
    """Malformed input file; the message names the file and line."""


@dataclass
class LoadedSet:
    cloud: PointCloudSet
    phi: BoundedFunction
    kind: str  # "coordinates" or "matrix"

    @property
    def dim(self) -> int:
        return 0 if self.kind == "matrix" else self.cloud.points.shape[1]


def _float(text: str, where: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise InputError(f"{where}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise InputError(f"{where}: non-finite value {text!r}")
    return v


def _read_rows(path: Path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        rows = [(reader.line_num, row) for row in reader if row]
    if not rows:
        raise InputError(f"{path}: empty file (expected a header row)")
    return [h.strip() for h in rows[0][1]], rows[1:]


def _coord_header(header: list[str], path: Path, with_value: bool) -> int:
    names = header[:-1] if with_value else header
    expect = [f"x{i + 1}" for i in range(len(names))]
    if with_value and (not header or header[-1] != "value"):
        raise InputError(f"{path}:1: header must end with 'value', got {header}")
    if not names or names != expect:
        raise InputError(f"{path}:1: expected header {','.join(expect or ['x1'])}"
                         f"{',value' if with_value else ''}, got {','.join(header)}")
    return len(names)


def _metric_for(dim: int, metric: str | None) -> Metric:
    if metric in (None, "auto"):
        return RealLineMetric() if dim == 1 else EuclideanMetric(dim)
    if metric == "real-line":
        if dim != 1:
            raise InputError(f"real-line metric needs 1 coordinate, file has {dim}")
        return RealLineMetric()
    if metric == "euclidean":
        return EuclideanMetric(dim)
    raise InputError(f"unknown metric {metric!r}")


def read_set_csv(path, metric: str | None = None, index: str = "auto") -> LoadedSet:
    """Read ``x1,...,xd,value`` rows; row order gives the point ids."""
    path = Path(path)
    header, rows = _read_rows(path)
    dim = _coord_header(header, path, with_value=True)
    if not rows:
        raise InputError(f"{path}: no data rows")
    pts = np.empty((len(rows), dim))
    vals = np.empty(len(rows))
    for k, (line, row) in enumerate(rows):
        where = f"{path}:{line}"
        if len(row) != dim + 1:
            raise InputError(f"{where}: expected {dim + 1} fields, got {len(row)}")
        pts[k] = [_float(x, where) for x in row[:dim]]
        vals[k] = _float(row[dim], where)
    m = _metric_for(dim, metric)
    try:
        cloud = PointCloudSet(pts[:, 0] if isinstance(m, RealLineMetric) else pts, m, index=index)
    except (ValueError, MetricError) as exc:
        raise InputError(f"{path}: {exc}") from None
    return LoadedSet(cloud, BoundedFunction(cloud, vals), "coordinates")


def read_set_json(path, index: str = "auto") -> LoadedSet:
    """Read ``{"n", "matrix", "values"}``.

    ``matrix`` is row-major of length ``n**2``.  A ``null`` entry in
    ``values`` marks a point of the space that is not in A.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or not {"n", "matrix", "values"} <= doc.keys():
        raise InputError(f"{path}: expected an object with keys n, matrix, values")
    n = doc["n"]
    if not isinstance(n, int) or n < 1:
        raise InputError(f"{path}: n must be a positive integer")
    flat, values = doc["matrix"], doc["values"]
    if not isinstance(flat, list) or len(flat) != n * n:
        raise InputError(f"{path}: matrix must be a list of length n^2 = {n * n}")
    if not isinstance(values, list) or len(values) != n:
        raise InputError(f"{path}: values must be a list of length n = {n}")
    try:
        metric = MatrixMetric(np.asarray(flat, dtype=float).reshape(n, n))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None
    problems = metric.validate(atol=1e-12)
    if problems:
        raise InputError(f"{path}: not a metric: {problems[0]}")
    ids = [i for i, v in enumerate(values) if v is not None]
    if not ids:
        raise InputError(f"{path}: all values are null; A must be nonempty")
    vals = []
    for i in ids:
        if isinstance(values[i], bool) or not isinstance(values[i], (int, float)):
            raise InputError(f"{path}: values[{i}] is not a number")
        vals.append(_float(repr(values[i]), f"{path}: values[{i}]"))
    cloud = PointCloudSet(np.array(ids), metric, index=index)
    return LoadedSet(cloud, BoundedFunction(cloud, vals), "matrix")


def read_set(path, metric: str | None = None, index: str = "auto") -> LoadedSet:
    if Path(path).suffix.lower() == ".json":
        return read_set_json(path, index=index)
    return read_set_csv(path, metric=metric, index=index)


def read_queries(path, loaded: LoadedSet) -> np.ndarray:
    """Query rows ``x1,...,xd`` (or ``index`` for the matrix kind)."""
    path = Path(path)
    header, rows = _read_rows(path)
    if loaded.kind == "matrix":
        if header != ["index"]:
            raise InputError(f"{path}:1: matrix-kind queries need the header 'index'")
        out = np.empty(len(rows), dtype=np.intp)
        n = loaded.cloud.metric.n
        for k, (line, row) in enumerate(rows):
            where = f"{path}:{line}"
            if len(row) != 1:
                raise InputError(f"{where}: expected 1 field, got {len(row)}")
            try:
                out[k] = int(row[0])
            except ValueError:
                raise InputError(f"{where}: not an integer index: {row[0]!r}") from None
            if not 0 <= out[k] < n:
                raise InputError(f"{where}: index {out[k]} out of range for n = {n}")
        return out
    dim = _coord_header(header, path, with_value=False)
    if dim != loaded.dim:
        raise InputError(f"{path}:1: dimension mismatch: queries have {dim} coordinates, "
                         f"the set has {loaded.dim}")
    Q = np.empty((len(rows), dim))
    for k, (line, row) in enumerate(rows):
        where = f"{path}:{line}"
        if len(row) != dim:
            raise InputError(f"{where}: expected {dim} fields, got {len(row)}")
        Q[k] = [_float(x, where) for x in row]
    return Q[:, 0] if dim == 1 else Q


def _fmt(v: float) -> str:
    return repr(float(v))


def write_values_csv(fh, queries: np.ndarray, values: np.ndarray, kind: str = "coordinates"):
    """One row per query in input order; floats in shortest round-trip form."""
    w = csv.writer(fh, lineterminator="\n")
    Q = np.asarray(queries)
    if kind == "matrix":
        w.writerow(["index", "value"])
        for q, v in zip(Q, values):
            w.writerow([int(q), _fmt(v)])
        return
    if Q.ndim == 1:
        Q = Q[:, None]
    w.writerow([f"x{i + 1}" for i in range(Q.shape[1])] + ["value"])
    for q, v in zip(Q, values):
        w.writerow([_fmt(x) for x in q] + [_fmt(v)])
