"""CSV input/output for all pipeline artifacts.

Plain header-row CSV, decimal point, 17 significant digits so that
write-then-read round trips are lossless.  Matrices (time-frequency
maps) use long format with one (frame_time, freq, power) row per cell.
"""

from __future__ import annotations

import csv
import math

import numpy as np

__all__ = [
    "CSVFormatError",
    "write_columns",
    "read_columns",
    "write_tfmap",
    "read_tfmap",
    "write_curve",
    "read_curve",
]


class CSVFormatError(ValueError):
    """Malformed CSV content; message carries the offending line number."""


def _fmt(x):
    return format(float(x), ".17g")


def write_columns(path, columns):
    """Write named columns ({name: array}) as CSV with a header row."""
    names = list(columns)
    arrays = [np.asarray(columns[name]) for name in names]
    length = len(arrays[0])
    if any(len(a) != length for a in arrays):
        raise ValueError("columns must have equal length")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for i in range(length):
            writer.writerow([_fmt(a[i]) for a in arrays])


def read_columns(path, required):
    """Read named float columns; errors name the column or line at fault."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CSVFormatError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        for name in required:
            if name not in header:
                raise CSVFormatError(f"{path}: missing column '{name}'")
        idx = {name: header.index(name) for name in required}
        data = {name: [] for name in required}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < len(header):
                raise CSVFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            for name, col in idx.items():
                try:
                    data[name].append(float(row[col]))
                except ValueError:
                    raise CSVFormatError(
                        f"{path}:{lineno}: field '{name}' is not a number: {row[col]!r}"
                    ) from None
    return {name: np.array(vals) for name, vals in data.items()}


def write_tfmap(path, tfmap):
    """Long-format tvPS: one (frame_time, freq, power) row per cell."""
    n_frames, n_bins = tfmap.v.shape
    times = np.repeat(tfmap.times, n_bins)
    freqs = np.tile(tfmap.freqs, n_frames)
    write_columns(path, {"frame_time": times, "freq": freqs, "power": tfmap.v.ravel()})


def read_tfmap(path):
    """Rebuild (times, freqs, power matrix) from long-format CSV."""
    from .sst import TFMap

    cols = read_columns(path, ["frame_time", "freq", "power"])
    times = np.unique(cols["frame_time"])
    freqs = np.unique(cols["freq"])
    if len(times) * len(freqs) != len(cols["power"]):
        raise CSVFormatError(f"{path}: rows do not tile a full time-frequency grid")
    order = np.lexsort((cols["freq"], cols["frame_time"]))
    v = cols["power"][order].reshape(len(times), len(freqs))
    return TFMap(times=times, freqs=freqs, s=np.sqrt(v).astype(complex), v=v)


def write_curve(path, curve):
    """Spline curve as (role, value) rows: one 'order', then knots, then coeffs."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["role", "value"])
        writer.writerow(["order", _fmt(curve.order)])
        for k in curve.knots:
            writer.writerow(["knot", _fmt(k)])
        for c in curve.coeffs:
            writer.writerow(["coeff", _fmt(c)])


def read_curve(path):
    from .bsplines import SplineCurve

    order = None
    knots = []
    coeffs = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["role", "value"]:
            raise CSVFormatError(f"{path}: expected header 'role,value'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            role, value = row[0].strip(), row[1]
            try:
                value = float(value)
            except ValueError:
                raise CSVFormatError(f"{path}:{lineno}: bad number {row[1]!r}") from None
            if role == "order":
                order = int(value)
            elif role == "knot":
                knots.append(value)
            elif role == "coeff":
                coeffs.append(value)
            else:
                raise CSVFormatError(f"{path}:{lineno}: unknown role {role!r}")
    if order is None:
        raise CSVFormatError(f"{path}: missing 'order' row")
    return SplineCurve(order=order, knots=np.array(knots), coeffs=np.array(coeffs))
