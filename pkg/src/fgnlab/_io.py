"""Small CSV/binary helpers shared by the modules and the command line."""

from __future__ import annotations

import csv
import io
import os
import struct
from contextlib import contextmanager
from numbers import Integral, Real

import numpy as np


def fmt(value) -> str:
    """Round-trip decimal formatting (17 significant digits for floats)."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, Integral):
        return str(int(value))
    if isinstance(value, Real):
        return format(float(value), ".17g")
    return str(value)


@contextmanager
def _open_text(path_or_buf):
    if isinstance(path_or_buf, (str, os.PathLike)):
        with open(path_or_buf, "w", newline="") as fh:
            yield fh
    else:
        yield path_or_buf


def write_csv(path_or_buf, header, rows, comments=None) -> None:
    """Write rows as CSV; ``comments`` become leading ``# key=value`` lines."""
    with _open_text(path_or_buf) as fh:
        for key, val in (comments or {}).items():
            fh.write(f"# {key}={fmt(val)}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def read_csv(path_or_buf):
    """Read a CSV written by :func:`write_csv`; returns (comments, header, rows)."""
    if isinstance(path_or_buf, (str, os.PathLike)):
        with open(path_or_buf, newline="") as fh:
            text = fh.read()
    else:
        text = path_or_buf.read()
    comments = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, val = line[2:].partition("=")
            comments[key] = val
        else:
            body.append(line)
    reader = csv.reader(io.StringIO("\n".join(body)))
    header = next(reader)
    return comments, header, [row for row in reader]


_FGN_MAGIC = b"FGN1"
_FGN_HEADER = struct.Struct("<4sdQ")


def write_fgn_binary(path, h: float, increments: np.ndarray) -> None:
    """Little-endian float64 cache: magic ``FGN1``, h, n, then n increments."""
    x = np.ascontiguousarray(increments, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_FGN_HEADER.pack(_FGN_MAGIC, float(h), x.size))
        fh.write(x.tobytes())


def read_fgn_binary(path):
    with open(path, "rb") as fh:
        magic, h, n = _FGN_HEADER.unpack(fh.read(_FGN_HEADER.size))
        if magic != _FGN_MAGIC:
            raise ValueError(f"{path}: not an FGN1 file")
        x = np.frombuffer(fh.read(8 * n), dtype="<f8")
    if x.size != n:
        raise ValueError(f"{path}: truncated payload")
    return h, x.astype(float)


class Table:
    """Column-named result rows plus free-form metadata."""

    def __init__(self, columns, rows=(), meta=None):
        self.columns = list(columns)
        self.rows = [tuple(r) for r in rows]
        self.meta = dict(meta or {})

    def __len__(self):
        return len(self.rows)

    def __repr__(self):
        return f"Table(columns={self.columns}, rows={len(self.rows)})"

    def append(self, row) -> None:
        if len(row) != len(self.columns):
            raise ValueError("row length does not match columns")
        self.rows.append(tuple(row))

    def column(self, name) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([r[j] for r in self.rows])

    def records(self):
        return [dict(zip(self.columns, r)) for r in self.rows]

    def to_csv(self, path_or_buf) -> None:
        write_csv(path_or_buf, self.columns, self.rows, comments=self.meta)

    def to_json(self, path_or_buf) -> None:
        import json

        def clean(v):
            if isinstance(v, (np.integer,)):
                return int(v)
            if isinstance(v, (np.floating, float)):
                return float(fmt(v))
            if isinstance(v, np.bool_):
                return bool(v)
            return v

        doc = {"meta": {k: clean(v) for k, v in self.meta.items()},
               "columns": self.columns,
               "rows": [[clean(v) for v in r] for r in self.rows]}
        with _open_text(path_or_buf) as fh:
            json.dump(doc, fh, indent=1, allow_nan=True)
            fh.write("\n")
