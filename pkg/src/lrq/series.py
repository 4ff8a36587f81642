"""Uniformly sampled time series and the CSV format shared by all outputs."""

from __future__ import annotations

import io
import os
import tempfile
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np


@dataclass
class TimeSeries:
    t: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.values = np.asarray(self.values)
        if self.t.ndim != 1 or self.t.shape != self.values.shape:
            raise ValueError("t and values must be 1-d arrays of equal length")
        if self.t.size > 2:
            steps = np.diff(self.t)
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12 * max(1.0, abs(self.t[-1]))):
                raise ValueError("time grid must be uniform")

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def horizon(self) -> float:
        return float(self.t[-1] - self.t[0])

    def __len__(self):
        return self.t.size


def time_grid(t_max: float, dt: float) -> np.ndarray:
    """Uniform grid ``0, dt, ..., t_max`` (``t_max`` rounded to a multiple of ``dt``)."""
    if dt <= 0 or t_max <= 0:
        raise ValueError("t_max and dt must be positive")
    steps = int(round(t_max / dt))
    if steps > 10**7:
        raise ValueError("t_max/dt exceeds 1e7 steps")
    return np.arange(steps + 1) * dt


def fmt(x) -> str:
    """Data cell: integers verbatim, floats with 17 significant digits, no negative zero."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x) + 0.0:.17g}"
    return str(x)


def fmt_meta(x) -> str:
    # shortest round-trip form keeps headers readable while still exact
    if isinstance(x, (float, np.floating)) and not isinstance(x, bool):
        return repr(float(x))
    return fmt(x)


def render_csv(columns: Sequence[str], rows, meta: Mapping | None = None) -> str:
    buf = io.StringIO()
    for key, value in (meta or {}).items():
        buf.write(f"# {key}={fmt_meta(value)}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, columns, rows, meta=None) -> None:
    write_atomic(path, render_csv(columns, rows, meta))


def read_csv(path):
    """Return ``(meta, columns, data)`` for a file written by :func:`write_csv`."""
    meta = {}
    with open(path) as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        else:
            body.append(line)
    columns = body[0].split(",")
    data = np.array([[float(x) for x in line.split(",")] for line in body[1:]]).reshape(-1, len(columns))
    return meta, columns, data
