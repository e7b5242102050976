"""Minimal CSV reading/writing for signals and reports."""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from .errors import ParseError
from .kernel import Signal

__all__ = ["format_value", "write_rows", "read_table", "read_signal", "write_signal"]


def format_value(v) -> str:
    """Render a cell; floats get 17 significant digits so they round-trip."""
    if v is None:
        return "nan"
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_rows(fh: TextIO, rows: Iterable[Sequence], header: Optional[Sequence[str]] = None) -> None:
    if header is not None:
        fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(format_value(v) for v in row) + "\n")


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_table(fh: TextIO) -> Tuple[Optional[List[str]], np.ndarray]:
    """Parse a rectangular table of finite reals with an optional header row."""
    rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("input is empty")
    header = None
    if not all(_is_number(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise ParseError("input has a header but no data rows")
    width = len(rows[0])
    data = np.empty((len(rows), width))
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(f"row {i + 1} has {len(r)} fields, expected {width}")
        for j, c in enumerate(r):
            try:
                v = float(c)
            except ValueError:
                raise ParseError(f"row {i + 1}, column {j + 1}: not a number: {c!r}") from None
            if not math.isfinite(v):
                raise ParseError(f"row {i + 1}, column {j + 1}: non-finite value {c!r}")
            data[i, j] = v
    if header is not None and len(header) != width:
        raise ParseError("header width differs from data width")
    return header, data


def read_signal(fh: TextIO) -> Tuple[Signal, Optional[List[str]]]:
    """One column (value) or two columns (t, value)."""
    header, data = read_table(fh)
    if data.shape[1] == 1:
        return Signal(data[:, 0]), header
    if data.shape[1] == 2:
        t = data[:, 0]
        dt = float(t[1] - t[0]) if t.size > 1 else None
        return Signal(data[:, 1], t0=float(t[0]), dt=dt, times=t), header
    raise ParseError(f"signals have one or two columns, got {data.shape[1]}")


def write_signal(fh: TextIO, signal: Signal, header: Optional[Sequence[str]] = None) -> None:
    if signal.times is not None:
        rows = zip(signal.times, signal.samples)
    else:
        rows = ((v,) for v in signal.samples)
    write_rows(fh, rows, header)


def to_text(rows: Iterable[Sequence], header: Optional[Sequence[str]] = None) -> str:
    buf = io.StringIO()
    write_rows(buf, rows, header)
    return buf.getvalue()
