"""Plain-text vector files.

One vector per line, components as decimal floats separated by single
commas.  Blank lines are skipped and lines starting with ``#`` are comments.
Floats are written with ``repr`` so they read back bit-for-bit.
"""

from __future__ import annotations

import math
from typing import Iterable, TextIO

import numpy as np

__all__ = ["VectorFileError", "parse_vectors", "read_vectors", "format_vector", "write_vectors"]


class VectorFileError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def parse_vectors(lines: Iterable[str]) -> np.ndarray:
    """Parse vector lines into a (count, n) float array.

    An input with no vectors gives an array of shape (0, 0).
    """
    rows = []
    n = None
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        try:
            row = [float(p) for p in parts]
        except ValueError:
            raise VectorFileError(f"cannot parse {line!r} as comma-separated floats", lineno) from None
        if any(p != p.strip() or not p for p in parts):
            raise VectorFileError("components must be separated by single commas", lineno)
        if not all(math.isfinite(v) for v in row):
            raise VectorFileError("non-finite component", lineno)
        if n is None:
            n = len(row)
        elif len(row) != n:
            raise VectorFileError(f"expected {n} components, got {len(row)}", lineno)
        rows.append(row)
    if not rows:
        return np.empty((0, 0))
    return np.array(rows, dtype=np.float64)


def read_vectors(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_vectors(fh)


def format_vector(v) -> str:
    return ",".join(repr(float(c)) for c in v)


def write_vectors(fh: TextIO, vectors) -> int:
    count = 0
    for v in vectors:
        fh.write(format_vector(v))
        fh.write("\n")
        count += 1
    return count
