"""Sparse matrices mod p and the SMS interchange format.

SMS files are newline-delimited ASCII: a header line ``rows cols M``, one
``i j v`` line per nonzero with 1-based coordinates sorted by (i, j), and a
``0 0 0`` terminator.  Writing is byte-stable: the same matrix always
serializes to the same bytes.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field


@dataclass
class SparseModMatrix:
    """Sorted coordinate list of nonzeros of a rows x cols matrix mod p."""

    rows: int
    cols: int
    p: int
    entries: list[tuple[int, int, int]] = field(default_factory=list)  # 0-based

    def normalize(self) -> "SparseModMatrix":
        """Reduce values mod p, drop zeros, merge duplicates, sort."""
        acc: dict[tuple[int, int], int] = {}
        for i, j, v in self.entries:
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise ValueError(f"entry ({i}, {j}) out of bounds")
            key = (i, j)
            acc[key] = (acc.get(key, 0) + v) % self.p
        self.entries = sorted((i, j, v) for (i, j), v in acc.items() if v)
        return self

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def transpose(self) -> "SparseModMatrix":
        t = SparseModMatrix(self.cols, self.rows, self.p,
                            [(j, i, v) for i, j, v in self.entries])
        return t.normalize()

    def row_supports(self) -> list[list[tuple[int, int]]]:
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.rows)]
        for i, j, v in self.entries:
            out[i].append((j, v))
        return out

    def to_dense(self):
        import numpy as np

        m = np.zeros((self.rows, self.cols), dtype=np.int64)
        for i, j, v in self.entries:
            m[i, j] = v
        return m


def write_sms(matrix: SparseModMatrix, path_or_file) -> None:
    """Write the matrix in SMS format (entries sorted, 1-based, terminated)."""
    matrix.normalize()
    if hasattr(path_or_file, "write"):
        _write_sms_stream(matrix, path_or_file)
        return
    with open(path_or_file, "w", newline="\n") as fh:
        _write_sms_stream(matrix, fh)


def _write_sms_stream(matrix: SparseModMatrix, fh) -> None:
    fh.write(f"{matrix.rows} {matrix.cols} M\n")
    for i, j, v in matrix.entries:
        fh.write(f"{i + 1} {j + 1} {v}\n")
    fh.write("0 0 0\n")


def sms_bytes(matrix: SparseModMatrix) -> bytes:
    buf = io.StringIO()
    write_sms(matrix, buf)
    return buf.getvalue().encode("ascii")


class SmsParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def read_sms(path_or_file, p: int = 2) -> SparseModMatrix:
    """Parse an SMS file; values are reduced mod ``p``."""
    if hasattr(path_or_file, "read"):
        return _read_sms_stream(path_or_file, p)
    with open(path_or_file) as fh:
        return _read_sms_stream(fh, p)


def _read_sms_stream(fh, p: int) -> SparseModMatrix:
    header = None
    entries: list[tuple[int, int, int]] = []
    terminated = False
    for line_no, raw in enumerate(fh, start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 3 or parts[2] != "M":
                raise SmsParseError(line_no, f"bad header {line!r}")
            try:
                header = (int(parts[0]), int(parts[1]))
            except ValueError:
                raise SmsParseError(line_no, f"bad header {line!r}") from None
            continue
        if terminated:
            raise SmsParseError(line_no, "content after terminator")
        if len(parts) != 3:
            raise SmsParseError(line_no, f"expected 'i j v', got {line!r}")
        try:
            i, j, v = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise SmsParseError(line_no, f"non-integer entry {line!r}") from None
        if (i, j, v) == (0, 0, 0):
            terminated = True
            continue
        if i < 1 or j < 1 or i > header[0] or j > header[1]:
            raise SmsParseError(line_no, f"coordinates out of range {line!r}")
        entries.append((i - 1, j - 1, v))
    if header is None:
        raise SmsParseError(0, "empty file")
    if not terminated:
        raise SmsParseError(0, "missing 0 0 0 terminator")
    return SparseModMatrix(header[0], header[1], p, entries).normalize()
