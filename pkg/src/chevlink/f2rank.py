"""Exact rank of sparse matrices over F_p: sparse elimination + dense finish.

The sparse phase eliminates with a Markowitz-lite heuristic (row with fewest
nonzeros, within it the column with the fewest nonzeros, ties broken by
lowest index) and tracks fill; once the density of the remaining submatrix
crosses a threshold, the remainder is packed dense (64 columns per uint64
word for p = 2, a byte per entry for odd p) and finished with vectorized row
elimination.  Everything is deterministic for fixed options.
"""

from __future__ import annotations

import heapq
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .sms import SparseModMatrix, read_sms

__all__ = [
    "RankOptions",
    "RankResult",
    "MemoryBudgetError",
    "rank_mod_p",
    "rank_sms_path",
    "rank_reference_dense",
    "Gf2Solver",
]

_DEFAULT_BUDGET_MB = int(os.environ.get("CHEVLINK_MEM_BUDGET_MB", "4096"))


class MemoryBudgetError(MemoryError):
    """Dense phase would exceed the configured memory budget."""


@dataclass
class RankOptions:
    pivot: str = "min-row-min-col"
    dense_threshold: float = 0.03
    mem_budget_mb: int = _DEFAULT_BUDGET_MB
    progress: object = None          # callable(stats dict) or None
    progress_every: int = 100_000


@dataclass
class RankResult:
    rank: int
    rows: int
    cols: int
    nnz: int
    sparse_pivots: int
    dense_pivots: int
    switched_at_density: float | None
    dense_shape: tuple[int, int] | None
    seconds: float
    p: int

    def as_dict(self) -> dict:
        return {
            "rank": self.rank,
            "rows": self.rows,
            "cols": self.cols,
            "nnz": self.nnz,
            "sparse_pivots": self.sparse_pivots,
            "dense_pivots": self.dense_pivots,
            "switched_at_density": self.switched_at_density,
            "dense_shape": list(self.dense_shape) if self.dense_shape else None,
            "p": self.p,
        }


class _SparseElim:
    """Mutable sparse elimination state over F_p."""

    def __init__(self, p: int, rows: int, cols: int):
        self.p = p
        self.nrows = rows
        self.ncols = cols
        # p=2 rows are column sets; odd p rows are {col: value} dicts.
        self.rows: list = [None] * rows
        self.col_rows: dict[int, set[int]] = {}
        self.heap: list[tuple[int, int]] = []
        self.nnz = 0
        self.active_rows = 0
        self.rank = 0

    def add_row(self, i: int, items) -> None:
        if self.p == 2:
            row = set()
            for j, v in items:
                if v % 2:
                    row.symmetric_difference_update((j,))
        else:
            row = {}
            for j, v in items:
                v %= self.p
                if v:
                    row[j] = (row.get(j, 0) + v) % self.p
            row = {j: v for j, v in row.items() if v}
        if not row:
            self.rows[i] = None
            return
        self.rows[i] = row
        self.nnz += len(row)
        self.active_rows += 1
        for j in row:
            self.col_rows.setdefault(j, set()).add(i)
        heapq.heappush(self.heap, (len(row), i))

    def density(self) -> float:
        cols = len(self.col_rows)
        if self.active_rows == 0 or cols == 0:
            return 0.0
        return self.nnz / (self.active_rows * cols)

    def pop_pivot_row(self) -> int | None:
        while self.heap:
            length, i = heapq.heappop(self.heap)
            row = self.rows[i]
            if row is not None and len(row) == length:
                return i
        return None

    def eliminate(self, i: int) -> None:
        """Use row i as a pivot and remove it from the active structure."""
        row = self.rows[i]
        c = min(row, key=lambda j: (len(self.col_rows[j]), j))
        self.rank += 1
        touched = self.col_rows[c] - {i}
        if self.p == 2:
            for s in touched:
                other = self.rows[s]
                before = len(other)
                for j in row:
                    if j in other:
                        other.remove(j)
                        self.col_rows[j].discard(s)
                    else:
                        other.add(j)
                        self.col_rows[j].add(s)
                self.nnz += len(other) - before
                if other:
                    heapq.heappush(self.heap, (len(other), s))
                else:
                    self.rows[s] = None
                    self.active_rows -= 1
        else:
            inv = pow(row[c], -1, self.p)
            for s in touched:
                other = self.rows[s]
                before = len(other)
                f = (other[c] * inv) % self.p
                for j, v in row.items():
                    nv = (other.get(j, 0) - f * v) % self.p
                    if nv:
                        if j not in other:
                            self.col_rows[j].add(s)
                        other[j] = nv
                    elif j in other:
                        del other[j]
                        self.col_rows[j].discard(s)
                self.nnz += len(other) - before
                if other:
                    heapq.heappush(self.heap, (len(other), s))
                else:
                    self.rows[s] = None
                    self.active_rows -= 1
        # Retire the pivot row and column.
        for j in row:
            self.col_rows[j].discard(i)
            if not self.col_rows[j]:
                del self.col_rows[j]
        self.nnz -= len(row)
        self.rows[i] = None
        self.active_rows -= 1


def _dense_rank_gf2(rows: list[set], col_ids: list[int]) -> int:
    """Bit-packed elimination of the remaining rows (columns renumbered)."""
    col_pos = {c: k for k, c in enumerate(col_ids)}
    n, c = len(rows), len(col_ids)
    words = (c + 63) // 64
    bits = np.zeros((n, words), dtype=np.uint64)
    for r, row in enumerate(rows):
        for j in row:
            k = col_pos[j]
            bits[r, k >> 6] |= np.uint64(1) << np.uint64(k & 63)
    rank = 0
    top = 0
    for k in range(c):
        w, b = k >> 6, np.uint64(1) << np.uint64(k & 63)
        colbits = bits[top:, w] & b
        nz = np.nonzero(colbits)[0]
        if nz.size == 0:
            continue
        piv = top + int(nz[0])
        if piv != top:
            bits[[top, piv]] = bits[[piv, top]]
        hits = top + 1 + np.nonzero(bits[top + 1:, w] & b)[0]
        if hits.size:
            bits[hits] ^= bits[top]
        rank += 1
        top += 1
        if top == n:
            break
    return rank


def _dense_rank_modp(rows: list[dict], col_ids: list[int], p: int,
                     block: int = 1024) -> int:
    """Stream rows against a growing RREF basis; reductions are single
    float64 matmuls (exact: values stay far below 2^53), so the heavy work
    runs in BLAS.  Stops as soon as the basis covers every column."""
    col_pos = {c: k for k, c in enumerate(col_ids)}
    n, c = len(rows), len(col_ids)
    basis = np.zeros((0, c))          # RREF rows, float64 with entries in [0, p)
    piv_cols: list[int] = []
    for start in range(0, n, block):
        if len(piv_cols) == c:
            break
        chunk = rows[start:start + block]
        m = np.zeros((len(chunk), c))
        for r, row in enumerate(chunk):
            for j, v in row.items():
                m[r, col_pos[j]] = v
        if piv_cols:
            coeffs = m[:, piv_cols]
            if np.any(coeffs):
                m -= coeffs @ basis
                m %= p
        # Unblocked pass over the reduced chunk to extract new basis rows.
        new_rows = []
        new_cols = []
        for r in range(m.shape[0]):
            row = m[r]
            for nc, nrow in zip(new_cols, new_rows):
                f = row[nc]
                if f:
                    row -= f * nrow
                    row %= p
            nz = np.nonzero(row)[0]
            if nz.size == 0:
                continue
            k = int(nz[0])
            row *= pow(int(row[k]), -1, p)
            row %= p
            for nrow in new_rows:
                f = nrow[k]
                if f:
                    nrow -= f * row
                    nrow %= p
            new_rows.append(row.copy())
            new_cols.append(k)
        if new_rows:
            nr = np.stack(new_rows)
            if piv_cols:
                coeffs = basis[:, new_cols]
                if np.any(coeffs):
                    basis -= coeffs @ nr
                    basis %= p
            basis = np.concatenate([basis, nr], axis=0)
            piv_cols.extend(new_cols)
    return len(piv_cols)


def _run(elim: _SparseElim, opts: RankOptions, nnz0: int, t0: float) -> RankResult:
    switched_at = None
    dense_shape = None
    dense_pivots = 0
    steps = 0
    while True:
        cols_active = len(elim.col_rows)
        if elim.active_rows == 0 or cols_active == 0:
            break
        density = elim.density()
        small_enough = elim.active_rows * cols_active <= 1 << 14
        if density > opts.dense_threshold or small_enough:
            switched_at = density
            if elim.p == 2:
                bytes_needed = elim.active_rows * ((cols_active + 63) // 64) * 8
            else:
                # Streaming basis: basis block plus one row chunk.
                bytes_needed = (cols_active * cols_active + 2048 * cols_active) * 8
            if bytes_needed > opts.mem_budget_mb * (1 << 20):
                raise MemoryBudgetError(
                    f"dense phase needs {bytes_needed} bytes for "
                    f"{elim.active_rows}x{cols_active}; budget "
                    f"{opts.mem_budget_mb} MiB")
            live = [r for r in elim.rows if r is not None]
            col_ids = sorted(elim.col_rows)
            dense_shape = (len(live), len(col_ids))
            if elim.p == 2:
                dense_pivots = _dense_rank_gf2(live, col_ids)
            else:
                dense_pivots = _dense_rank_modp(live, col_ids, elim.p)
            break
        i = elim.pop_pivot_row()
        if i is None:
            break
        elim.eliminate(i)
        steps += 1
        if opts.progress and steps % opts.progress_every == 0:
            opts.progress({"sparse_pivots": elim.rank, "nnz": elim.nnz,
                           "density": density, "active_rows": elim.active_rows})
    sparse_pivots = elim.rank
    return RankResult(
        rank=sparse_pivots + dense_pivots,
        rows=elim.nrows, cols=elim.ncols, nnz=nnz0,
        sparse_pivots=sparse_pivots, dense_pivots=dense_pivots,
        switched_at_density=switched_at, dense_shape=dense_shape,
        seconds=time.monotonic() - t0, p=elim.p,
    )


def rank_mod_p(matrix: SparseModMatrix, opts: RankOptions | None = None) -> RankResult:
    """Exact rank of a sparse matrix mod p (hybrid sparse/dense elimination)."""
    opts = opts or RankOptions()
    t0 = time.monotonic()
    matrix.normalize()
    elim = _SparseElim(matrix.p, matrix.rows, matrix.cols)
    current: list[tuple[int, int]] = []
    current_row = -1
    for i, j, v in matrix.entries:
        if i != current_row:
            if current:
                elim.add_row(current_row, current)
            current = []
            current_row = i
        current.append((j, v))
    if current:
        elim.add_row(current_row, current)
    return _run(elim, opts, matrix.nnz, t0)


def rank_sms_path(path: str, p: int = 2,
                  opts: RankOptions | None = None) -> RankResult:
    """Stream an SMS file straight into the elimination state.

    Requires the entries sorted by (i, j) as the format specifies, so one
    row is materialized at a time.
    """
    from .sms import SmsParseError

    opts = opts or RankOptions()
    t0 = time.monotonic()
    elim: _SparseElim | None = None
    current_row = -1
    current: list[tuple[int, int]] = []
    nnz = 0
    terminated = False
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if elim is None:
                if len(parts) != 3 or parts[2] != "M":
                    raise SmsParseError(line_no, f"bad header {line!r}")
                elim = _SparseElim(p, int(parts[0]), int(parts[1]))
                continue
            if len(parts) != 3:
                raise SmsParseError(line_no, f"expected 'i j v', got {line!r}")
            try:
                i, j, v = int(parts[0]), int(parts[1]), int(parts[2])
            except ValueError:
                raise SmsParseError(line_no, f"non-integer entry {line!r}") from None
            if (i, j, v) == (0, 0, 0):
                terminated = True
                continue
            if terminated:
                raise SmsParseError(line_no, "content after terminator")
            if not (1 <= i <= elim.nrows and 1 <= j <= elim.ncols):
                raise SmsParseError(line_no, f"coordinates out of range {line!r}")
            if i - 1 < current_row:
                raise SmsParseError(line_no, "entries not sorted by row")
            if i - 1 != current_row:
                if current:
                    elim.add_row(current_row, current)
                current = []
                current_row = i - 1
            current.append((j - 1, v))
            nnz += 1
    if elim is None:
        raise SmsParseError(0, "empty file")
    if not terminated:
        raise SmsParseError(0, "missing 0 0 0 terminator")
    if current:
        elim.add_row(current_row, current)
    return _run(elim, opts, nnz, t0)


def rank_reference_dense(matrix: SparseModMatrix, cap: int = 5000) -> int:
    """Straightforward full dense elimination; the independent oracle."""
    if matrix.rows > cap or matrix.cols > cap:
        raise ValueError(f"reference oracle capped at {cap} per side")
    p = matrix.p
    m = matrix.to_dense() % p
    rank = 0
    top = 0
    for k in range(matrix.cols):
        nz = np.nonzero(m[top:, k])[0]
        if nz.size == 0:
            continue
        piv = top + int(nz[0])
        if piv != top:
            m[[top, piv]] = m[[piv, top]]
        inv = pow(int(m[top, k]), -1, p)
        below = m[top + 1:, k]
        hits = np.nonzero(below)[0]
        if hits.size:
            f = (below[hits] * inv) % p
            m[top + 1 + hits] = (m[top + 1 + hits] - f[:, None] * m[top]) % p
        rank += 1
        top += 1
        if top == matrix.rows:
            break
    return rank


class Gf2Solver:
    """Reduced echelon factorization of a dense-packed F_2 matrix A, for
    solving A x = b repeatedly (particular solutions; consistency checked)."""

    def __init__(self, matrix: SparseModMatrix):
        if matrix.p != 2:
            raise ValueError("Gf2Solver is mod-2 only")
        self.rows = matrix.rows
        self.cols = matrix.cols
        a = np.zeros((matrix.rows, matrix.cols), dtype=np.uint8)
        for i, j, v in matrix.entries:
            a[i, j] = v % 2
        transform = np.eye(matrix.rows, dtype=np.uint8)
        pivots: list[tuple[int, int]] = []
        top = 0
        for k in range(matrix.cols):
            nz = np.nonzero(a[top:, k])[0]
            if nz.size == 0:
                continue
            piv = top + int(nz[0])
            if piv != top:
                a[[top, piv]] = a[[piv, top]]
                transform[[top, piv]] = transform[[piv, top]]
            hits = np.nonzero(a[:, k])[0]
            hits = hits[hits != top]
            if hits.size:
                a[hits] ^= a[top]
                transform[hits] ^= transform[top]
            pivots.append((top, k))
            top += 1
            if top == matrix.rows:
                break
        self.echelon = a
        self.transform = transform
        self.pivots = pivots
        self.rank = len(pivots)

    def solve(self, b: np.ndarray) -> np.ndarray | None:
        """A particular x with A x = b (mod 2), or None if inconsistent."""
        y = (self.transform @ (b.astype(np.uint8) % 2)) % 2
        if np.any(y[self.rank:]):
            return None
        x = np.zeros(self.cols, dtype=np.uint8)
        for r, c in self.pivots:
            x[c] = y[r]
        return x
