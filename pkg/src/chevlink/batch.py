"""Vectorized arithmetic for batches of matrices over a finite field.

Elements of F_{p^k} are flat length-D vectors of F_p coordinates (D = total
degree over the prime field), so a batch of n x n matrices is a uint8 array
of shape (B, n, n, D).  Multiplication contracts the matrix index and folds
the coordinate outer product through the field's structure-constant tensor;
everything stays exact mod p.  This one kernel backs group enumeration,
Steinberg relation sweeps, and graded relation verification.
"""

from __future__ import annotations

import numpy as np

from .gf import FieldElement, FieldParams

__all__ = ["BatchField"]


class BatchField:
    """Vectorized ops for one field; arrays are uint8 with trailing dim D."""

    def __init__(self, field: FieldParams):
        self.field = field
        self.p = field.p
        self.dim = field.dim
        table = np.array(field.mul_table(), dtype=np.int64)  # (D, D, D)
        self._t2 = table.reshape(self.dim * self.dim, self.dim)

    # -- scalars <-> arrays ------------------------------------------------

    def scalar(self, x: FieldElement) -> np.ndarray:
        return np.array(x.coords, dtype=np.uint8)

    def to_element(self, vec: np.ndarray) -> FieldElement:
        return self.field.element(tuple(int(c) for c in vec))

    def encode(self, elements) -> np.ndarray:
        """Stack scalars into a (B, D) array."""
        return np.array([e.coords for e in elements], dtype=np.uint8)

    # -- elementwise field ops ----------------------------------------------

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return ((a.astype(np.int64) + b) % self.p).astype(np.uint8)

    def sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return ((a.astype(np.int64) - b) % self.p).astype(np.uint8)

    def neg(self, a: np.ndarray) -> np.ndarray:
        return ((-a.astype(np.int64)) % self.p).astype(np.uint8)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise field product on (..., D) arrays (broadcasting ok)."""
        a64 = a.astype(np.int64)
        b64 = b.astype(np.int64)
        outer = a64[..., :, None] * b64[..., None, :]
        folded = outer.reshape(outer.shape[:-2] + (self.dim * self.dim,)) @ self._t2
        return (folded % self.p).astype(np.uint8)

    def scale_int(self, a: np.ndarray, n: int) -> np.ndarray:
        return ((a.astype(np.int64) * (n % self.p)) % self.p).astype(np.uint8)

    def power(self, a: np.ndarray, n: int) -> np.ndarray:
        """Elementwise n-th power (n >= 0) on (..., D) arrays."""
        result = np.zeros(a.shape, dtype=np.uint8)
        result[..., 0] = 1
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    # -- matrices ------------------------------------------------------------

    def identity(self, n: int, batch_shape: tuple[int, ...] = ()) -> np.ndarray:
        m = np.zeros(batch_shape + (n, n, self.dim), dtype=np.uint8)
        for i in range(n):
            m[..., i, i, 0] = 1
        return m

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Matrix product on (..., n, n, D) arrays (leading dims broadcast)."""
        a64 = a.astype(np.int64)
        b64 = b.astype(np.int64)
        prod = np.einsum("...ika,...kjb->...ijab", a64, b64)
        n = prod.shape[-4]
        folded = prod.reshape(prod.shape[:-2] + (self.dim * self.dim,)) @ self._t2
        return (folded % self.p).astype(np.uint8)

    def matmul_many(self, mats) -> np.ndarray:
        """Left-to-right product of a sequence of matrix batches."""
        it = iter(mats)
        out = next(it)
        for m in it:
            out = self.matmul(out, m)
        return out

    def mats_equal(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Boolean array over the batch dims: exact matrix equality."""
        return np.all(a == b, axis=(-3, -2, -1))

    # -- canonical serialization ----------------------------------------------

    @staticmethod
    def key(mat: np.ndarray) -> bytes:
        """Canonical bytes of a single (n, n, D) matrix (row-major)."""
        return mat.tobytes()

    def keys(self, mats: np.ndarray) -> list[bytes]:
        """Canonical bytes for each matrix of a (B, n, n, D) batch."""
        b = mats.shape[0]
        flat = np.ascontiguousarray(mats).reshape(b, -1)
        return [flat[i].tobytes() for i in range(b)]

    def from_key(self, key: bytes, n: int) -> np.ndarray:
        return np.frombuffer(key, dtype=np.uint8).reshape(n, n, self.dim).copy()
