"""Normal-form (collection) realization of unipotent groups.

The 7x7 orthogonal realization of B_3 is not faithful in characteristic 2
(every structure constant carrying a factor 2 vanishes), so groups over F_2
are realized abstractly instead: an element is its normal-form entry tuple
over the positive span in the global height-respecting order, and products
are collected back to normal form with the commutator relations

    x_hi(t) x_lo(u) = prod_span x_(a hi + b lo)(C_{a,b} t^a u^b) x_lo(u) x_hi(t).

The integer constants C are never assumed: they are fitted once per root
system from the matrix realization over F_5, where it is faithful, and
reduced into the target field.  Collection terminates because every inserted
symbol has strictly larger height than the pair it replaces.
"""

from __future__ import annotations

import numpy as np

from .batch import BatchField
from .chevalley import Realization, fit_commutator
from .gf import FieldElement, FieldParams, field_create
from .roots import LinkConfig, Root, positive_span_roots

__all__ = ["CollectionGroup", "collection_constants"]

_CONSTANTS_CACHE: dict = {}


def collection_constants(config: LinkConfig) -> dict:
    """Integer Chevalley constants for every ordered pair of span roots,
    fitted from the F_5 matrix realization."""
    key = (config.system.kind, config.system.rank, config.base)
    if key in _CONSTANTS_CACHE:
        return _CONSTANTS_CACHE[key]
    real = Realization(config.system, field_create(5, 1))
    span = positive_span_roots(config.system, config.base)
    table: dict = {}
    for hi in span:
        for lo in span:
            if hi == lo or hi == -lo:
                continue
            fit = fit_commutator(real, hi, lo)
            if not fit.passed:
                raise AssertionError(f"constant fit failed for ({hi}, {lo}): {fit.detail}")
            table[(hi, lo)] = fit.constants
    _CONSTANTS_CACHE[key] = table
    return table


class CollectionGroup:
    """A unipotent group as normal-form tuples with collected multiplication.

    Exposes the same surface the coset/complex machinery uses on
    :class:`chevlink.unipotent.MatrixGroup`: ``size``, ``index``,
    ``elements`` (here a (size, m, D) array of entry vectors), ``key_of``,
    and batched coset member enumeration.
    """

    def __init__(self, config: LinkConfig, roots: list[Root],
                 field: FieldParams):
        self.config = config
        self.field = field
        self.bf = BatchField(field)
        self.roots = list(roots)
        # Tuples are always full-width over the configuration's span, so a
        # subgroup's elements live in the same coordinates as the group's.
        self.span = list(config.i_plus)
        self._pos = {r: i for i, r in enumerate(self.span)}
        self.support = positive_span_roots(config.system, roots)
        self._constants = collection_constants(config)
        self._pair_span_cache: dict = {}
        self.generators = None  # kept for interface parity
        self.enumerated = True

        m = len(self.span)
        d = field.dim
        els = list(field.enumerate())
        q = len(els)
        support_pos = sorted(self._pos[r] for r in self.support)
        size = q ** len(support_pos)
        self.predicted_size = size
        self.elements = np.zeros((size, m, d), dtype=np.uint8)
        self.index: dict[bytes, int] = {}
        enc = self.bf.encode(els)
        idxs = np.arange(size, dtype=np.int64)
        for pos in reversed(support_pos):
            self.elements[:, pos, :] = enc[idxs % q]
            idxs //= q
        flat = self.elements.reshape(size, -1)
        for i in range(size):
            self.index[flat[i].tobytes()] = i

    # -- interface parity with MatrixGroup ---------------------------------

    @property
    def size(self) -> int:
        return len(self.index)

    def key_of(self, element: np.ndarray) -> bytes:
        return np.ascontiguousarray(element, dtype=np.uint8).tobytes()

    def __contains__(self, element: np.ndarray) -> bool:
        return self.key_of(element) in self.index

    def element(self, i: int) -> np.ndarray:
        return self.elements[i]

    def identity(self) -> np.ndarray:
        return np.zeros_like(self.elements[0])

    # -- tuple <-> scalar views --------------------------------------------

    def to_tuple(self, element: np.ndarray) -> tuple[FieldElement, ...]:
        return tuple(self.field.element(tuple(int(c) for c in row))
                     for row in element)

    def from_tuple(self, entries) -> np.ndarray:
        out = np.zeros_like(self.elements[0])
        for pos, e in enumerate(entries):
            out[pos, :] = e.coords
        return out

    # -- group law by collection ---------------------------------------------

    def _pair_span(self, hi: Root, lo: Root):
        key = (hi, lo)
        if key not in self._pair_span_cache:
            from .roots import pair_span

            self._pair_span_cache[key] = pair_span(self.config.system, hi, lo)
        return self._pair_span_cache[key]

    def _collect(self, word: list[tuple[int, FieldElement]]) -> tuple:
        """Collect a symbol word (root position, entry) into normal form."""
        word = [(r, t) for r, t in word if not t.is_zero()]
        guard = 0
        while True:
            guard += 1
            if guard > 100_000:
                raise AssertionError("collection did not terminate")
            swapped = False
            for i in range(len(word) - 1):
                r1, t1 = word[i]
                r2, t2 = word[i + 1]
                if r1 > r2:
                    hi, lo = self.span[r1], self.span[r2]
                    inserted: list[tuple[int, FieldElement]] = []
                    consts = self._constants.get((hi, lo), {})
                    for a, b, xi in self._pair_span(hi, lo):
                        c = consts[(a, b)]
                        entry = ((t1 ** a) * (t2 ** b)).scale(c)
                        if not entry.is_zero():
                            inserted.append((self._pos[xi], entry))
                    word[i:i + 2] = inserted + [(r2, t2), (r1, t1)]
                    swapped = True
                    break
                if r1 == r2:
                    merged = t1 + t2
                    word[i:i + 2] = [] if merged.is_zero() else [(r1, merged)]
                    swapped = True
                    break
            if not swapped:
                return tuple(word)

    def multiply_tuples(self, a, b) -> tuple[FieldElement, ...]:
        word = [(i, t) for i, t in enumerate(a)] + [(i, t) for i, t in enumerate(b)]
        collected = self._collect(word)
        out = [self.field.zero()] * len(self.span)
        for r, t in collected:
            out[r] = t
        return tuple(out)

    def inverse_tuple(self, a) -> tuple[FieldElement, ...]:
        word = [(i, -t) for i, t in reversed(list(enumerate(a)))]
        collected = self._collect(word)
        out = [self.field.zero()] * len(self.span)
        for r, t in collected:
            out[r] = t
        return tuple(out)

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.from_tuple(self.multiply_tuples(self.to_tuple(x),
                                                    self.to_tuple(y)))

    def inverse(self, x: np.ndarray) -> np.ndarray:
        return self.from_tuple(self.inverse_tuple(self.to_tuple(x)))

    def left_member_keys(self, x: np.ndarray, sub_elements: np.ndarray) -> list[bytes]:
        """Keys of x * h for each h of a subgroup's element array."""
        xt = self.to_tuple(x)
        out = []
        for row in range(sub_elements.shape[0]):
            prod = self.multiply_tuples(xt, self.to_tuple(sub_elements[row]))
            out.append(self.key_of(self.from_tuple(prod)))
        return out

    def __repr__(self) -> str:
        return (f"CollectionGroup({self.config.name}, {len(self.span)} roots "
                f"over {self.field.describe()}, {self.size} elements)")
