"""Matrix group closure by BFS, coset enumeration, and normal forms.

Groups are stored as dicts from a canonical serialization (row-major bytes
of the flat coefficient array) to a dense index assigned in discovery order,
so iteration order, coset representatives, and every downstream id are
deterministic.  Closure multiplies whole BFS frontiers through the batch
kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .batch import BatchField
from .chevalley import Realization
from .gf import FieldElement, FieldParams, PolySubset
from .roots import LinkConfig, Root

__all__ = [
    "GroupBudgetError",
    "MatrixGroup",
    "generate_group",
    "unipotent_group",
    "verify_normal_form",
    "cosets",
    "CosetPartition",
]

DEFAULT_BUDGET = 10_000_000


class GroupBudgetError(RuntimeError):
    """Predicted or discovered group size exceeds the element budget."""


class MatrixGroup:
    """A finite group of n x n matrices over a field, fully enumerated.

    ``index`` maps canonical element bytes to a dense id in discovery order;
    ``elements`` is the matching (size, n, n, D) array.  ``witness`` maps an
    element id to (parent id, generator id), enough to rebuild a generator
    word for every element.
    """

    def __init__(self, field: FieldParams, n: int, generators: np.ndarray,
                 elements: np.ndarray, index: dict[bytes, int],
                 witness: list[tuple[int, int] | None],
                 enumerated: bool = True, predicted_size: int | None = None):
        self.field = field
        self.bf = BatchField(field)
        self.n = n
        self.generators = generators
        self.elements = elements
        self.index = index
        self.witness = witness
        self.enumerated = enumerated
        self.predicted_size = predicted_size

    @property
    def size(self) -> int:
        if not self.enumerated:
            raise GroupBudgetError("group was not enumerated")
        return len(self.index)

    def key_of(self, mat: np.ndarray) -> bytes:
        return np.ascontiguousarray(mat, dtype=np.uint8).tobytes()

    def __contains__(self, mat: np.ndarray) -> bool:
        return self.key_of(mat) in self.index

    def element(self, i: int) -> np.ndarray:
        return self.elements[i]

    def identity(self) -> np.ndarray:
        return self.bf.identity(self.n, ())

    def word_for(self, i: int) -> list[int]:
        """Generator-index word multiplying (left to right) to element i."""
        out: list[int] = []
        while True:
            w = self.witness[i]
            if w is None:
                break
            parent, gen = w
            out.append(gen)
            i = parent
        return out  # generators were applied on the left, in this order

    def left_member_keys(self, x: np.ndarray, sub_elements: np.ndarray) -> list[bytes]:
        """Keys of x * h for each h of a subgroup's element array."""
        members = self.bf.matmul(x[None], sub_elements)
        flat = np.ascontiguousarray(members).reshape(members.shape[0], -1)
        return [flat[r].tobytes() for r in range(members.shape[0])]

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.bf.matmul(x[None], y[None])[0]

    def inverse(self, x: np.ndarray) -> np.ndarray:
        """Inverse by order: x^(n-1) where n = element order (finite group)."""
        acc = x
        prev = self.identity()
        while not (acc == self.identity()).all():
            prev = acc
            acc = self.bf.matmul(acc[None], x[None])[0]
        return prev

    def __repr__(self) -> str:
        state = f"{len(self.index)} elements" if self.enumerated else "not enumerated"
        return f"MatrixGroup({self.n}x{self.n} over {self.field.describe()}, {state})"


def generate_group(field: FieldParams, generators: np.ndarray, *,
                   budget: int = DEFAULT_BUDGET,
                   predicted_size: int | None = None) -> MatrixGroup:
    """Closure of the generator set under left multiplication, by BFS."""
    if predicted_size is not None and predicted_size > budget:
        raise GroupBudgetError(
            f"predicted size {predicted_size} exceeds budget {budget}")
    bf = BatchField(field)
    n = generators.shape[1]
    identity = bf.identity(n, ())
    index: dict[bytes, int] = {}
    chunks: list[np.ndarray] = []
    witness: list[tuple[int, int] | None] = []

    def key(mat):
        return mat.tobytes()

    index[key(np.ascontiguousarray(identity))] = 0
    chunks.append(identity[None])
    witness.append(None)
    frontier = identity[None]
    frontier_ids = [0]
    total = 1
    while len(frontier_ids) > 0:
        new_mats = []
        new_wit = []
        for g in range(generators.shape[0]):
            prods = bf.matmul(generators[g][None], frontier)
            flat = np.ascontiguousarray(prods).reshape(prods.shape[0], -1)
            for row in range(prods.shape[0]):
                k = flat[row].tobytes()
                if k not in index:
                    index[k] = total
                    total += 1
                    new_mats.append(prods[row])
                    new_wit.append((frontier_ids[row], g))
                    if total > budget:
                        raise GroupBudgetError(
                            f"closure exceeded budget {budget}")
        if new_mats:
            arr = np.stack(new_mats)
            chunks.append(arr)
            start = total - len(new_mats)
            frontier_ids = list(range(start, total))
            frontier = arr
            witness.extend(new_wit)
        else:
            frontier_ids = []
    elements = np.concatenate(chunks, axis=0)
    if predicted_size is not None and total != predicted_size:
        raise AssertionError(
            f"enumerated {total} elements, predicted {predicted_size}")
    return MatrixGroup(field, n, generators, elements, index, witness,
                       predicted_size=predicted_size)


def _entry_list(field: FieldParams, entries) -> list[FieldElement]:
    if entries is None:
        return list(field.enumerate())
    if isinstance(entries, PolySubset):
        return list(entries.enumerate())
    return list(entries)


def predicted_unipotent_size(config: LinkConfig, roots: list[Root],
                             entry_count: int, graded: bool) -> int:
    """q^|span| for base entries, q^sum(ht+1) for degree-<=1 polynomials."""
    from .roots import positive_span_roots

    span = positive_span_roots(config.system, roots)
    if not graded:
        return entry_count ** len(span)
    q = int(round(entry_count ** 0.5))
    return q ** sum(config.heights[r] + 1 for r in span)


def unipotent_group(config: LinkConfig, roots: list[Root], field: FieldParams,
                    entries=None, *, budget: int = DEFAULT_BUDGET):
    """The unipotent subgroup generated by x_zeta(t), zeta in ``roots``.

    ``entries`` defaults to the whole field; pass a :class:`PolySubset` for
    graded groups.  If the predicted size exceeds the budget, the group is
    returned un-enumerated, holding only its generators.

    The B-type matrix realization is not faithful in characteristic 2 (the
    paper's q-power size checks fail there), so base-entry B groups over F_2
    are built on the normal-form collection engine instead.
    """
    graded = isinstance(entries, PolySubset)
    if config.system.kind == "B" and field.p == 2:
        if graded:
            raise NotImplementedError(
                "graded B-type groups are not supported in characteristic 2")
        from .collection import CollectionGroup

        group = CollectionGroup(config, roots, field)
        if group.size > budget:
            raise GroupBudgetError(
                f"predicted size {group.predicted_size} exceeds budget {budget}")
        return group
    real = Realization(config.system, field)
    entry_els = _entry_list(field, entries)
    gens = []
    for zeta in roots:
        enc = real.bf.encode(entry_els)
        gens.append(real.root_matrix_batch(zeta, enc))
    generators = np.concatenate(gens, axis=0)
    predicted = predicted_unipotent_size(config, roots, len(entry_els), graded)
    if predicted > budget:
        return MatrixGroup(field, real.n, generators, generators[:0],
                           {}, [], enumerated=False, predicted_size=predicted)
    return generate_group(field, generators, budget=budget,
                          predicted_size=predicted)


def normal_form_order(config: LinkConfig, roots: list[Root]) -> list[Root]:
    """The configuration's positive span in the global height-respecting order."""
    from .roots import positive_span_roots

    return positive_span_roots(config.system, roots)


def verify_normal_form(config: LinkConfig, group, roots: list[Root], *,
                       entries=None, chunk: int = 1 << 14) -> dict:
    """Check that ordered products over the span biject onto the group.

    Tuples (t_zeta) range over the field (or the graded entry sets
    F_q[x]_{<= ht}) and are multiplied in the global order; the map must hit
    every element exactly once.
    """
    from .collection import CollectionGroup

    if isinstance(group, CollectionGroup):
        return _verify_normal_form_collected(group)
    real = Realization(config.system, group.field)
    bf = real.bf
    span = normal_form_order(config, roots)
    if isinstance(entries, PolySubset):
        entry_sets = [list(PolySubset(group.field, config.heights[r]).enumerate())
                      for r in span]
    else:
        base = _entry_list(group.field, entries)
        entry_sets = [base for _ in span]

    total = 1
    for s in entry_sets:
        total *= len(s)
    if group.enumerated and total != group.size:
        return {"passed": False, "detail":
                f"tuple count {total} != group size {group.size}"}

    seen = np.zeros(group.size, dtype=bool)
    # Iterate tuple space in chunks: mixed-radix decode of a running counter.
    radices = [len(s) for s in entry_sets]
    encs = [bf.encode(s) for s in entry_sets]
    for start in range(0, total, chunk):
        count = min(chunk, total - start)
        idxs = np.arange(start, start + count, dtype=np.int64)
        prod = None
        for pos in range(len(span) - 1, -1, -1):
            digit = idxs % radices[pos]
            idxs //= radices[pos]
            mats = real.root_matrix_batch(span[pos], encs[pos][digit])
            prod = mats if prod is None else bf.matmul(mats, prod)
        flat = np.ascontiguousarray(prod).reshape(count, -1)
        for row in range(count):
            k = flat[row].tobytes()
            gid = group.index.get(k)
            if gid is None:
                return {"passed": False, "detail": "product left the group"}
            if seen[gid]:
                return {"passed": False, "detail": "normal-form collision"}
            seen[gid] = True
    return {"passed": bool(seen.all()), "tuples": total,
            "detail": "" if seen.all() else "missed elements"}


def _verify_normal_form_collected(group) -> dict:
    """Collection-engine variant: the ordered product of single-root symbols
    must collect back to the expected tuple, and the group axioms must hold
    on a deterministic sample of triples."""
    field = group.field
    seen = set()
    for eid in range(group.size):
        entries = group.to_tuple(group.elements[eid])
        prod = tuple(field.zero() for _ in group.span)
        for pos, t in enumerate(entries):
            single = tuple(t if m == pos else field.zero()
                           for m in range(len(group.span)))
            prod = group.multiply_tuples(prod, single)
        key = group.key_of(group.from_tuple(prod))
        if group.index.get(key) != eid:
            return {"passed": False, "detail": "collected product mismatch"}
        seen.add(key)
    if len(seen) != group.size:
        return {"passed": False, "detail": "normal-form collision"}
    # Sampled associativity and inverses.
    step = max(1, group.size // 17)
    ids = list(range(0, group.size, step))[:17]
    for a in ids:
        for b in ids:
            for c in ids[:5]:
                ta = group.to_tuple(group.elements[a])
                tb = group.to_tuple(group.elements[b])
                tc = group.to_tuple(group.elements[c])
                lhs = group.multiply_tuples(group.multiply_tuples(ta, tb), tc)
                rhs = group.multiply_tuples(ta, group.multiply_tuples(tb, tc))
                if lhs != rhs:
                    return {"passed": False, "detail": "associativity failure"}
        inv = group.inverse_tuple(group.to_tuple(group.elements[a]))
        prod = group.multiply_tuples(group.to_tuple(group.elements[a]), inv)
        if any(not t.is_zero() for t in prod):
            return {"passed": False, "detail": "inverse failure"}
    return {"passed": True, "tuples": group.size, "detail": ""}


@dataclass
class CosetPartition:
    """Left (or right) cosets of H in G with canonical representatives."""

    group: MatrixGroup
    subgroup: MatrixGroup
    side: str
    rep_keys: list[bytes]              # coset id -> canonical representative
    coset_of: np.ndarray               # element id -> coset id

    @property
    def count(self) -> int:
        return len(self.rep_keys)

    def coset_of_key(self, key: bytes) -> int:
        return int(self.coset_of[self.group.index[key]])


def cosets(group: MatrixGroup, subgroup: MatrixGroup,
           side: str = "left") -> CosetPartition:
    """Partition ``group`` into cosets of ``subgroup``.

    Representatives are the minimal canonical serialization in each coset;
    ids are assigned in the order cosets are first discovered when scanning
    the group's elements in their own canonical order.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if subgroup.generators is not None:
        for g in range(subgroup.generators.shape[0]):
            if subgroup.generators[g] not in group:
                raise ValueError("subgroup generators do not lie in the group")
    else:
        for eid in range(subgroup.size):
            if subgroup.elements[eid] not in group:
                raise ValueError("subgroup elements do not lie in the group")
    if group.size % subgroup.size != 0:
        raise ValueError("subgroup size does not divide group size")

    sub_elems = subgroup.elements
    coset_of = np.full(group.size, -1, dtype=np.int64)
    rep_keys: list[bytes] = []
    for eid in range(group.size):
        if coset_of[eid] >= 0:
            continue
        x = group.elements[eid]
        if side == "left":
            keys = group.left_member_keys(x, sub_elems)
        else:
            keys = [group.key_of(group.multiply(sub_elems[r], x))
                    for r in range(sub_elems.shape[0])]
        cid = len(rep_keys)
        best: bytes | None = None
        for k in keys:
            coset_of[group.index[k]] = cid
            if best is None or k < best:
                best = k
        rep_keys.append(best)
    expected = group.size // subgroup.size
    if len(rep_keys) != expected:
        raise AssertionError(
            f"found {len(rep_keys)} cosets, expected {expected}")
    return CosetPartition(group, subgroup, side, rep_keys, coset_of)
