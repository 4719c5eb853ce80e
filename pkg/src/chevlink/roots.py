"""Root systems A_n and B_n: enumeration, spans, heights, link configurations.

Roots are integer coordinate vectors (length n+1 for A_n as e_i - e_j, length
n for B_n as the integer vectors of squared length 1 or 2).  A link
configuration picks three independent base roots and names them; everything
downstream (matrix realizations, unipotent groups, coset complexes) is keyed
off these configurations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "Root",
    "RootSystem",
    "LinkConfig",
    "enumerate_roots",
    "positive_span_roots",
    "pair_span",
    "height",
    "expand_in_base",
    "link_config",
    "LINK_CONFIGS",
]

# Coefficient search bound for span membership.  B_3 expansions never exceed
# coefficient 2; using 3 leaves a margin that tests assert is never reached.
_COEFF_BOUND = 3


@dataclass(frozen=True)
class Root:
    coords: tuple[int, ...]

    def __neg__(self) -> "Root":
        return Root(tuple(-c for c in self.coords))

    def __add__(self, other: "Root") -> "Root":
        return Root(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def scaled(self, n: int) -> "Root":
        return Root(tuple(n * c for c in self.coords))

    def norm_sq(self) -> int:
        return sum(c * c for c in self.coords)

    def __repr__(self) -> str:
        return f"Root{self.coords}"


class RootSystem:
    """An enumerated A_n or B_n root system."""

    def __init__(self, kind: str, rank: int, roots: list[Root]):
        self.kind = kind
        self.rank = rank
        self.roots = roots
        self._root_set = frozenset(roots)

    def __contains__(self, r: Root) -> bool:
        return r in self._root_set

    def is_short(self, r: Root) -> bool:
        """Short roots exist only in B_n (squared length 1)."""
        return self.kind == "B" and r.norm_sq() == 1

    def __repr__(self) -> str:
        return f"RootSystem({self.kind}{self.rank}, {len(self.roots)} roots)"


def enumerate_roots(kind: str, n: int) -> RootSystem:
    """Complete duplicate-free root list in a deterministic order."""
    roots: list[Root] = []
    if kind == "A":
        if n < 1:
            raise ValueError("A_n requires n >= 1")
        for i in range(n + 1):
            for j in range(n + 1):
                if i != j:
                    c = [0] * (n + 1)
                    c[i], c[j] = 1, -1
                    roots.append(Root(tuple(c)))
    elif kind == "B":
        if n < 2:
            raise ValueError("B_n requires n >= 2")
        for i in range(n):
            for a in (1, -1):
                c = [0] * n
                c[i] = a
                roots.append(Root(tuple(c)))  # short
        for i in range(n):
            for j in range(i + 1, n):
                for a in (1, -1):
                    for b in (1, -1):
                        c = [0] * n
                        c[i], c[j] = a, b
                        roots.append(Root(tuple(c)))  # long
    else:
        raise ValueError(f"unsupported kind {kind!r}")
    return RootSystem(kind, n, roots)


def _independent(vectors: Sequence[Root]) -> bool:
    # Gaussian elimination over the rationals on integer rows.
    from fractions import Fraction

    rows = [[Fraction(c) for c in v.coords] for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank == len(vectors)


def expand_in_base(root: Root, base: Sequence[Root]) -> tuple[int, ...] | None:
    """Nonnegative-integer expansion of ``root`` over ``base``, or None.

    Bounded exhaustive search; coefficients above ``_COEFF_BOUND - 1`` would
    indicate a system this module does not support.
    """
    for coeffs in itertools.product(range(_COEFF_BOUND + 1), repeat=len(base)):
        acc = [0] * len(root.coords)
        for c, b in zip(coeffs, base):
            for i, v in enumerate(b.coords):
                acc[i] += c * v
        if tuple(acc) == root.coords:
            if any(c >= _COEFF_BOUND for c in coeffs):
                raise AssertionError("span coefficient reached the search bound")
            return coeffs
    return None


def positive_span_roots(system: RootSystem, base: Sequence[Root]) -> list[Root]:
    """Roots expressible as nonnegative integer combinations of ``base``,
    in the global (height, coords) order."""
    base = list(base)
    if not _independent(base):
        raise ValueError("base roots are linearly dependent")
    found = []
    for r in system.roots:
        coeffs = expand_in_base(r, base)
        if coeffs is not None:
            found.append((sum(coeffs), r.coords, r))
    found.sort(key=lambda t: (t[0], t[1]))
    return [t[2] for t in found]


def pair_span(system: RootSystem, zeta: Root, eta: Root) -> list[tuple[int, int, Root]]:
    """All (a, b, a*zeta + b*eta) with a, b >= 1 that are roots, ordered by
    the global (height-respecting) root order for the pair."""
    if zeta == -eta:
        raise ValueError("pair_span requires zeta != -eta")
    out = []
    for a in range(1, _COEFF_BOUND + 1):
        for b in range(1, _COEFF_BOUND + 1):
            cand = zeta.scaled(a) + eta.scaled(b)
            if cand in system:
                if a >= _COEFF_BOUND or b >= _COEFF_BOUND:
                    raise AssertionError("span coefficient reached the search bound")
                out.append((a + b, cand.coords, a, b, cand))
    out.sort(key=lambda t: (t[0], t[1]))
    return [(a, b, r) for (_, _, a, b, r) in out]


def height(root: Root, base: Sequence[Root]) -> int:
    """Coefficient sum of the unique nonnegative expansion over ``base``."""
    coeffs = expand_in_base(root, base)
    if coeffs is None:
        raise ValueError(f"{root} is not in the nonnegative span of the base")
    return sum(coeffs)


# -- link configurations ----------------------------------------------------

_LETTER = {"alpha": "a", "beta": "b", "gamma": "g", "psi": "p", "omega": "w"}


class LinkConfig:
    """One of the three 2-dimensional link setups.

    ``base`` is the ordered triple (zeta, eta, theta); the RED, GREEN, and
    BLUE subgroups are generated by {zeta, eta}, {zeta, theta}, and
    {eta, theta} respectively.
    """

    COLOR_PAIRS = {"RED": (0, 1), "GREEN": (0, 2), "BLUE": (1, 2)}
    COLORS = ("RED", "GREEN", "BLUE")

    def __init__(self, name: str, system: RootSystem,
                 base: Sequence[tuple[str, Root]]):
        self.name = name
        self.system = system
        self.base_names = tuple(n for n, _ in base)
        self.base = tuple(r for _, r in base)
        self.i_plus = positive_span_roots(system, self.base)
        self.heights = {r: height(r, self.base) for r in self.i_plus}
        self._expansions = {r: expand_in_base(r, self.base) for r in self.i_plus}
        self.color_spans = {
            color: positive_span_roots(system, [self.base[i], self.base[j]])
            for color, (i, j) in self.COLOR_PAIRS.items()
        }

    def expansion(self, root: Root) -> tuple[int, ...]:
        return self._expansions[root]

    def root_name(self, root: Root) -> str:
        """Signed-combination display name, e.g. ``a+2b+2p``."""
        coeffs = self._expansions.get(root)
        if coeffs is None:
            raise ValueError(f"{root} is not in this configuration's span")
        parts = []
        for c, name in zip(coeffs, self.base_names):
            if c == 0:
                continue
            letter = _LETTER[name]
            parts.append(letter if c == 1 else f"{c}{letter}")
        return "+".join(parts) if parts else "0"

    def parse_root(self, text: str) -> Root:
        """Inverse of :meth:`root_name` (also accepts full base-root names)."""
        text = text.strip()
        by_letter = {_LETTER[n]: r for n, r in zip(self.base_names, self.base)}
        by_name = dict(zip(self.base_names, self.base))
        if text in by_name:
            return by_name[text]
        acc = None
        for part in text.split("+"):
            part = part.strip()
            digits = ""
            while part and part[0].isdigit():
                digits += part[0]
                part = part[1:]
            mult = int(digits) if digits else 1
            if part not in by_letter:
                raise ValueError(f"unknown root letter {part!r} in {text!r}")
            term = by_letter[part].scaled(mult)
            acc = term if acc is None else acc + term
        if acc is None or acc not in self.system:
            raise ValueError(f"{text!r} does not name a root")
        return acc

    def __repr__(self) -> str:
        return f"LinkConfig({self.name})"


def _build_configs() -> dict[str, LinkConfig]:
    a3 = enumerate_roots("A", 3)
    b3 = enumerate_roots("B", 3)
    alpha_a = Root((1, -1, 0, 0))
    beta_a = Root((0, 1, -1, 0))
    gamma_a = Root((0, 0, 1, -1))
    alpha_b = Root((1, -1, 0))
    beta_b = Root((0, 1, -1))
    psi_b = Root((0, 0, 1))
    omega_b = Root((-1, 0, 0))
    return {
        "a3": LinkConfig("a3", a3, [("alpha", alpha_a), ("beta", beta_a),
                                    ("gamma", gamma_a)]),
        "b3-small": LinkConfig("b3-small", b3, [("beta", beta_b), ("psi", psi_b),
                                                ("omega", omega_b)]),
        "b3-large": LinkConfig("b3-large", b3, [("alpha", alpha_b), ("beta", beta_b),
                                                ("psi", psi_b)]),
    }


LINK_CONFIGS = _build_configs()


def link_config(name: str) -> LinkConfig:
    try:
        return LINK_CONFIGS[name]
    except KeyError:
        raise ValueError(
            f"unknown configuration {name!r}; expected one of {sorted(LINK_CONFIGS)}"
        ) from None
