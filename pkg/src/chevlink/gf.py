"""Exact arithmetic in F_{p^k} and its polynomial-degree-bounded subsets.

Fields are represented as towers of quotient rings: a prime field F_p, or an
extension ``base[y]/(modulus)`` whose coefficients live in an already
constructed field.  Every element is canonically a flat vector of F_p
coordinates (low degree first, inner base coordinates nested low-to-high),
which makes hashing, serialization, and the vectorized batch kernel
(:mod:`chevlink.batch`) uniform across prime fields, plain extensions, and
towers such as F_{25}[x]/(f).

The modulus of an extension is always the lexicographically smallest monic
irreducible of its degree, comparing coefficient tuples low-degree-first, so
field construction is deterministic and reproducible.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterator, Sequence

__all__ = [
    "FieldParams",
    "FieldElement",
    "PolySubset",
    "ZeroInversionError",
    "field_create",
    "extend_field",
    "sum_of_two_squares",
]


class ZeroInversionError(ArithmeticError):
    """Raised when inverting the zero element of a field."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class FieldParams:
    """Immutable descriptor of a finite field, possibly built as a tower.

    Attributes:
        p: characteristic (prime).
        k: extension degree over ``base`` (1 for the prime field itself).
        modulus: monic irreducible of degree ``k`` over ``base``, as a
            low-to-high tuple of ``k + 1`` base elements (``(0, 1)`` i.e.
            the polynomial ``y`` serves as the degree-1 placeholder).
        base: the coefficient field, or ``None`` for the prime field.
        dim: total degree over F_p.
        order: number of elements, ``p ** dim``.
    """

    __slots__ = ("p", "k", "modulus", "base", "dim", "order", "_mul_table",
                 "_zero", "_one", "_gen")

    def __init__(self, p: int, k: int, modulus, base: "FieldParams | None"):
        self.p = p
        self.k = k
        self.base = base
        self.modulus = modulus
        self.dim = k * (base.dim if base is not None else 1)
        self.order = p ** self.dim
        self._mul_table = None
        self._zero = FieldElement(self, (0,) * self.dim)
        self._one = FieldElement(self, (1,) + (0,) * (self.dim - 1))
        if base is None:
            self._gen = self._one
        else:
            coords = [0] * self.dim
            coords[base.dim] = 1  # the class of y
            self._gen = FieldElement(self, tuple(coords))

    # -- basic elements -------------------------------------------------

    def zero(self) -> "FieldElement":
        return self._zero

    def one(self) -> "FieldElement":
        return self._one

    def gen(self) -> "FieldElement":
        """The class of the adjoined variable (1 for a prime field)."""
        return self._gen

    def element(self, coords: Sequence[int]) -> "FieldElement":
        """Element from flat F_p coordinates (low-to-high, reduced mod p)."""
        coords = tuple(int(c) % self.p for c in coords)
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(coords)}")
        return FieldElement(self, coords)

    def from_int(self, n: int) -> "FieldElement":
        """The image of the integer ``n`` (i.e. ``n * 1``)."""
        return self.element((n % self.p,) + (0,) * (self.dim - 1))

    def from_base_coeffs(self, coeffs: Sequence["FieldElement | int"]) -> "FieldElement":
        """Element sum(c_j * y^j) from up to ``k`` base-field coefficients."""
        if self.base is None:
            (c,) = tuple(coeffs) or (0,)
            return self.from_int(c if isinstance(c, int) else c.coords[0])
        if len(coeffs) > self.k:
            raise ValueError("too many coefficients")
        d = self.base.dim
        flat = [0] * self.dim
        for j, c in enumerate(coeffs):
            if isinstance(c, int):
                c = self.base.from_int(c)
            elif c.field is not self.base:
                raise ValueError("coefficient from the wrong field")
            flat[j * d:(j + 1) * d] = c.coords
        return FieldElement(self, tuple(flat))

    def base_coeffs(self, x: "FieldElement") -> tuple["FieldElement", ...]:
        """Decompose ``x`` as a degree-<k polynomial over the base field."""
        if self.base is None:
            return (x,)
        d = self.base.dim
        return tuple(
            FieldElement(self.base, x.coords[j * d:(j + 1) * d])
            for j in range(self.k)
        )

    # -- multiplication structure ---------------------------------------

    def mul_table(self):
        """Structure constants T with basis_a * basis_b = sum_d T[a][b][d] e_d."""
        if self._mul_table is None:
            self._mul_table = _build_mul_table(self)
        return self._mul_table

    # -- enumeration -----------------------------------------------------

    def enumerate(self) -> Iterator["FieldElement"]:
        """All elements in the canonical order (see :func:`element_sort_key`).

        The order is coefficient-lexicographic with the low-degree
        coefficient most significant, applied recursively through the tower;
        it is stable across runs and platforms.
        """
        if self.base is None:
            for c in range(self.p):
                yield FieldElement(self, (c,))
            return
        for coeffs in itertools.product(self.base.enumerate(), repeat=self.k):
            yield self.from_base_coeffs(coeffs)

    def __repr__(self) -> str:
        return f"FieldParams({self.describe()})"

    def describe(self) -> str:
        """Stable ``p^k/modulus-coeffs`` descriptor used in CLI flags and reports."""
        if self.base is None:
            return f"{self.p}^1/0,1"
        mod = ";".join(",".join(map(str, c.coords)) for c in self.modulus)
        if self.base.base is None:
            return f"{self.p}^{self.k}/{mod}"
        return f"({self.base.describe()})^{self.k}/{mod}"


class FieldElement:
    """An element of a :class:`FieldParams`, as canonical flat coordinates."""

    __slots__ = ("field", "coords")

    def __init__(self, field: FieldParams, coords: tuple[int, ...]):
        self.field = field
        self.coords = coords

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __eq__(self, other) -> bool:
        return (isinstance(other, FieldElement)
                and self.field is other.field and self.coords == other.coords)

    def __hash__(self) -> int:
        return hash((id(self.field), self.coords))

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        p = self.field.p
        return FieldElement(self.field, tuple(
            (a + b) % p for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        p = self.field.p
        return FieldElement(self.field, tuple(
            (a - b) % p for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "FieldElement":
        p = self.field.p
        return FieldElement(self.field, tuple((-a) % p for a in self.coords))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        table = self.field.mul_table()
        p = self.field.p
        dim = self.field.dim
        acc = [0] * dim
        for a, xa in enumerate(self.coords):
            if xa == 0:
                continue
            row = table[a]
            for b, yb in enumerate(other.coords):
                if yb == 0:
                    continue
                cell = row[b]
                xy = xa * yb
                for d in range(dim):
                    acc[d] += xy * cell[d]
        return FieldElement(self.field, tuple(c % p for c in acc))

    def __pow__(self, n: int) -> "FieldElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroInversionError("inverse of zero")
        return self ** (self.field.order - 2)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return self * other.inverse()

    def scale(self, n: int) -> "FieldElement":
        """Multiply by the integer ``n`` (image in the prime field)."""
        p = self.field.p
        n %= p
        return FieldElement(self.field, tuple((n * c) % p for c in self.coords))

    def sort_key(self) -> tuple[int, ...]:
        """Key realizing the canonical enumeration order."""
        return _nest_key(self.field, self.coords)

    def _check(self, other: "FieldElement") -> None:
        if self.field is not other.field:
            raise ValueError("elements from different fields")

    def __repr__(self) -> str:
        return f"<{','.join(map(str, self.coords))}>"


def _nest_key(field: FieldParams, coords: tuple[int, ...]) -> tuple[int, ...]:
    # Lexicographic with low-degree coefficient most significant, recursively.
    if field.base is None:
        return coords
    d = field.base.dim
    out: list[int] = []
    for j in range(field.k):
        out.extend(_nest_key(field.base, coords[j * d:(j + 1) * d]))
    return tuple(out)


# -- field arithmetic with a functional face (matches the op contract) ----

_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "neg": lambda a, _b: -a,
    "inv": lambda a, _b: a.inverse(),
    "pow": lambda a, n: a ** n,
}


def field_arith(a: FieldElement, b, op: str) -> FieldElement:
    """Apply a named field operation; ``b`` is an int exponent for ``pow``."""
    try:
        f = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None
    return f(a, b)


# -- polynomials over an arbitrary field (for moduli and test oracles) ----

def poly_trim(c: list[FieldElement]) -> list[FieldElement]:
    while c and c[-1].is_zero():
        c.pop()
    return c


def poly_mul(f: Sequence[FieldElement], g: Sequence[FieldElement],
             field: FieldParams) -> list[FieldElement]:
    if not f or not g:
        return []
    out = [field.zero()] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a.is_zero():
            continue
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return poly_trim(out)


def poly_mod(f: Sequence[FieldElement], m: Sequence[FieldElement],
             field: FieldParams) -> list[FieldElement]:
    """Remainder of ``f`` modulo ``m`` (``m`` monic)."""
    r = list(f)
    dm = len(m) - 1
    while len(r) - 1 >= dm and r:
        lead = r[-1]
        shift = len(r) - 1 - dm
        if not lead.is_zero():
            for i in range(dm + 1):
                r[shift + i] = r[shift + i] - lead * m[i]
        r.pop()
    return poly_trim(r)


def poly_powmod(f, e: int, m, field: FieldParams) -> list[FieldElement]:
    result = [field.one()]
    base = poly_mod(f, m, field)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base, field), m, field)
        base = poly_mod(poly_mul(base, base, field), m, field)
        e >>= 1
    return result


def poly_gcd(f, g, field: FieldParams) -> list[FieldElement]:
    f, g = list(f), list(g)
    while g:
        f, g = g, poly_mod(f, g, field)
    if f:
        inv = f[-1].inverse()
        f = [c * inv for c in f]
    return f


def is_irreducible(modulus: Sequence[FieldElement], base: FieldParams) -> bool:
    """Rabin's test over ``base`` (order q): monic f of degree k is
    irreducible iff x^(q^k) = x mod f and gcd(x^(q^(k/r)) - x, f) = 1 for
    every prime r dividing k."""
    k = len(modulus) - 1
    if k < 1 or modulus[-1] != base.one():
        return False
    if k == 1:
        return True
    q = base.order
    x = [base.zero(), base.one()]
    for r in _prime_factors(k):
        h = poly_powmod(x, q ** (k // r), modulus, base)
        # h - x
        diff = list(h) + [base.zero()] * max(0, 2 - len(h))
        diff[1] = diff[1] - base.one()
        diff = poly_trim(diff)
        g = poly_gcd(diff, list(modulus), base)
        if len(g) != 1:
            return False
    h = poly_powmod(x, q ** k, modulus, base)
    diff = list(h) + [base.zero()] * max(0, 2 - len(h))
    diff[1] = diff[1] - base.one()
    return not poly_trim(diff)


def smallest_irreducible(base: FieldParams, k: int) -> tuple[FieldElement, ...]:
    """Lexicographically smallest monic irreducible of degree k over base,
    comparing coefficient tuples low-degree-first."""
    if k == 1:
        return (base.zero(), base.one())
    one = base.one()
    # A zero constant term means the root 0, so c0 iterates nonzero only;
    # this prunes |base|^(k-1) hopeless candidates per zero c0.
    for c0 in base.enumerate():
        if c0.is_zero():
            continue
        for rest in itertools.product(base.enumerate(), repeat=k - 1):
            candidate = (c0,) + tuple(rest) + (one,)
            if is_irreducible(candidate, base):
                return candidate
    raise RuntimeError("no irreducible polynomial found")  # unreachable


def _build_mul_table(field: FieldParams):
    """Structure constants for the flat basis, as nested int tuples."""
    p, dim = field.p, field.dim
    if field.base is None:
        return (((1,),),)
    base = field.base
    d = base.dim
    k = field.k
    base_table = base.mul_table()
    # Powers y^s mod modulus for s in [0, 2k-2], as base-coefficient vectors.
    powers: list[list[FieldElement]] = []
    cur = [base.one()] + [base.zero()] * (k - 1)
    for s in range(2 * k - 1):
        powers.append(list(cur))
        # multiply by y
        nxt = [base.zero()] * k
        top = cur[k - 1]
        for j in range(k - 1):
            nxt[j + 1] = cur[j]
        if not top.is_zero():
            for j in range(k):
                nxt[j] = nxt[j] - top * field.modulus[j]
        cur = nxt

    table = [[[0] * dim for _ in range(dim)] for _ in range(dim)]
    for j1 in range(k):
        for i1 in range(d):
            a = j1 * d + i1
            for j2 in range(k):
                for i2 in range(d):
                    b = j2 * d + i2
                    prod = base.element(base_table[i1][i2])  # beta_i1 * beta_i2
                    for j, c in enumerate(powers[j1 + j2]):
                        if c.is_zero():
                            continue
                        coeff = c * prod
                        for i in range(d):
                            v = coeff.coords[i]
                            if v:
                                table[a][b][j * d + i] = (
                                    table[a][b][j * d + i] + v) % p
    return tuple(tuple(tuple(cell) for cell in row) for row in table)


@lru_cache(maxsize=None)
def _prime_field(p: int) -> FieldParams:
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    f = FieldParams.__new__(FieldParams)
    FieldParams.__init__(f, p, 1, None, None)
    f.modulus = (f.zero(), f.one())  # the placeholder x - 0
    return f


_EXT_CACHE: dict[tuple[int, int], FieldParams] = {}


def field_create(p: int, k: int) -> FieldParams:
    """F_{p^k} with the smallest-lexicographic monic irreducible modulus."""
    if k < 1:
        raise ValueError("extension degree must be >= 1")
    if k == 1:
        return _prime_field(p)
    key = (p, k)
    if key not in _EXT_CACHE:
        base = _prime_field(p)
        modulus = smallest_irreducible(base, k)
        _EXT_CACHE[key] = FieldParams(p, k, modulus, base)
    return _EXT_CACHE[key]


_TOWER_CACHE: dict[tuple[int, int], FieldParams] = {}


def extend_field(base: FieldParams, m: int) -> FieldParams:
    """Degree-m extension of an already constructed field (tower step)."""
    if m < 1:
        raise ValueError("extension degree must be >= 1")
    key = (id(base), m)
    if key not in _TOWER_CACHE:
        modulus = smallest_irreducible(base, m)
        _TOWER_CACHE[key] = FieldParams(base.p, m, modulus, base)
    return _TOWER_CACHE[key]


def sum_of_two_squares(t: FieldElement) -> tuple[FieldElement, FieldElement]:
    """Deterministic (r, s) with r^2 + s^2 = t; smallest r, then smallest s,
    in enumeration order.  Always solvable in a finite field."""
    field = t.field
    sqrt_of: dict[tuple[int, ...], FieldElement] = {}
    for s in field.enumerate():
        key = (s * s).coords
        if key not in sqrt_of:
            sqrt_of[key] = s
    for r in field.enumerate():
        rest = t - r * r
        s = sqrt_of.get(rest.coords)
        if s is not None:
            return r, s
    raise RuntimeError("no two-square decomposition found")  # unreachable


class PolySubset:
    """The additive subset F_q[x]_{<=h} inside an extension of F_q.

    ``ambient`` must be an extension field (tower step) whose generator plays
    the role of x; the subset is all elements whose base-field coefficients
    vanish above degree ``h``.  It has exactly q^(h+1) elements and is closed
    under addition.
    """

    def __init__(self, ambient: FieldParams, h: int):
        if ambient.base is None:
            raise ValueError("ambient field must be an extension")
        if not 0 <= h < ambient.k:
            raise ValueError(f"degree bound {h} outside [0, {ambient.k - 1}]")
        self.ambient = ambient
        self.h = h

    @property
    def size(self) -> int:
        return self.ambient.base.order ** (self.h + 1)

    def __contains__(self, x: FieldElement) -> bool:
        if x.field is not self.ambient:
            return False
        d = self.ambient.base.dim
        return all(c == 0 for c in x.coords[(self.h + 1) * d:])

    def enumerate(self) -> Iterator[FieldElement]:
        base = self.ambient.base
        for coeffs in itertools.product(base.enumerate(), repeat=self.h + 1):
            yield self.ambient.from_base_coeffs(coeffs)
