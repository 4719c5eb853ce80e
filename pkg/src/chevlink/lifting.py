"""Lifting homomorphisms, pure-degree symbols, and graded relation checks.

A lift maps the base unipotent group U_I(F_p) into the graded group
U_I(F~[x]_{<=1}) realized inside a degree-m extension of F~ (m = 6 for B_3,
4 for A_3; the modulus is immaterial because no entry's degree ever reaches
m).  The image of x_eta(u) with eta = sum_zeta c_zeta zeta scales the entry
by prod_zeta (t_{zeta,1} x + t_{zeta,0})^{c_zeta}.

Graded relations are data: records in a small line-oriented catalog format
(see :func:`parse_catalog`) quantify pure-degree symbols over coefficient
and degree ranges; :func:`verify_graded_relation` evaluates both sides as
matrices over the graded field for every (or a seeded sample of) assignment.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import numpy as np

from .batch import BatchField
from .chevalley import Realization
from .gf import (FieldElement, FieldParams, extend_field, field_create,
                 is_irreducible, smallest_irreducible)
from .roots import LinkConfig, Root, link_config

__all__ = [
    "LiftSpec",
    "graded_field",
    "lift_entry",
    "lift_element",
    "verify_lift_homomorphism",
    "degree_coverage",
    "normal_form_entries",
    "Relation",
    "parse_catalog",
    "bundled_catalog",
    "verify_graded_relation",
    "verify_catalog",
]

GRADE_DEGREE = {"a3": 4, "b3-small": 6, "b3-large": 6}


def graded_field(config: LinkConfig, base: FieldParams,
                 alternate_modulus: bool = False) -> FieldParams:
    """Extension of ``base`` of the configuration's grading degree.

    With ``alternate_modulus`` the second-smallest irreducible is used
    instead; relation verdicts must not depend on this choice.
    """
    m = GRADE_DEGREE[config.name]
    if not alternate_modulus:
        return extend_field(base, m)
    first = smallest_irreducible(base, m)
    one = base.one()
    for c0 in base.enumerate():
        if c0.is_zero():
            continue
        for rest in itertools.product(base.enumerate(), repeat=m - 1):
            cand = (c0,) + tuple(rest) + (one,)
            if is_irreducible(cand, base) and cand != first:
                return FieldParams(base.p, m, cand, base)
    raise RuntimeError("no second irreducible found")


# -- the lifting homomorphism ------------------------------------------------


@dataclass
class LiftSpec:
    """Parameters of one lift U_I(F_p) -> U_I(F~[x]_{<=1}).

    ``params[zeta]`` is the pair (t_{zeta,0}, t_{zeta,1}) in F~ for each base
    root; homogeneous specs have exactly one of the two nonzero per root.
    """

    config: LinkConfig
    base_field: FieldParams            # F_p
    ext_field: FieldParams             # F~ = F_{p^k}
    graded: FieldParams                # extension of F~ of the grading degree
    params: dict[Root, tuple[FieldElement, FieldElement]]

    @classmethod
    def create(cls, config: LinkConfig, p: int, k: int,
               params: dict[Root, tuple[FieldElement, FieldElement]],
               alternate_modulus: bool = False) -> "LiftSpec":
        base = field_create(p, 1)
        ext = field_create(p, k)
        graded = graded_field(config, ext, alternate_modulus)
        return cls(config, base, ext, graded, params)

    @classmethod
    def random(cls, config: LinkConfig, p: int, k: int, rng,
               homogeneous: bool) -> "LiftSpec":
        ext = field_create(p, k)
        els = list(ext.enumerate())
        nonzero = els[1:] if els[0].is_zero() else [e for e in els if not e.is_zero()]
        params = {}
        for zeta in config.base:
            if homogeneous:
                t = nonzero[rng.randrange(len(nonzero))]
                b = rng.randrange(2)
                pair = (ext.zero(), t) if b else (t, ext.zero())
            else:
                pair = (els[rng.randrange(len(els))], els[rng.randrange(len(els))])
                if pair[0].is_zero() and pair[1].is_zero():
                    pair = (ext.one(), pair[1])
            params[zeta] = pair
        return cls.create(config, p, k, params)

    def is_homogeneous(self) -> bool:
        return all(p0.is_zero() != p1.is_zero()
                   for p0, p1 in self.params.values())

    def embed(self, t: FieldElement) -> FieldElement:
        """Image of a base- or extension-field scalar inside the graded field."""
        if t.field is self.graded:
            return t
        if t.field is self.ext_field:
            return self.graded.from_base_coeffs([t])
        if t.field is self.base_field:
            return self.graded.from_base_coeffs(
                [self.ext_field.from_int(t.coords[0])])
        raise ValueError("scalar from an unrelated field")

    def factor(self, zeta: Root) -> FieldElement:
        """The linear form t_{zeta,1} x + t_{zeta,0} in the graded field."""
        p0, p1 = self.params[zeta]
        x = self.graded.gen()
        return self.embed(p1) * x + self.embed(p0)


def lift_entry(spec: LiftSpec, eta: Root, u: FieldElement) -> FieldElement:
    """Entry of the image of x_eta(u): u * prod (t_{zeta,1} x + t_{zeta,0})^c."""
    acc = spec.embed(u)
    for c, zeta in zip(spec.config.expansion(eta), spec.config.base):
        if c:
            acc = acc * spec.factor(zeta) ** c
    return acc


def lift_element(spec: LiftSpec, word) -> np.ndarray:
    """Image of a word [(root in I+, entry in F_p), ...] as a graded matrix."""
    real = Realization(spec.config.system, spec.graded)
    out = real.bf.identity(real.n, ())
    for eta, u in word:
        if eta not in spec.config.heights:
            raise ValueError(f"{eta} is not in the configuration's span")
        m = real.root_matrix(eta, lift_entry(spec, eta, u))
        out = real.bf.matmul(out[None], m[None])[0]
    return out


def normal_form_entries(config: LinkConfig, field: FieldParams,
                        matrix: np.ndarray) -> list[FieldElement]:
    """Decompose a base-group matrix into its normal-form entries by peeling
    roots in the global order; raises if the matrix is not in the group."""
    real = Realization(config.system, field)
    entries, residual = real.peel(config.i_plus, matrix[None])
    if not (residual[0] == real.bf.identity(real.n, ())).all():
        raise ValueError("matrix is not in the unipotent group")
    return [real.bf.to_element(e[0]) for e in entries]


def verify_lift_homomorphism(spec: LiftSpec, *, pairs: int = 500,
                             seed: int = 0) -> dict:
    """Check f(ab) = f(a) f(b) on sampled element pairs.

    f is evaluated through normal forms: an element's image is the ordered
    product of the images of its normal-form factors, with each factor's
    entry scaled by the spec's constant per-root product of linear forms.
    Elements are sampled as random normal-form tuples (uniform by the
    structure theorem); the whole sweep runs batched.
    """
    config = spec.config
    base_field = spec.base_field
    real = Realization(config.system, base_field)
    bf = real.bf
    graded_real = Realization(config.system, spec.graded)
    gbf = graded_real.bf
    span = config.i_plus
    rng = np.random.default_rng(seed)

    # Per-root constant factor prod (t_{zeta,1} x + t_{zeta,0})^{c_zeta}.
    factor_const = {}
    for eta in span:
        acc = spec.graded.one()
        for c, zeta in zip(config.expansion(eta), config.base):
            if c:
                acc = acc * spec.factor(zeta) ** c
        factor_const[eta] = gbf.scalar(acc)[None, :]

    def random_elements(n: int) -> np.ndarray:
        out = bf.identity(real.n, (n,))
        for zeta in span:
            draws = rng.integers(0, base_field.p, size=n)
            enc = np.zeros((n, 1), dtype=np.uint8)
            enc[:, 0] = draws
            out = bf.matmul(out, real.root_matrix_batch(zeta, enc))
        return out

    def images(mats: np.ndarray) -> np.ndarray:
        entries, residual = real.peel(span, mats)
        if not bf.mats_equal(residual, bf.identity(real.n, residual.shape[:1])).all():
            raise ValueError("sampled element left the group")
        out = gbf.identity(graded_real.n, (mats.shape[0],))
        for zeta, t in zip(span, entries):
            # Embed the prime-field entry into the graded field (coord 0).
            emb = np.zeros((mats.shape[0], spec.graded.dim), dtype=np.uint8)
            emb[:, 0] = t[:, 0]
            entry = gbf.mul(emb, factor_const[zeta])
            out = gbf.matmul(out, graded_real.root_matrix_batch(zeta, entry))
        return out

    a = random_elements(pairs)
    b = random_elements(pairs)
    ab = bf.matmul(a, b)
    lhs = images(ab)
    rhs = gbf.matmul(images(a), images(b))
    ok = gbf.mats_equal(lhs, rhs)
    failures = int((~ok).sum())
    report = {
        "config": config.name,
        "p": base_field.p,
        "k": spec.ext_field.dim,
        "homogeneous": spec.is_homogeneous(),
        "pairs": pairs,
        "seed": seed,
        "failures": failures,
        "passed": failures == 0,
    }
    if failures:
        idx = int(np.flatnonzero(~ok)[0])
        report["witness"] = {
            "a": [int(v) for v in a[idx].reshape(-1)],
            "b": [int(v) for v in b[idx].reshape(-1)],
        }
    return report


def degree_coverage(config: LinkConfig, zeta: Root, eta: Root) -> set:
    """Degree pairs (d_zeta, d_eta) reachable by homogeneous lifts with
    base degrees (i, j, k) in {0, 1}^3."""
    ez = config.expansion(zeta)
    ee = config.expansion(eta)
    out = set()
    for bits in itertools.product((0, 1), repeat=len(config.base)):
        dz = sum(c * b for c, b in zip(ez, bits))
        de = sum(c * b for c, b in zip(ee, bits))
        out.add((dz, de))
    return out


# -- relation catalog ---------------------------------------------------------


@dataclass
class Symbol:
    root: Root
    coeff: list          # parsed coefficient terms
    degree: list         # parsed degree terms


@dataclass
class Relation:
    rel_id: str
    config_name: str
    degree_vars: list[tuple[str, int, int]]
    field_vars: list[str]
    sign_vars: list[str]
    lhs: object
    rhs: object

    def __repr__(self) -> str:
        return f"Relation({self.rel_id})"


_CONFIG_PREFIX = {"A3": "a3", "B3-sm": "b3-small", "B3-lg": "b3-large"}


def _parse_coeff(text: str) -> list:
    """Parse a coefficient polynomial into [(Fraction, ((var, pow), ...))]."""
    text = text.replace(" ", "")
    terms = []
    token = ""
    depth = 0
    pieces = []
    for ch in text:
        if ch in "+-" and token and token[-1] not in "*/^" and depth == 0:
            pieces.append(token)
            token = ch
        else:
            token += ch
    pieces.append(token)
    for piece in pieces:
        if not piece:
            continue
        sign = 1
        if piece[0] == "+":
            piece = piece[1:]
        elif piece[0] == "-":
            sign = -1
            piece = piece[1:]
        num = Fraction(sign)
        powers = []
        for factor in piece.split("*"):
            if not factor:
                continue
            if "/" in factor:
                factor, denom = factor.split("/")
                num /= int(denom)
                if not factor:
                    continue
            if re.fullmatch(r"\d+", factor):
                num *= int(factor)
                continue
            m = re.fullmatch(r"([A-Za-z]\w*)(?:\^(\d+))?", factor)
            if not m:
                raise ValueError(f"bad coefficient factor {factor!r}")
            powers.append((m.group(1), int(m.group(2) or 1)))
        terms.append((num, tuple(powers)))
    return terms


def _parse_degree(text: str) -> list:
    """Parse a degree expression into [(int, var-or-None)]."""
    out = []
    for piece in text.replace(" ", "").split("+"):
        m = re.fullmatch(r"(\d*)([A-Za-z]\w*)?", piece)
        if not m or (not m.group(1) and not m.group(2)):
            raise ValueError(f"bad degree term {piece!r}")
        mult = int(m.group(1)) if m.group(1) else 1
        out.append((mult, m.group(2)))
    return out


def _tokenize_side(text: str) -> list[str]:
    return text.replace("[", " [ ").replace("]", " ] ").replace(",", " , ").split()


def _parse_factors(tokens: list[str], pos: int, config: LinkConfig):
    factors = []
    while pos < len(tokens) and tokens[pos] not in ("]", ","):
        tok = tokens[pos]
        if tok == "[":
            left, pos = _parse_factors(tokens, pos + 1, config)
            if tokens[pos] != ",":
                raise ValueError("expected ',' in commutator")
            right, pos = _parse_factors(tokens, pos + 1, config)
            if tokens[pos] != "]":
                raise ValueError("expected ']' closing commutator")
            pos += 1
            factors.append(("comm", left, right))
        elif tok == "1":
            pos += 1
        elif tok.startswith("<") and tok.endswith(">"):
            root_txt, coeff_txt, deg_txt = tok[1:-1].split(";")
            factors.append(("sym", Symbol(config.parse_root(root_txt),
                                          _parse_coeff(coeff_txt),
                                          _parse_degree(deg_txt))))
            pos += 1
        else:
            raise ValueError(f"unexpected token {tok!r}")
    return ("prod", factors), pos


def _parse_side(text: str, config: LinkConfig):
    tokens = _tokenize_side(text)
    tree, pos = _parse_factors(tokens, 0, config)
    if pos != len(tokens):
        raise ValueError(f"trailing tokens in {text!r}")
    return tree


def parse_catalog(text: str) -> list[Relation]:
    """Parse catalog records: ``id | degree-ranges | field-vars | LHS | RHS``.

    Degree ranges are ``i:0..1``-style; field variables are space-separated
    names, with ``name:+-`` marking a sign variable ranging over {1, -1}.
    """
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 5:
            raise ValueError(f"expected 5 fields, got {len(parts)}: {raw!r}")
        rel_id, deg_txt, var_txt, lhs_txt, rhs_txt = parts
        prefix = rel_id.split(":", 1)[0]
        config_name = _CONFIG_PREFIX.get(prefix)
        if config_name is None:
            raise ValueError(f"unknown configuration prefix in {rel_id!r}")
        config = link_config(config_name)
        degree_vars = []
        for item in deg_txt.split():
            name, rng = item.split(":")
            lo, hi = rng.split("..")
            degree_vars.append((name, int(lo), int(hi)))
        field_vars = []
        sign_vars = []
        for item in var_txt.split():
            if item.endswith(":+-"):
                sign_vars.append(item[:-3])
            else:
                field_vars.append(item)
        out.append(Relation(rel_id, config_name, degree_vars, field_vars,
                            sign_vars, _parse_side(lhs_txt, config),
                            _parse_side(rhs_txt, config)))
    return out


def bundled_catalog() -> list[Relation]:
    text = (resources.files("chevlink") / "data" / "relations.cat").read_text()
    return parse_catalog(text)


# -- relation evaluation -------------------------------------------------------


class _Evaluator:
    def __init__(self, relation: Relation, field: FieldParams,
                 assignments: dict):
        self.config = link_config(relation.config_name)
        self.real = Realization(self.config.system, field)
        self.bf = self.real.bf
        self.field = field
        self.assign = assignments      # var -> (B,) ints or (B, D) arrays
        self.batch = next(iter(assignments.values())).shape[0] if assignments else 1
        max_h = max(self.config.heights.values())
        gen = field.gen()
        self.xpow = self.bf.encode([gen ** d for d in range(max_h + 1)])

    def _coeff(self, terms) -> np.ndarray:
        out = np.zeros((self.batch, self.field.dim), dtype=np.uint8)
        for frac, powers in terms:
            # The rational constant maps into the field (odd characteristic).
            num = self.field.from_int(frac.numerator)
            if frac.denominator != 1:
                num = num * self.field.from_int(frac.denominator).inverse()
            term = np.broadcast_to(self.bf.scalar(num),
                                   (self.batch, self.field.dim)).copy()
            for var, power in powers:
                arr = self.assign[var]
                if arr.ndim == 1:      # sign variable: +-1 as integers
                    vals = np.where(arr[:, None] == 1,
                                    self.bf.scalar(self.field.from_int(1)),
                                    self.bf.scalar(self.field.from_int(-1)))
                    base_arr = vals.astype(np.uint8)
                else:
                    base_arr = arr
                term = self.bf.mul(term, self.bf.power(base_arr, power)
                                   if power != 1 else base_arr)
            out = self.bf.add(out, term)
        return out

    def _degree(self, terms) -> np.ndarray:
        out = np.zeros(self.batch, dtype=np.int64)
        for mult, var in terms:
            if var is None:
                out += mult
            else:
                out += mult * self.assign[var]
        return out

    def _symbol(self, sym: Symbol) -> np.ndarray:
        coeff = self._coeff(sym.coeff)
        deg = self._degree(sym.degree)
        height = self.config.heights[sym.root]
        if np.any(deg < 0) or np.any(deg > height):
            raise ValueError(
                f"degree out of range for {self.config.root_name(sym.root)}")
        entry = self.bf.mul(coeff, self.xpow[deg])
        return self.real.root_matrix_batch(sym.root, entry)

    def _inverse(self, node):
        kind = node[0]
        if kind == "prod":
            return ("prod", [self._inverse(f) for f in reversed(node[1])])
        if kind == "comm":
            return ("comm", node[2], node[1])
        sym = node[1]
        neg = [(-frac, powers) for frac, powers in sym.coeff]
        return ("sym", Symbol(sym.root, neg, sym.degree))

    def eval(self, node) -> np.ndarray:
        kind = node[0]
        if kind == "prod":
            out = self.bf.identity(self.real.n, (self.batch,))
            for f in node[1]:
                out = self.bf.matmul(out, self.eval(f))
            return out
        if kind == "comm":
            x = self.eval(node[1])
            y = self.eval(node[2])
            xi = self.eval(self._inverse(node[1]))
            yi = self.eval(self._inverse(node[2]))
            return self.bf.matmul(self.bf.matmul(x, y),
                                  self.bf.matmul(xi, yi))
        return self._symbol(node[1])


def _assignment_grid(relation: Relation, field: FieldParams,
                     exhaustive_limit: int, samples: int, seed: int):
    """Either the full assignment grid or a seeded sample of it."""
    import math

    deg_sizes = [hi - lo + 1 for _, lo, hi in relation.degree_vars]
    q = field.base.order if field.base is not None else field.order
    base = field.base if field.base is not None else field
    n_field = len(relation.field_vars)
    n_sign = len(relation.sign_vars)
    total = math.prod(deg_sizes) * (q ** n_field) * (2 ** n_sign)
    els = list(base.enumerate())
    enc_base = BatchField(field).encode(
        [field.from_base_coeffs([e]) for e in els])
    assign: dict[str, np.ndarray] = {}
    if total <= exhaustive_limit:
        idx = np.arange(total, dtype=np.int64)
        radices = deg_sizes + [q] * n_field + [2] * n_sign
        names = ([n for n, _, _ in relation.degree_vars]
                 + relation.field_vars + relation.sign_vars)
        digits = []
        for r in reversed(radices):
            digits.append(idx % r)
            idx //= r
        digits.reverse()
        for name, dig, kind in zip(
                names, digits,
                ["deg"] * len(deg_sizes) + ["field"] * n_field + ["sign"] * n_sign):
            if kind == "deg":
                lo = next(l for n, l, _ in relation.degree_vars if n == name)
                assign[name] = dig + lo
            elif kind == "field":
                assign[name] = enc_base[dig]
            else:
                assign[name] = np.where(dig == 0, 1, -1).astype(np.int64)
        return assign, int(total), True
    rng = np.random.default_rng(seed)
    for name, lo, hi in relation.degree_vars:
        assign[name] = rng.integers(lo, hi + 1, size=samples)
    for name in relation.field_vars:
        assign[name] = enc_base[rng.integers(0, q, size=samples)]
    for name in relation.sign_vars:
        assign[name] = np.where(rng.integers(0, 2, size=samples) == 0, 1, -1)
    return assign, samples, False


def verify_graded_relation(relation: Relation, field: FieldParams, *,
                           exhaustive_limit: int = 1_000_000,
                           samples: int = 10_000, seed: int = 20240501,
                           chunk: int = 4096) -> dict:
    """Evaluate both sides over the graded field for every assignment (or a
    seeded sample when the grid exceeds the limit)."""
    assign, total, exhaustive = _assignment_grid(
        relation, field, exhaustive_limit, samples, seed)
    failures = 0
    first_witness = None
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        sliced = {k: v[start:stop] for k, v in assign.items()}
        ev = _Evaluator(relation, field, sliced)
        lhs = ev.eval(relation.lhs)
        rhs = ev.eval(relation.rhs)
        ok = ev.bf.mats_equal(lhs, rhs)
        bad = int((~ok).sum())
        if bad:
            failures += bad
            if first_witness is None:
                idx = int(np.flatnonzero(~ok)[0])
                first_witness = {k: np.asarray(v[idx]).tolist()
                                 for k, v in sliced.items()}
    return {
        "id": relation.rel_id,
        "config": relation.config_name,
        "assignments": total,
        "exhaustive": exhaustive,
        "seed": None if exhaustive else seed,
        "failures": failures,
        "passed": failures == 0,
        **({"witness": first_witness} if first_witness else {}),
    }


def verify_catalog(config_name: str, base_field: FieldParams, *,
                   relations: list[Relation] | None = None,
                   exhaustive_limit: int = 1_000_000, samples: int = 10_000,
                   seed: int = 20240501) -> dict:
    """Run every catalog relation of one configuration over one base field."""
    config = link_config(config_name)
    gfld = graded_field(config, base_field)
    rels = [r for r in (relations or bundled_catalog())
            if r.config_name == config_name]
    results = [verify_graded_relation(r, gfld, exhaustive_limit=exhaustive_limit,
                                      samples=samples, seed=seed)
               for r in rels]
    return {
        "config": config_name,
        "base_field": base_field.describe(),
        "relations": len(results),
        "passed": all(r["passed"] for r in results),
        "results": results,
    }
