"""Colored words, loops, F_2-fillings, stitching, and derivation replay.

Loops come from colored words: a word (x_0, H_0)...(x_{l-1}, H_{l-1}) with
trivial product walks 1 H_0 -> x_0 H_1 -> ... back to 1 H_0.  Fillings are
F_2 sets of triangles whose boundary is a loop's edge chain.  The
multicomplex view needed by stitching adds self-loop edges ("self", v) and
degenerate triangles ("deg", v1 <= v2 <= v3 with a repeat); a degenerate
triangle's boundary is the self-loop at its repeated vertex, so projecting
a filling to the plain complex just discards the degenerate members.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import CosetComplex
from .f2rank import Gf2Solver

__all__ = [
    "ColoredWord",
    "word_product",
    "word_to_loop",
    "boundary",
    "project_plain",
    "translate_chain",
    "solve_filling",
    "stitch",
    "recolor_filling",
    "Relator",
    "in_subgroup_relator",
    "DerivationStep",
    "derivation_to_filling",
    "cone_radius_bound",
    "verify_named_filling_a3",
]

_COLORS = ("RED", "GREEN", "BLUE")


@dataclass
class ColoredWord:
    """Letters are (group element array, color); colors must be legal."""

    letters: list

    def __post_init__(self):
        for x, color in self.letters:
            if color not in _COLORS:
                raise ValueError(f"unknown color {color!r}")

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self, cx: CosetComplex) -> "ColoredWord":
        g = cx.group
        return ColoredWord([(g.inverse(x), c) for x, c in reversed(self.letters)])

    def concat(self, other: "ColoredWord") -> "ColoredWord":
        return ColoredWord(self.letters + other.letters)

    def shifted(self, s: int) -> "ColoredWord":
        return ColoredWord(self.letters[s:] + self.letters[:s])


def word_product(cx: CosetComplex, word: ColoredWord) -> np.ndarray:
    g = cx.group
    out = g.identity()
    for x, color in word.letters:
        if g.key_of(x) not in cx.subgroups[color].index:
            raise ValueError(f"letter is not a member of the {color} subgroup")
        out = g.multiply(out, x)
    return out


def _vertex(cx: CosetComplex, element: np.ndarray, color: str) -> int:
    return cx.vertex_of_coset(color, cx.group.key_of(element))


def word_to_loop(cx: CosetComplex, word: ColoredWord, *,
                 multicomplex: bool = False):
    """The closed walk of a trivial-product word and its mod-2 edge chain.

    Returns (vertices, chain).  In plain mode consecutive colors (cyclically)
    must differ; multicomplex mode turns repeats into self-loops.
    """
    if len(word) == 0:
        raise ValueError("empty word has no walk")
    g = cx.group
    phi = word_product(cx, word)
    if g.key_of(phi) != g.key_of(g.identity()):
        raise ValueError("word does not multiply to the identity")
    colors = [c for _, c in word.letters]
    prefix = g.identity()
    vertices = []
    for x, color in word.letters:
        vertices.append(_vertex(cx, prefix, color))
        prefix = g.multiply(prefix, x)
    chain: set = set()
    for i in range(len(vertices)):
        u = vertices[i]
        v = vertices[(i + 1) % len(vertices)]
        if u == v:
            if not multicomplex:
                raise ValueError(
                    "consecutive letters share a color; use multicomplex mode")
            token = ("self", u)
        else:
            eid = cx.edge_id(u, v)
            if eid is None:
                raise ValueError(f"edge {{{u}, {v}}} missing from the complex")
            token = eid
        chain ^= {token}
    return vertices, chain


def boundary(cx: CosetComplex, two_chain: set) -> set:
    """Mod-2 boundary of a set of (possibly degenerate) triangles."""
    out: set = set()
    for token in two_chain:
        if isinstance(token, tuple):
            _, a, b, c = token
            if a == b == c or a == b:
                out ^= {("self", a)}
            elif b == c:
                out ^= {("self", b)}
            else:
                raise ValueError(f"malformed degenerate triangle {token}")
        else:
            for e in cx.tri_edges[token]:
                out ^= {int(e)}
    return out


def project_plain(cx: CosetComplex, two_chain: set) -> set:
    """Discard degenerate triangles (their boundaries are self-loops only)."""
    return {t for t in two_chain if not isinstance(t, tuple)}


def _translate_vertex(cx: CosetComplex, y: np.ndarray, vid: int) -> int:
    info = cx.vertices[vid]
    g = cx.group
    rep = g.elements[g.index[info.rep_key]]
    return cx.vertex_of_coset(info.color, g.key_of(g.multiply(y, rep)))


def translate_chain(cx: CosetComplex, y: np.ndarray, chain: set, kind: str) -> set:
    """Translate a 1-chain (kind='edges') or 2-chain (kind='triangles') by y."""
    g = cx.group
    out: set = set()
    if kind == "edges":
        for token in chain:
            if isinstance(token, tuple):
                out ^= {("self", _translate_vertex(cx, y, token[1]))}
            else:
                u, v = (int(w) for w in cx.edges[token])
                eid = cx.edge_id(_translate_vertex(cx, y, u),
                                 _translate_vertex(cx, y, v))
                if eid is None:
                    raise ValueError("translated edge missing")
                out ^= {eid}
        return out
    for token in chain:
        if isinstance(token, tuple):
            verts = sorted(_translate_vertex(cx, y, v) for v in token[1:])
            out ^= {("deg", *verts)}
        else:
            moved = g.multiply(y, g.elements[token])
            out ^= {g.index[g.key_of(moved)]}
    return out


def _filling_solver(cx: CosetComplex) -> Gf2Solver:
    solver = getattr(cx, "_filling_solver", None)
    if solver is None:
        from .complexes import incidence_matrices

        d2, _ = incidence_matrices(cx, 2)
        solver = Gf2Solver(d2.transpose())
        cx._filling_solver = solver
    return solver


def solve_filling(cx: CosetComplex, one_chain: set):
    """A set of plain triangles with boundary ``one_chain``, or None (UNSAT).

    Linear solve over F_2; the result is the eliminator's particular
    solution, with no minimality promise.
    """
    if any(isinstance(t, tuple) for t in one_chain):
        raise ValueError("plain fillings require a chain without self-loops")
    solver = _filling_solver(cx)
    b = np.zeros(cx.n_edges, dtype=np.uint8)
    for e in one_chain:
        b[e] = 1
    x = solver.solve(b)
    if x is None:
        return None
    return {int(t) for t in np.flatnonzero(x)}


def solve_filling_multicomplex(cx: CosetComplex, one_chain: set):
    """Multicomplex variant: each self-loop is capped by one degenerate
    triangle, the plain remainder by the linear solver."""
    plain = {t for t in one_chain if not isinstance(t, tuple)}
    fill = solve_filling(cx, plain)
    if fill is None:
        return None
    out: set = set(fill)
    for token in one_chain - plain:
        v = token[1]
        out ^= {("deg", v, v, v)}
    return out


# -- stitching ---------------------------------------------------------------


def _face_witnessed(cx: CosetComplex, verts: tuple[int, ...]) -> bool:
    """A multiset of vertices is a multicomplex face iff the cosets share
    an element."""
    g = cx.group
    infos = [cx.vertices[v] for v in verts]
    # Scan the smallest involved coset's members for joint membership.
    smallest = min(infos, key=lambda i: cx.subgroups[i.color].size)
    sub = cx.subgroups[smallest.color]
    rep = g.elements[g.index[smallest.rep_key]]
    keys = g.left_member_keys(rep, sub.elements)
    others = [i for i in infos if i is not smallest]
    targets = {id(i): cx.color_offset[i.color]
               + cx.partitions[i.color].coset_of_key(i.rep_key)
               for i in others}
    for k in keys:
        if all(cx.vertex_of_coset(i.color, k) == targets[id(i)]
               for i in others):
            return True
    return False


def _triangle_token(cx: CosetComplex, verts: tuple[int, int, int]):
    """Canonical token for a vertex multiset; int id for a plain triangle."""
    sv = tuple(sorted(verts))
    if len(set(sv)) < 3:
        return ("deg", *sv)
    lookup = getattr(cx, "_tri_lookup", None)
    if lookup is None:
        lookup = {tuple(sorted(map(int, row))): tid
                  for tid, row in enumerate(cx.triangles)}
        cx._tri_lookup = lookup
    return lookup.get(sv)


def stitch(cx: CosetComplex, fill_xy: set, fill_yz: set, x_hat: ColoredWord,
           y_hat: ColoredWord, z_hat: ColoredWord) -> set:
    """Combine fillings of [L(xy)] and [L(y z^-1)] into one of [L(xz)].

    ``fill_yz`` is the filling of the untranslated loop of y z^-1; it is
    translated by phi(x) internally.  The output differs from the symmetric
    difference by at most two (possibly degenerate) triangles.
    """
    g = cx.group
    xy = x_hat.concat(y_hat)
    yz = y_hat.concat(z_hat.inverse(cx))
    xz = x_hat.concat(z_hat)
    phi_x = word_product(cx, ColoredWord(x_hat.letters)) if len(x_hat) else g.identity()
    _, c_xy = word_to_loop(cx, xy, multicomplex=True)
    _, c_yz = word_to_loop(cx, yz, multicomplex=True)
    _, c_xz = word_to_loop(cx, xz, multicomplex=True)
    moved = translate_chain(cx, phi_x, c_yz, "edges")
    defect = c_xy ^ moved ^ c_xz

    base = fill_xy ^ translate_chain(cx, phi_x, fill_yz, "triangles")
    if not defect:
        return base
    patch = _cap_defect(cx, defect)
    return base ^ patch


def _cap_defect(cx: CosetComplex, defect: set) -> set:
    """Find at most two multicomplex triangles whose boundary is ``defect``."""
    verts = set()
    for token in defect:
        if isinstance(token, tuple):
            verts.add(token[1])
        else:
            verts.update(int(v) for v in cx.edges[token])
    verts = sorted(verts)
    candidates = []
    import itertools as it

    for combo in it.combinations_with_replacement(verts, 3):
        colors = sorted(cx.vertices[v].color for v in set(combo))
        # Repeated vertices are fine, but three distinct vertices must have
        # distinct colors to form a face.
        if len(set(combo)) == 3 and len(set(colors)) != 3:
            continue
        token = _triangle_token(cx, combo)
        if token is None:
            continue
        if isinstance(token, tuple) and not _face_witnessed(
                cx, tuple(sorted(set(combo)))):
            continue
        candidates.append(token)
    for token in candidates:
        if boundary(cx, {token}) == defect:
            return {token}
    for i, t1 in enumerate(candidates):
        b1 = boundary(cx, {t1})
        for t2 in candidates[i + 1:]:
            if (b1 ^ boundary(cx, {t2})) == defect:
                return {t1, t2}
    raise ValueError("stitch defect is not the boundary of two triangles; "
                     "check the word preconditions")


def recolor_filling(cx: CosetComplex, word: ColoredWord, new_word: ColoredWord,
                    fill: set) -> set:
    """Filling of the recolored word's loop; grows by at most two triangles
    per changed letter."""
    if len(word) != len(new_word):
        raise ValueError("recoloring must preserve the letter sequence")
    g = cx.group
    for (x, _), (x2, c2) in zip(word.letters, new_word.letters):
        if g.key_of(x) != g.key_of(x2):
            raise ValueError("recoloring must preserve the letter sequence")
        if g.key_of(x2) not in cx.subgroups[c2].index:
            raise ValueError("recolored letter is not in its new subgroup")
    n = len(word)
    prefixes = [g.identity()]
    for x, _ in word.letters[:-1]:
        prefixes.append(g.multiply(prefixes[-1], x))
    out = set(fill)
    for i in range(n):
        c_old = word.letters[i][1]
        c_new = new_word.letters[i][1]
        if c_old == c_new:
            continue
        v_old = _vertex(cx, prefixes[i], c_old)
        v_new = _vertex(cx, prefixes[i], c_new)
        # Letters are recolored one at a time, left to right: neighbors at
        # smaller (cyclic) positions already wear their new color.
        prev_pos = (i - 1) % n
        prev_color = (new_word if prev_pos < i else word).letters[prev_pos][1]
        u = _vertex(cx, prefixes[prev_pos], prev_color)
        nxt_pos = (i + 1) % n
        nxt_color = (new_word if nxt_pos < i else word).letters[nxt_pos][1]
        z = _vertex(cx, prefixes[nxt_pos], nxt_color)
        for tri in ((u, v_old, v_new), (v_old, v_new, z)):
            token = _triangle_token(cx, tri)
            if token is None:
                raise ValueError("recoloring triangle missing from the complex")
            out ^= {token}
    return out


# -- derivations --------------------------------------------------------------


@dataclass
class Relator:
    """A colored word u' v'^-1 (given as the two halves) with a certified
    multicomplex filling of its loop."""

    u_letters: list
    v_letters: list
    fill: set

    def word(self, cx: CosetComplex) -> ColoredWord:
        u = ColoredWord(list(self.u_letters))
        v = ColoredWord(list(self.v_letters))
        return u.concat(v.inverse(cx))


def in_subgroup_relator(cx: CosetComplex, u_letters: list,
                        v_letters: list) -> Relator:
    """Relator whose letters all share one color: its loop is self-loops at
    the identity coset, filled by at most one degenerate triangle."""
    colors = {c for _, c in u_letters} | {c for _, c in v_letters}
    if len(colors) != 1:
        raise ValueError("in-subgroup relator must use a single color")
    color = colors.pop()
    rel = Relator(u_letters, v_letters, set())
    word = rel.word(cx)
    _, chain = word_to_loop(cx, word, multicomplex=True)
    if chain:
        v0 = _vertex(cx, cx.group.identity(), color)
        rel.fill = {("deg", v0, v0, v0)}
        assert boundary(cx, rel.fill) == chain
    return rel


@dataclass
class DerivationStep:
    """One rewrite: the current word, normalized by ``invert`` then a cyclic
    ``shift``, must read p u q; u is replaced by the relator's v."""

    shift: int
    invert: bool
    p_len: int
    u_len: int
    relator: Relator


def derivation_to_filling(cx: CosetComplex, steps: list[DerivationStep],
                          target: ColoredWord, *, ell: int, t_bound: int,
                          start_color: str = "RED") -> dict:
    """Replay a derivation of the target word from "1", maintaining a
    filling; returns the final filling with the size-bound audit."""
    g = cx.group
    word = ColoredWord([(g.identity(), start_color)])
    v0 = _vertex(cx, g.identity(), start_color)
    fill: set = {("deg", v0, v0, v0)}
    sizes = [len(fill)]
    for step in steps:
        if len(step.relator.u_letters) + len(step.relator.v_letters) > ell:
            raise ValueError("relator longer than the declared bound")
        if len(step.relator.fill) > t_bound:
            raise ValueError("relator filling larger than the declared bound")
        if step.invert:
            word = word.inverse(cx)
            # [L(w^-1)] = [L(w)] for trivial words: the filling carries over.
        prefix = g.identity()
        for x, _ in word.letters[:step.shift]:
            prefix = g.multiply(prefix, x)
        word = word.shifted(step.shift)
        fill = translate_chain(cx, g.inverse(prefix), fill, "triangles")

        p = ColoredWord(word.letters[:step.p_len])
        u = ColoredWord(word.letters[step.p_len:step.p_len + step.u_len])
        q = ColoredWord(word.letters[step.p_len + step.u_len:])
        ru = step.relator.u_letters
        if len(ru) != len(u) or any(
                g.key_of(a) != g.key_of(b) for (a, _), (b, _) in
                zip(ru, u.letters)):
            raise ValueError("step's u does not match the relator")

        # Recolor the relator so its u-half wears the current word's colors.
        rel_word = step.relator.word(cx)
        recolored = ColoredWord(
            [(x, uc) for (x, _), (_, uc) in zip(ru, u.letters)]
            + rel_word.letters[len(ru):])
        rel_fill = recolor_filling(cx, rel_word, recolored, step.relator.fill)
        v = ColoredWord(list(step.relator.v_letters))

        # Cor. stitch via the cyclic shift x = q p, y = u, z = v.
        qp_shift = step.p_len + step.u_len
        prefix2 = g.identity()
        for x, _ in word.letters[:qp_shift]:
            prefix2 = g.multiply(prefix2, x)
        fill_qpu = translate_chain(cx, g.inverse(prefix2), fill, "triangles")
        qp = ColoredWord(q.letters + p.letters)
        fill_qpv = stitch(cx, fill_qpu, rel_fill, qp, u, v)
        # Shift q p v back to p v q.
        prefix3 = g.identity()
        for x, _ in q.letters:
            prefix3 = g.multiply(prefix3, x)
        fill = translate_chain(cx, prefix3, fill_qpv, "triangles")
        word = p.concat(v).concat(q)
        sizes.append(len(fill))
        if len(fill) > sizes[-2] + t_bound + 2 * ell + 2:
            raise AssertionError("per-step size bound violated")

    # Recolor onto the target coloring and project to the plain complex.
    if [cx.group.key_of(x) for x, _ in word.letters] != \
            [cx.group.key_of(x) for x, _ in target.letters]:
        raise ValueError("derivation did not produce the target word")
    fill = recolor_filling(cx, word, target, fill)
    plain = project_plain(cx, fill)
    _, want = word_to_loop(cx, target, multicomplex=True)
    got = boundary(cx, fill)
    bound = (t_bound + 4 * ell + 2) * len(steps) + 1
    return {
        "filling": plain,
        "multicomplex_filling": fill,
        "boundary_ok": got == want,
        "size": len(fill),
        "bound": bound,
        "bound_ok": len(fill) <= bound,
        "steps": len(steps),
        "sizes": sizes,
    }


# -- cone radius ---------------------------------------------------------------


def cone_radius_bound(cx: CosetComplex, apex: int = 0) -> dict:
    """BFS paths from the apex plus per-edge fillings; R = max filling size.

    An unfillable loop reports an infinite cone radius (nonvanishing H^1).
    """
    n = cx.n_vertices
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for eid in range(cx.n_edges):
        u, v = (int(w) for w in cx.edges[eid])
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    for lst in adj:
        lst.sort()
    parent_edge = np.full(n, -1, dtype=np.int64)
    visited = np.zeros(n, dtype=bool)
    visited[apex] = True
    order = [apex]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for v, eid in adj[u]:
            if not visited[v]:
                visited[v] = True
                parent_edge[v] = eid
                order.append(v)
    if not visited.all():
        raise ValueError("complex is disconnected")

    path_cache: dict[int, frozenset] = {apex: frozenset()}

    def path_chain(v: int) -> frozenset:
        got = path_cache.get(v)
        if got is not None:
            return got
        stack = []
        w = v
        while w not in path_cache:
            stack.append(w)
            eid = int(parent_edge[w])
            u, x = (int(a) for a in cx.edges[eid])
            w = x if u == w else u
        base = path_cache[w]
        for node in reversed(stack):
            eid = int(parent_edge[node])
            base = base ^ {eid}
            path_cache[node] = base
        return path_cache[v]

    solver = _filling_solver(cx)
    transform = solver.transform
    radius = 0
    worst_edge = None
    for eid in range(cx.n_edges):
        u, v = (int(w) for w in cx.edges[eid])
        chain = path_chain(u) ^ {eid} ^ path_chain(v)
        b = np.zeros(cx.n_edges, dtype=np.uint8)
        for e in chain:
            b[e] = 1
        y = (transform @ b) % 2
        if np.any(y[solver.rank:]):
            return {"finite": False, "apex": apex, "unfillable_edge": eid}
        size = int(y[:solver.rank].sum())
        if size > radius:
            radius = size
            worst_edge = eid
    return {
        "finite": True,
        "apex": apex,
        "radius": radius,
        "worst_edge": worst_edge,
        "coboundary_expansion_lower_bound":
            (1.0 / (3 * radius)) if radius else 1.0,
    }


# -- the explicit 20-triangle filling ------------------------------------------


def verify_named_filling_a3(q: int) -> dict:
    """Construct the eight published cosets and five apexes and check the
    20-triangle filling of the commutator loop in the A3 link over F_q."""
    from .complexes import build_link_complex
    from .chevalley import Realization

    if q % 2 == 0:
        raise ValueError("the construction divides by 2; q must be odd")
    cx = build_link_complex("a3", q)
    config = cx.config
    field = cx.field
    real = Realization(config.system, field)
    bf = real.bf
    g = cx.group
    pr = config.parse_root

    def elem(*factors) -> np.ndarray:
        out = bf.identity(real.n, ())
        for root_name, value in factors:
            out = bf.matmul(out[None], real.root_matrix(
                pr(root_name), value)[None])[0]
        return out

    one = field.one()
    two = field.from_int(2)
    half = two.inverse()

    # The eight cosets (deleting gamma = RED = <alpha, beta>; deleting
    # alpha = BLUE = <beta, gamma>).  The eighth was published as
    # x_{b+g}(1) x_b(1/2) x_g(2) . <a,b>, which is identically the fifth
    # coset (the quotient collapses into the subgroup for every q); the
    # working form swaps the final letter and the subgroup to their
    # alpha-side mirrors, and is the unique completion of the five-square
    # tiling anchored on the other seven cosets.
    assignment = [
        ("BLUE", elem()),
        ("RED", elem()),
        ("BLUE", elem(("a+b", one))),
        ("RED", elem(("b+g", one))),
        ("RED", elem(("b", one), ("g", two))),
        ("BLUE", elem(("b", one), ("a", one))),
        ("RED", elem(("a+b", one), ("b", two), ("g", one))),
        ("BLUE", elem(("b+g", one), ("b", half), ("a", two))),
    ]
    commutator = ColoredWord([
        (elem(("a+b", one)), "RED"),
        (elem(("b+g", one)), "BLUE"),
        (elem(("a+b", -one)), "RED"),
        (elem(("b+g", -one)), "BLUE"),
    ])
    _, outer = word_to_loop(cx, commutator)
    try:
        tris = _twenty_triangles(cx, assignment, outer)
    except ValueError as exc:
        return {"q": q, "passed": False, "detail": str(exc)}
    return {
        "q": q,
        "triangles": sorted(tris),
        "count": len(tris),
        "boundary_ok": boundary(cx, set(tris)) == outer,
        "eighth_coset_note": ("published eighth coset duplicates the fifth; "
                              "using its alpha-side mirror "
                              "x_{b+g}(1) x_b(1/2) x_a(2) . <b,g>"),
        "passed": len(tris) == 20 and boundary(cx, set(tris)) == outer,
    }


def _twenty_triangles(cx: CosetComplex, assignment, outer: set) -> set:
    """Search the five green apexes tiling the published squares."""
    vids = []
    for color, mat in assignment:
        vids.append(_vertex(cx, mat, color))
    if len(set(vids)) != 8:
        raise ValueError("published cosets are not eight distinct vertices")
    vset = set(vids)
    induced = {}
    for eid in range(cx.n_edges):
        u, v = (int(w) for w in cx.edges[eid])
        if u in vset and v in vset:
            induced[(min(u, v), max(u, v))] = eid
    if not (outer <= set(induced.values())):
        raise ValueError("outer loop is not induced on the published cosets")

    # Greens adjacent (by triangle) to induced edges.
    by_green: dict[int, set] = {}
    for tid in range(cx.n_triangles):
        a, b, c = (int(x) for x in cx.triangles[tid])
        tri = {a, b, c}
        green = next(v for v in tri if cx.vertices[v].color == "GREEN")
        others = sorted(tri - {green})
        key = (others[0], others[1])
        if key in induced:
            by_green.setdefault(green, set()).add(induced[key])

    candidates = []
    reds = [v for v in vids if cx.vertices[v].color == "RED"]
    blues = [v for v in vids if cx.vertices[v].color == "BLUE"]
    import itertools as it

    for green, edges in sorted(by_green.items()):
        if len(edges) < 4:
            continue
        for r1, r2 in it.combinations(sorted(reds), 2):
            for b1, b2 in it.combinations(sorted(blues), 2):
                cycle = []
                ok = True
                for u, v in ((r1, b1), (b1, r2), (r2, b2), (b2, r1)):
                    e = induced.get((min(u, v), max(u, v)))
                    if e is None or e not in edges:
                        ok = False
                        break
                    cycle.append(e)
                if ok:
                    candidates.append((green, frozenset(cycle)))
    # Five candidates whose cycles XOR to the outer loop.
    want = frozenset(outer)
    for combo in it.combinations(range(len(candidates)), 5):
        acc: frozenset = frozenset()
        for idx in combo:
            acc ^= candidates[idx][1]
        if acc == want:
            tris = set()
            for idx in combo:
                green, cycle = candidates[idx]
                for e in cycle:
                    u, v = (int(w) for w in cx.edges[e])
                    token = _triangle_token(cx, (green, u, v))
                    if token is None or isinstance(token, tuple):
                        raise ValueError("candidate triangle missing")
                    tris.add(token)
            if len(tris) == 20:
                return tris
    raise ValueError("no five squares tile the outer loop")
