"""Direct image of V(j, p) under the blow-down, its dual and double dual.

The stalk M of the direct image is realized by the polynomial sections of V
over the blown-up plane, a module over A = Q[x, y] with x = u and y = z*u
acting by multiplication in the U-frame.  Completion does not change any of
the lengths computed here, so everything stays polynomial.

Elements of A^r are dicts ``{(k, alpha, beta): coeff}`` meaning
sum coeff * x^alpha y^beta e_k.  Sections are dicts ``{(c, zexp, udeg): coeff}``.
All kernels are exact: unknowns are capped in degree but products are never
truncated.  Only the final length count truncates, at a degree where
Artin-Rees makes the count exact; stabilization in the cap guards that.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bundle import BundleV
from .cech import r1_oracle, section_basis, spread
from .errors import NonStabilized
from .linalg import Echelon, Indexer, kernel

MAX_DEGREE_STEPS = 5
DEGREE_STEP = 2


def default_degree_cap(j: int) -> int:
    return 2 * j + 2


class TruncRing:
    """Q[x, y] with every term of total degree above ``maxdeg`` dropped."""

    def __init__(self, maxdeg: int):
        if maxdeg < 0:
            raise ValueError("degree cap must be non-negative")
        self.maxdeg = maxdeg

    def monomials(self, upto: int | None = None) -> list[tuple[int, int]]:
        top = self.maxdeg if upto is None else min(upto, self.maxdeg)
        return [(d - b, b) for d in range(top + 1) for b in range(d + 1)]

    def truncate(self, f: dict) -> dict:
        return {m: c for m, c in f.items() if m[0] + m[1] <= self.maxdeg and c}

    def add(self, f: dict, g: dict) -> dict:
        out = dict(f)
        for m, c in g.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return self.truncate(out)

    def mul(self, f: dict, g: dict) -> dict:
        out: dict = {}
        for (a1, b1), c1 in f.items():
            for (a2, b2), c2 in g.items():
                if a1 + a2 + b1 + b2 > self.maxdeg:
                    continue
                m = (a1 + a2, b1 + b2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return out


def _degree(vec: dict) -> int:
    """Total (x, y)-degree of an element of A^r."""
    return max((a + b for _, a, b in vec), default=-1)


def _shift(vec: dict, alpha: int, beta: int) -> dict:
    return {(k, a + alpha, b + beta): c for (k, a, b), c in vec.items()}


def _section_degree(s: dict) -> int:
    return max(a for _, _, a in s)


def _section_shift(s: dict, alpha: int, beta: int) -> dict:
    # x^alpha y^beta = z^beta u^(alpha + beta)
    return {(c, k + beta, a + alpha + beta): v for (c, k, a), v in s.items()}


def _monomials_upto(d: int) -> list[tuple[int, int]]:
    return [(t - b, b) for t in range(max(d, -1) + 1) for b in range(t + 1)]


@dataclass
class ModulePresentation:
    """Generators (as sections or as vectors) and the relation columns among them."""

    gens: int
    rels: list[dict]
    degrees: list[int]
    elements: list[dict] = field(default_factory=list)

    def relation_holds(self, rel: dict) -> bool:
        """Substitute the generator elements into ``rel`` and test for zero."""
        total: dict = {}
        for (k, a, b), c in rel.items():
            for key, v in _section_shift(self.elements[k], a, b).items():
                s = total.get(key, 0) + c * v
                if s:
                    total[key] = s
                else:
                    total.pop(key, None)
        return not total


@dataclass
class DualModule:
    """Homomorphisms to A, as vectors phi in A^r with phi . rels = 0."""

    gens: int
    rels: list[dict]
    degrees: list[int]
    elements: list[dict] = field(default_factory=list)

    def annihilates(self, rels: list[dict]) -> bool:
        return all(not _pair(phi, rel) for phi in self.elements for rel in rels)


@dataclass
class EvalMap:
    """rho: gens(M) -> A^s, generator g_k going to (phi_t(g_k))_t."""

    images: list[dict]


def _pair(phi: dict, rel: dict) -> dict:
    """sum_k phi_k * rel_k in A."""
    out: dict = {}
    for (k1, a1, b1), c1 in phi.items():
        for (k2, a2, b2), c2 in rel.items():
            if k1 != k2:
                continue
            m = (a1 + a2, b1 + b2)
            s = out.get(m, 0) + c1 * c2
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def _section_keydeg(key) -> int:
    return key[2]


def _vector_keydeg(key) -> int:
    return key[1] + key[2]


def _local_generators(elements: list[dict], D: int, keydeg, shift) -> list[int]:
    """Indices of minimal generators of the module spanned (over A) by ``elements``
    near the origin: Nakayama modulo m * module and terms of degree > D.

    ``elements`` should span the module in every degree up to D.  Elements
    are taken by increasing order (lowest degree present), so generators
    of low order are preferred.
    """
    idx = Indexer()
    span = Echelon()

    def trunc(v):
        return idx.vector({key: c for key, c in v.items() if keydeg(key) <= D})

    for e in elements:
        for a, b in ((1, 0), (0, 1)):
            t = trunc(shift(e, a, b))
            if t:
                span.add(t)
    order = sorted(range(len(elements)), key=lambda n: (
        min(map(keydeg, elements[n])), max(map(keydeg, elements[n])), n))
    kept = []
    for n in order:
        t = trunc(elements[n])
        if t and span.add(t) is None:
            kept.append(n)
    return kept


def _syzygies(elements: list[dict], degrees: list[int], cap: int, shift) -> list[dict]:
    """Exact relations sum_k f_k e_k = 0 with deg f_k <= cap."""
    keys = [(k, a, b) for k in range(len(elements)) for a, b in _monomials_upto(cap)]
    eq = Indexer()
    cols = [eq.vector(shift(elements[k], a, b)) for k, a, b in keys]
    vecs, _ = kernel(cols)
    return [{keys[n]: c for n, c in v.items()} for v in vecs]


def _reduce_relations(rels: list[dict], cap: int) -> list[dict]:
    keep = _local_generators(rels, cap, _vector_keydeg, _shift)
    return [rels[n] for n in keep]


def sections_upto(b: BundleV, N: int) -> list[dict]:
    """Basis of polynomial sections whose u-degree is at most N, filtered by u-degree."""
    keys, vecs = section_basis(b.T, N, order="udeg")
    return [{keys[n]: c for n, c in v.items()} for v in vecs]


def pushforward_module(b: BundleV, D: int | None = None) -> ModulePresentation:
    """Generators of the sections module and their syzygies, with degree cap D."""
    D = default_degree_cap(b.j) if D is None else D
    secs = sections_upto(b, D + max(b.j, 2))
    keep = _local_generators(secs, D, _section_keydeg, _section_shift)
    gens = [secs[n] for n in keep]
    degrees = [_section_degree(g) for g in gens]
    rels = _reduce_relations(_syzygies(gens, degrees, D, _section_shift), D)
    return ModulePresentation(len(gens), rels, degrees, gens)


def _annihilator(r: int, rels: list[dict], cap: int) -> list[dict]:
    """All phi in A^r with deg <= cap and phi . rel = 0 for every relation."""
    keys = [(k, a, b) for k in range(r) for a, b in _monomials_upto(cap)]
    eq = Indexer()
    cols = []
    for k, a, b in keys:
        col: dict = {}
        for t, rel in enumerate(rels):
            for (k2, a2, b2), c in rel.items():
                if k2 == k:
                    n = eq((t, a + a2, b + b2))
                    col[n] = col.get(n, 0) + c
        cols.append({n: c for n, c in col.items() if c})
    vecs, _ = kernel(cols)
    return [{keys[n]: c for n, c in v.items()} for v in vecs]


def dualize(m, D: int | None = None) -> DualModule:
    """Generators of Hom(M, A) and their relations, from a presentation of M."""
    D = max(m.degrees, default=0) + 2 if D is None else D
    phis = _annihilator(m.gens, m.rels, D)
    keep = _local_generators(phis, D, _vector_keydeg, _shift)
    gens = [phis[n] for n in keep]
    degrees = [_degree(g) for g in gens]
    rels = _reduce_relations(_syzygies(gens, degrees, D, _shift), D) if gens else []
    return DualModule(len(gens), rels, degrees, gens)


def evaluation_map(m: ModulePresentation, dual: DualModule) -> EvalMap:
    images = []
    for k in range(m.gens):
        img = {}
        for t, phi in enumerate(dual.elements):
            for (k2, a, b), c in phi.items():
                if k2 == k:
                    img[(t, a, b)] = c
        images.append(img)
    return EvalMap(images)


def _truncated_span(vectors: list[dict], L: int, ech: Echelon, idx: Indexer) -> None:
    for v in vectors:
        d0 = min((a + b for _, a, b in v), default=0)
        for a, b in _monomials_upto(L - d0):
            w = {key: c for key, c in _shift(v, a, b).items() if key[1] + key[2] <= L}
            if w:
                ech.add(idx.vector(w))


def cokernel_length(big: list[dict], small: list[dict], L: int) -> int:
    """dim (N1 + N2)/N2 for the submodules generated in A^s, counted below degree L."""
    idx = Indexer()
    ech = Echelon()
    _truncated_span(small, L, ech, idx)
    base = len(ech)
    _truncated_span(big, L, ech, idx)
    return len(ech) - base


@dataclass
class LQResult:
    length: int
    degree_cap: int
    generators: int
    relation_rank: int
    module: ModulePresentation | None = None
    dual: DualModule | None = None
    double_dual: DualModule | None = None
    rho: EvalMap | None = None
    history: list = field(default_factory=list)


def lq_at(b: BundleV, D: int) -> LQResult:
    m = pushforward_module(b, D)
    dual = dualize(m, D)
    ddual = dualize(dual, D)
    rho = evaluation_map(m, dual)
    # M^vv inside A^s is the span of the double-dual generators
    length = cokernel_length(ddual.elements, rho.images, D)
    return LQResult(length, D, m.gens, len(m.rels), m, dual, ddual, rho)


def lq_result(b: BundleV, D0: int | None = None, steps: int = MAX_DEGREE_STEPS) -> LQResult:
    """l(Q) stabilized over the degree cap: g, relation rank and length agree at D and D+2."""
    if b.j == 0:
        return LQResult(0, 0, 2, 0)
    D = default_degree_cap(b.j) if D0 is None else D0
    prev = lq_at(b, D)
    history = [(D, prev.generators, prev.relation_rank, prev.length)]
    for _ in range(steps):
        D += DEGREE_STEP
        cur = lq_at(b, D)
        history.append((D, cur.generators, cur.relation_rank, cur.length))
        if (cur.generators, cur.relation_rank, cur.length) == \
                (prev.generators, prev.relation_rank, prev.length):
            prev.history = history
            return prev
        prev = cur
    raise NonStabilized(f"l(Q) of {b}", history)


def lq_oracle(b: BundleV) -> int:
    """Length of the cokernel of M -> M^vv."""
    return lq_result(b).length


def charge(b: BundleV) -> int:
    return lq_oracle(b) + r1_oracle(b)


# independent check through sections off the exceptional divisor ----------

def _punctured_sections(T, umin: int, umax: int, reach: int) -> int:
    keys = [(c, k, a) for c in range(T.rows) for a in range(umin, umax + 1)
            for k in range(0, a + reach + 1)]
    terms = [[[(m.zexp, m.udeg, v) for m, v in T[r, c].items()] for c in range(T.cols)]
             for r in range(T.rows)]
    eq = Indexer()
    cols = []
    for c, k, a in keys:
        col = {}
        for row in range(T.rows):
            for l, i, v in terms[row][c]:
                if k + l > a + i:
                    col[eq((row, k + l, a + i))] = v
        cols.append(col)
    vecs, _ = kernel(cols)
    return len(vecs)


def lq_punctured(b: BundleV, depth: int | None = None, height: int | None = None) -> int:
    """dim of sections over the complement of the exceptional divisor modulo global sections.

    Off the divisor the direct image is the reflexive hull, so this quotient
    is Q.  Sections are counted with u-exponents in [-depth, height].
    """
    if b.j == 0:
        return 0
    depth = 2 * b.j + 2 if depth is None else depth
    height = 3 * b.j + 2 if height is None else height
    reach = spread(b.T.inverse_unimodular())
    total = _punctured_sections(b.T, -depth, height, reach)
    glob = _punctured_sections(b.T, 0, height, reach)
    return total - glob
