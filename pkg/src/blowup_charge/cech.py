"""Cech cohomology of bundles on the blown-up plane over the cover {U, V}.

A bundle is given by a unimodular transition matrix T with entries in
Q[z, 1/z, u]; a section with U-frame components s has V-frame components
T s.  A U-frame monomial vector e_c z^k u^a is

* a U-coboundary when k >= 0, and
* a V-coboundary when k <= a - delta, where delta = max(l - i) over the
  terms z^l u^i of T (then T e_c z^k u^a is V-holomorphic).

H^1 is therefore the finite quotient of the band a - delta < k < 0 by the
band-projections of T^-1 applied to V-holomorphic monomial vectors.  The
u-degree cap is exact once it reaches delta - 2, where the band ends.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import BiLaurent, MatrixBL, Monomial, Window
from .bundle import VEC_ORDER, BundleV, end_transition, unvec
from .errors import NonStabilized, WindowTooSmall
from .linalg import Echelon, Indexer, kernel

MAX_ENLARGEMENTS = 6
ENLARGE_STEP = (2, 2, 2)


@dataclass(frozen=True)
class CochainSpace:
    rank: int
    window: Window
    basis: tuple[tuple[int, Monomial], ...]


@dataclass
class CechResult:
    dim: int
    representatives: list
    window: Window
    stabilized: bool = False
    history: list = field(default_factory=list)


def default_window(j: int) -> Window:
    return Window(umax=2 * j, zmin=-(3 * j + 2), zmax=3 * j + 2)


def _entry_terms(T: MatrixBL) -> list[list[list[tuple[int, int, Fraction]]]]:
    return [[[(m.zexp, m.udeg, c) for m, c in T[r, c].items()] for c in range(T.cols)]
            for r in range(T.rows)]


def spread(T: MatrixBL) -> int:
    """max(l - i) over all terms z^l u^i of the entries of T."""
    vals = [m.zexp - m.udeg for row in T.entries for e in row for m, _ in e.items()]
    if not vals:
        raise ValueError("zero matrix")
    return max(vals)


def _check_unimodular(T: MatrixBL) -> MatrixBL:
    if T.rows != T.cols:
        raise ValueError("transition matrix must be square")
    return T.inverse_unimodular()


def _as_cochain(vec: dict, keys: list, rank: int) -> tuple[BiLaurent, ...]:
    comps: list[dict] = [dict() for _ in range(rank)]
    for idx, coeff in vec.items():
        c, k, a = keys[idx]
        comps[c][(k, a)] = coeff
    return tuple(BiLaurent(d) for d in comps)


def section_basis(T: MatrixBL, umax: int, zmax: int | None = None, order: str = "component"):
    """Coordinates and kernel of s -> (non-V-holomorphic part of T s).

    Returns ``(keys, kernel_vectors)`` where keys are (component, zexp, udeg)
    and kernel vectors map key indices to coefficients.  Sections are exact
    polynomial sections, not truncated ones: T s is computed in full.
    """
    Tinv = _check_unimodular(T)
    reach = spread(Tinv)
    r = T.rows
    top = lambda a: a + reach if zmax is None else min(zmax, a + reach)
    keys = [(c, k, a) for c in range(r) for a in range(umax + 1) for k in range(0, top(a) + 1)]
    if order == "udeg":
        keys.sort(key=lambda t: (t[2], t[0], t[1]))
    elif order != "component":
        raise ValueError(f"unknown order {order!r}")
    terms = _entry_terms(T)
    eq = Indexer()
    cols = []
    for c, k, a in keys:
        col = {}
        for row in range(r):
            for l, i, coeff in terms[row][c]:
                kk, aa = k + l, a + i
                if kk > aa:
                    col[eq((row, kk, aa))] = coeff
        cols.append(col)
    vecs, _ = kernel(cols)
    return keys, vecs


def h0(T: MatrixBL, w: Window) -> CechResult:
    """Sections holomorphic on U (inside ``w``) whose V-frame image T s is V-holomorphic."""
    Tinv = _check_unimodular(T)
    reach = spread(Tinv)
    if w.zmin > 0 or w.zmax < w.umax + reach:
        raise WindowTooSmall(
            f"sections of u-degree <= {w.umax} reach z^{w.umax + reach}; window is [{w.zmin}, {w.zmax}]")
    keys, vecs = section_basis(T, w.umax, w.zmax)
    reps = [_as_cochain(v, keys, T.rows) for v in vecs]
    return CechResult(len(reps), reps, w)


def _band(delta: int, rank: int, w: Window) -> list[tuple[int, int, int]]:
    return [(c, k, a) for c in range(rank) for a in range(w.umax + 1)
            for k in range(max(a - delta + 1, w.zmin), min(-1, w.zmax) + 1)]


def h1(T: MatrixBL, w: Window) -> CechResult:
    """H^1 = cochains / (U-holomorphic + T^-1 V-holomorphic), truncated at u-degree ``w.umax``."""
    Tinv = _check_unimodular(T)
    delta = spread(T)
    r = T.rows
    if delta >= 2 and w.zmin > 1 - delta:
        raise WindowTooSmall(f"cocycle band starts at z^{1 - delta}, window starts at z^{w.zmin}")
    band = _band(delta, r, w)
    index = {key: n for n, key in enumerate(band)}
    inv_terms = _entry_terms(Tinv)
    ech = Echelon()
    for c in range(r):
        col_terms = [(row, l, i, coeff) for row in range(r) for l, i, coeff in inv_terms[row][c]]
        for a in range(w.umax + 1):
            ks = set()
            for row, l, i, coeff in col_terms:
                if a + i > w.umax:
                    continue
                lo = a + i - delta + 1 - l
                hi = min(a, -1 - l)
                ks.update(range(lo, hi + 1))
            for k in sorted(ks):
                vec = {}
                for row, l, i, coeff in col_terms:
                    n = index.get((row, k + l, a + i))
                    if n is not None:
                        vec[n] = vec.get(n, 0) + coeff
                vec = {n: x for n, x in vec.items() if x}
                if vec:
                    ech.add(vec)
    pivots = ech.pivots
    free = [n for n in range(len(band)) if n not in pivots]
    reps = []
    for n in free:
        c, k, a = band[n]
        if a == w.umax:
            raise WindowTooSmall(f"a cohomology class sits at the u-degree cap {w.umax}")
        reps.append(_as_cochain({n: Fraction(1)}, band, r))
    return CechResult(len(free), reps, w)


def stable(compute, w0: Window, what: str, max_enlargements: int = MAX_ENLARGEMENTS) -> CechResult:
    """Run ``compute(window)`` until two consecutive enlargements agree on the dimension."""
    history = []
    results = []
    w = w0
    for _ in range(max_enlargements + 1):
        try:
            res = compute(w)
        except WindowTooSmall:
            history.append((w.as_dict(), None))
            results = []
            w = w.enlarged(ENLARGE_STEP)
            continue
        history.append((w.as_dict(), res.dim))
        results.append(res)
        if len(results) >= 3 and results[-1].dim == results[-2].dim == results[-3].dim:
            out = results[-3]
            out.stabilized = True
            out.history = history
            return out
        w = w.enlarged(ENLARGE_STEP)
    raise NonStabilized(what, [d for _, d in history])


def r1_result(b: BundleV, w0: Window | None = None) -> CechResult:
    if b.j == 0:
        return CechResult(0, [], default_window(0), stabilized=True)
    return stable(lambda w: h1(b.T, w), w0 or default_window(b.j), f"H^1 of {b}")


def r1_oracle(b: BundleV) -> int:
    """Length of R^1 pi_* V, as the stabilized H^1 dimension of V."""
    return r1_result(b).dim


def moduli_result(b: BundleV, w0: Window | None = None) -> CechResult:
    if b.j == 0:
        return CechResult(0, [], default_window(0), stabilized=True)
    T = end_transition(b).T_end
    return stable(lambda w: h1(T, w), w0 or default_window(b.j), f"H^1 of End {b}")


def moduli_dim_oracle(b: BundleV) -> int:
    """Dimension of H^1(End V), the tangent space to the local moduli."""
    return moduli_result(b).dim


# morphisms ------------------------------------------------------------------

def _global_monomials(umax: int) -> list[tuple[int, int]]:
    # functions holomorphic on both charts: z^k u^a with 0 <= k <= a
    return [(k, a) for a in range(umax + 1) for k in range(a + 1)]


def _frame_fixing_kernel(T1: MatrixBL, T2: MatrixBL, umax: int, traceless: bool = False):
    """Matrices X with entries holomorphic on both charts and T2 X = X T1."""
    keys = [(e, k, a) for e in range(4) for k, a in _global_monomials(umax)]
    t1 = _entry_terms(T1)
    t2 = _entry_terms(T2)
    eq = Indexer()
    cols = []
    for e, k, a in keys:
        t, c0 = VEC_ORDER[e]
        col: dict[int, Fraction] = {}

        def bump(key, x):
            n = eq(key)
            s = col.get(n, 0) + x
            if s:
                col[n] = s
            else:
                col.pop(n, None)

        # (T2 X)[r][c0] += T2[r][t] * X[t][c0]
        for r in range(2):
            for l, i, coeff in t2[r][t]:
                bump((r, c0, k + l, a + i), coeff)
        # (X T1)[t][c] -= X[t][c0] * T1[c0][c]
        for c in range(2):
            for l, i, coeff in t1[c0][c]:
                bump((t, c, k + l, a + i), -coeff)
        if traceless and t == c0:
            bump(("trace", k, a), Fraction(1))
        cols.append(col)
    vecs, _ = kernel(cols)
    return keys, vecs


def _as_matrix(vec: dict, keys: list) -> MatrixBL:
    comps: list[dict] = [dict() for _ in range(4)]
    for idx, coeff in vec.items():
        e, k, a = keys[idx]
        comps[e][(k, a)] = coeff
    return unvec([BiLaurent(d) for d in comps])


def hom_space(b1: BundleV, b2: BundleV, w: Window | None = None) -> CechResult:
    """Morphisms V1 -> V2 that fix the canonical frames: X global with T2 X = X T1."""
    w = w or default_window(max(b1.j, b2.j))
    keys, vecs = _frame_fixing_kernel(b1.T, b2.T, w.umax)
    reps = [_as_matrix(v, keys) for v in vecs]
    return CechResult(len(reps), reps, w)


def traceless_endomorphisms(b: BundleV, w: Window | None = None) -> CechResult:
    w = w or default_window(b.j)
    keys, vecs = _frame_fixing_kernel(b.T, b.T, w.umax, traceless=True)
    return CechResult(len(vecs), [_as_matrix(v, keys) for v in vecs], w)


def restrict_to_divisor(X: MatrixBL) -> MatrixBL:
    """Set u = 0 in every entry."""
    return MatrixBL([[BiLaurent({m: c for m, c in e.items() if m.udeg == 0}) for e in row]
                     for row in X.entries])


def traceless_auto_dim(b: BundleV, w: Window | None = None) -> int:
    """Dimension of the values on the exceptional divisor of traceless frame-fixing endomorphisms.

    A traceless endomorphism is an automorphism exactly when this value is
    nonzero, so the result counts independent traceless automorphism
    directions.
    """
    res = traceless_endomorphisms(b, w)
    ech = Echelon()
    idx = Indexer()
    for X in res.representatives:
        R = restrict_to_divisor(X)
        vec = {}
        for r in range(2):
            for c in range(2):
                for m, coeff in R[r, c].items():
                    vec[idx((r, c, m))] = coeff
        if vec:
            ech.add(vec)
    return len(ech)
