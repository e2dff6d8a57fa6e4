"""Independent brute-force oracles built on sympy, used only by the tests.

They share no code with the package's linear algebra or band reduction:
ranks come from sympy's DomainMatrix over QQ, and coboundaries are generated
directly from the definition on a large explicit window.
"""

from __future__ import annotations

import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

z, u = sympy.symbols("z u")


def to_sympy(q) -> sympy.Expr:
    return sum((sympy.Rational(c.numerator, c.denominator) * z**m.zexp * u**m.udeg
                for m, c in q.items()), sympy.Integer(0))


def sympy_matrix(T) -> sympy.Matrix:
    return sympy.Matrix(T.rows, T.cols, lambda r, c: to_sympy(T[r, c]))


def _terms(expr) -> dict:
    """Monomial exponents (k, a) -> coefficient of a Laurent polynomial in z, u."""
    expr = sympy.expand(expr)
    out = {}
    for term in sympy.Add.make_args(expr):
        if term == 0:
            continue
        coeff, rest = term.as_coeff_Mul()
        powers = rest.as_powers_dict()
        k = int(powers.get(z, 0))
        a = int(powers.get(u, 0))
        out[(k, a)] = out.get((k, a), 0) + coeff
    return {key: c for key, c in out.items() if c != 0}


def _rank(rows: list[dict], ncols: int) -> int:
    if not rows:
        return 0
    data = [[QQ(0)] * ncols for _ in rows]
    for r, row in enumerate(rows):
        for c, v in row.items():
            data[r][c] = QQ(int(sympy.numer(v)), int(sympy.denom(v)))
    return DomainMatrix(data, (len(rows), ncols), QQ).rank()


def brute_h1(T, N: int, Z: int) -> int:
    """dim of cochains (z^k u^a, -Z <= k <= -1, a <= N) modulo coboundaries.

    Coboundaries are U-holomorphic cochains plus T^-1 applied to V-holomorphic
    monomial vectors, everything reduced modulo u^(N+1).  A relation is used
    only if it stays inside the window; window coordinates are also killed
    when T sends them to a V-holomorphic vector, a fact checked term by term.
    """
    S = sympy_matrix(T)
    Sinv = S.inv()
    r = S.rows
    coords = [(c, k, a) for c in range(r) for a in range(N + 1) for k in range(-Z, 0)]
    index = {key: n for n, key in enumerate(coords)}
    rels = []

    def add_relation(vec_exprs):
        row = {}
        for c, e in enumerate(vec_exprs):
            for (k, a), coeff in _terms(e).items():
                if a > N or k >= 0:
                    continue
                n = index.get((c, k, a))
                if n is None:
                    return
                row[n] = row.get(n, 0) + coeff
        row = {n: v for n, v in row.items() if v != 0}
        if row:
            rels.append(row)

    reach = 4 * max(abs(m.zexp) + m.udeg for e in T.entries for q in e for m in q.monomials())
    for c in range(r):
        for a in range(N + 1):
            for k in range(-Z - reach, a + 1):
                beta = [sympy.Integer(0)] * r
                beta[c] = z**k * u**a
                add_relation(list(Sinv * sympy.Matrix(beta)))
    for c, k, a in coords:
        v = [sympy.Integer(0)] * r
        v[c] = z**k * u**a
        image = S * sympy.Matrix(v)
        if all(kk <= aa for e in image for (kk, aa) in _terms(e)):
            rels.append({index[(c, k, a)]: 1})
    return len(coords) - _rank(rels, len(coords))


def brute_hom_dim(T1, T2, umax: int) -> int:
    """dim of 2x2 matrices X of global functions (z^k u^a, 0 <= k <= a <= umax)
    with T2 X = X T1, solved with sympy."""
    mons = [(k, a) for a in range(umax + 1) for k in range(a + 1)]
    syms = []
    entries = []
    for e in range(4):
        cs = sympy.symbols(f"c{e}_0:{len(mons)}")
        syms.extend(cs)
        entries.append(sum(cc * z**k * u**a for cc, (k, a) in zip(cs, mons)))
    X = sympy.Matrix(2, 2, entries)
    E = sympy_matrix(T2) * X - X * sympy_matrix(T1)
    eqs = []
    for e in E:
        expr = sympy.expand(e)
        poly_terms = {}
        for term in sympy.Add.make_args(expr):
            if term == 0:
                continue
            coeff_part = sympy.Integer(1)
            mono = sympy.Integer(1)
            for f in sympy.Mul.make_args(term):
                if f.free_symbols & {z, u}:
                    mono *= f
                else:
                    coeff_part *= f
            poly_terms[mono] = poly_terms.get(mono, 0) + coeff_part
        eqs.extend(v for v in poly_terms.values() if v != 0)
    if not eqs:
        return len(syms)
    A, _ = sympy.linear_eq_to_matrix(eqs, syms)
    return len(syms) - A.rank()
