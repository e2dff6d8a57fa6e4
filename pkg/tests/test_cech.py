from __future__ import annotations

import pytest

from blowup_charge.algebra import BiLaurent, MatrixBL, Window, is_holomorphic_U, is_holomorphic_V, parse_polynomial
from blowup_charge.bundle import end_transition, make_bundle
from blowup_charge.cech import (
    default_window, h0, h1, hom_space, moduli_dim_oracle, moduli_result, r1_oracle, r1_result,
    restrict_to_divisor, traceless_auto_dim,
)
from blowup_charge.errors import WindowTooSmall
from blowup_charge.linalg import Echelon, Indexer
from oracles import brute_h1, brute_hom_dim


def P(text):
    return parse_polynomial(text)


def in_span(vectors, target) -> bool:
    idx = Indexer()
    ech = Echelon()

    def flat(v):
        return idx.vector({(c, m): x for c, q in enumerate(v) for m, x in q.items()})

    for v in vectors:
        ech.add(flat(v))
    return ech.contains(flat(target))


def is_section(T, s) -> bool:
    return all(is_holomorphic_U(q) for q in s) and all(is_holomorphic_V(q) for q in T.apply(s))


@pytest.mark.parametrize("j,n", [(2, 1), (3, 1), (3, 2), (4, 2), (4, 3)])
def test_section_convention_pin(j, n):
    b = make_bundle(j, f"z^{n}*u")
    res = h0(b.T, Window(n + 2, 0, n + 2 + 2 * j))
    gamma = (BiLaurent.zero(), BiLaurent.monomial(0, n - 1))
    assert is_section(b.T, gamma) and in_span(res.representatives, gamma)
    for i in range(1, n + 1):
        beta = (-BiLaurent.monomial(i, 1), BiLaurent.monomial(j - n + i, 0))
        assert is_section(b.T, beta)
        assert in_span(res.representatives, beta)


def test_h0_identity_gives_pullbacks():
    w = Window(3, 0, 3)
    res = h0(MatrixBL.identity(2), w)
    assert res.dim == 2 * sum(a + 1 for a in range(4))
    for s in res.representatives:
        assert all(m.zexp <= m.udeg for q in s for m in q.monomials())


def test_h0_split_j2_first_component_divisible_by_u2():
    # in the U-frame convention the O(-2) summand is the first component
    res = h0(make_bundle(2, "0").T, Window(5, 0, 7))
    firsts = [s[0] for s in res.representatives if s[0]]
    assert firsts and all(q.min_udeg() >= 2 for q in firsts)
    seconds = [s[1] for s in res.representatives if s[1]]
    assert any(q == BiLaurent.constant(1) for q in seconds)


def test_h0_window_too_small():
    with pytest.raises(WindowTooSmall):
        h0(make_bundle(2, "u").T, Window(4, 0, 3))


def test_h1_identity_is_zero():
    assert h1(MatrixBL.identity(2), Window(6, -8, 8)).dim == 0


@pytest.mark.parametrize("j", range(1, 6))
def test_h1_split(j):
    assert r1_oracle(make_bundle(j, "0")) == j * (j - 1) // 2


def test_h1_diagonal_is_sum_of_line_bundles():
    T = MatrixBL([[P("z^2"), 0, 0], [0, P("z^3"), 0], [0, 0, P("z^-5")]])
    assert h1(T, Window(8, -10, 10)).dim == 1 + 3


def test_h1_band_needs_wide_window():
    with pytest.raises(WindowTooSmall):
        h1(make_bundle(4, "0").T, Window(8, -2, 8))


def test_r1_examples():
    assert r1_oracle(make_bundle(2, "u")) == 1
    assert r1_oracle(make_bundle(3, "u^2")) == 3
    assert r1_oracle(make_bundle(4, "0")) == 6
    assert r1_oracle(make_bundle(0, "0")) == 0


@pytest.mark.parametrize("j,p", [(2, "u"), (3, "z^2*u"), (3, "z*u^2"), (4, "z^3*u"), (4, "z^-2*u"), (4, "u")])
def test_r1_against_sympy_oracle(j, p):
    b = make_bundle(j, p)
    assert r1_oracle(b) == brute_h1(b.T, 2 * j, 3 * j + 2)


@pytest.mark.parametrize("j,p", [(2, "u"), (2, "z*u"), (2, "z*u^2"), (2, "0")])
def test_end_h1_against_sympy_oracle(j, p):
    b = make_bundle(j, p)
    assert moduli_dim_oracle(b) == brute_h1(end_transition(b).T_end, 2 * j + 1, 4 * j + 3)


def test_moduli_dim_values():
    assert moduli_dim_oracle(make_bundle(2, "z*u^2")) == 5
    # brute-force values; see the sympy cross-check above
    assert moduli_dim_oracle(make_bundle(2, "u")) == 4
    assert moduli_dim_oracle(make_bundle(3, "z*u")) == 8
    assert moduli_dim_oracle(make_bundle(1, "0")) == 1


@pytest.mark.parametrize("j,p", [(2, "u"), (3, "z^2*u + u^2"), (4, "z^3*u")])
def test_stabilized_dims_survive_extra_enlargement(j, p):
    b = make_bundle(j, p)
    for res, T in ((r1_result(b), b.T), (moduli_result(b), end_transition(b).T_end)):
        assert res.stabilized
        assert h1(T, res.window.enlarged().enlarged().enlarged()).dim == res.dim


def test_default_window():
    assert default_window(3) == Window(6, -11, 11)


def _upper_with_constant_diagonal(X) -> bool:
    if X[1, 0]:
        return False
    R = restrict_to_divisor(X)
    return all(set(R[i, i].monomials()) <= {(0, 0)} for i in (0, 1))


@pytest.mark.parametrize("j,p", [(2, "u"), (2, "z*u"), (3, "z^2*u"), (4, "u^2 + z*u^3")])
def test_endomorphisms_upper_triangular(j, p):
    b = make_bundle(j, p)
    res = hom_space(b, b)
    assert res.dim > 0
    for X in res.representatives:
        assert _upper_with_constant_diagonal(X)
        assert any(e for row in X.entries for e in row)
        assert b.T @ X == X @ b.T


def test_split_endomorphisms_contain_diag():
    b = make_bundle(2, "0")
    res = hom_space(b, b)
    target = MatrixBL([[1, 0], [0, -1]])
    idx = Indexer()
    ech = Echelon()

    def flat(X):
        return idx.vector({(r, c, m): x for r in range(2) for c in range(2) for m, x in X[r, c].items()})

    for X in res.representatives:
        ech.add(flat(X))
    assert ech.contains(flat(target))


def test_hom_dimension_against_sympy():
    b1, b2 = make_bundle(2, "u"), make_bundle(2, "z*u")
    w = Window(4, -8, 8)
    assert hom_space(b1, b2, w).dim == brute_hom_dim(b1.T, b2.T, 4)


def test_traceless_auto_examples():
    assert traceless_auto_dim(make_bundle(2, "u")) == 0
    assert traceless_auto_dim(make_bundle(2, "0")) >= 1
    assert traceless_auto_dim(make_bundle(3, "z^2*u")) == 0
