from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from blowup_charge.bundle import iter_monomial_classes, make_bundle, random_class
from blowup_charge.dirimg import (
    ModulePresentation, TruncRing, cokernel_length, dualize, lq_at, lq_oracle, lq_punctured,
    lq_result, pushforward_module, charge,
)
from blowup_charge.cech import r1_oracle

z, u = sympy.symbols("z u")


def section_expr(s):
    comps = [0, 0]
    for (c, k, a), v in s.items():
        comps[c] += sympy.Rational(v.numerator, v.denominator) * z**k * u**a
    return sympy.Matrix(comps)


def test_example_relation_under_blowdown_coordinates():
    # x = u, y = z*u make x*beta_i - y*beta_(i-1) vanish identically
    for jj, nn in ((3, 2), (4, 3), (5, 2)):
        beta = [sympy.Matrix([-z**i * u, z**(jj - nn + i)]) for i in range(nn + 1)]
        for i in range(1, nn + 1):
            assert sympy.expand(u * beta[i] - z * u * beta[i - 1]) == sympy.zeros(2, 1)


def test_example_generators_and_relations():
    m = pushforward_module(make_bundle(3, "z^2*u"))
    assert m.gens == 4
    exprs = [section_expr(g) for g in m.elements]
    for i in range(3):
        beta = sympy.Matrix([-z**i * u, z**(1 + i)])
        assert any(sympy.expand(e - beta) == sympy.zeros(2, 1) or sympy.expand(e + beta) == sympy.zeros(2, 1)
                   for e in exprs)
    assert any(sympy.expand(e - sympy.Matrix([0, u])) == sympy.zeros(2, 1) for e in exprs)
    assert len(m.rels) == 2
    assert all(m.relation_holds(r) for r in m.rels)


def test_trivial_bundle_module_is_free():
    m = pushforward_module(make_bundle(0, "0"), 4)
    assert m.gens == 2 and m.rels == []
    assert lq_oracle(make_bundle(0, "0")) == 0


def test_j1_split_module():
    # one generator from the O(-1) summand, two from the O(1) summand
    m = pushforward_module(make_bundle(1, "0"), 4)
    assert m.gens == 3
    assert len(m.rels) == 1
    assert all(m.relation_holds(r) for r in m.rels)


def test_dual_of_example_is_free_rank_two():
    n = 2
    b = make_bundle(3, f"z^{n}*u")
    m = pushforward_module(b, 8)
    d = dualize(m, 8)
    assert d.gens == 2 and d.rels == []
    assert d.annihilates(m.rels)
    dd = dualize(d, 8)
    assert dd.gens == 2 and dd.rels == []
    # one dual generator vanishes on gamma and sends the betas to the
    # degree-n monomials x^(n-i) y^i
    gamma = next(k for k, g in enumerate(m.elements) if all(c == 1 for (c, _, _) in g))
    B = next(phi for phi in d.elements if not any(k == gamma for k, _, _ in phi))
    assert sorted((a, bb) for (k, a, bb) in B) == sorted((n - i, i) for i in range(n + 1))
    assert all(abs(v) == 1 for v in B.values())


def test_dual_of_free_module():
    d = dualize(ModulePresentation(3, [], [0, 0, 0]), 3)
    assert d.gens == 3 and d.rels == []


@pytest.mark.parametrize("j,n,expected", [(3, 2, 3), (4, 2, 3), (4, 3, 6), (3, 1, 1), (2, 1, 1)])
def test_lq_for_zn_u(j, n, expected):
    # brute-force value: the image of M in its double dual is (x, y)^n
    assert lq_oracle(make_bundle(j, f"z^{n}*u")) == expected


@pytest.mark.parametrize("j", range(0, 5))
def test_lq_split(j):
    assert lq_oracle(make_bundle(j, "0")) == j * (j + 1) // 2


@pytest.mark.parametrize("j", [2, 3, 4])
def test_lq_matches_punctured_sections_on_monomials(j):
    for e in iter_monomial_classes(j):
        b = make_bundle(j, e.p)
        assert lq_oracle(b) == lq_punctured(b), str(e.p)


def test_lq_matches_punctured_sections_on_random_classes():
    rng = random.Random(11)
    for j in (2, 3, 4):
        for _ in range(8):
            e = random_class(j, rng, max_terms=4, min_terms=2)
            b = make_bundle(j, e.p)
            assert lq_oracle(b) == lq_punctured(b), (j, str(e.p))


def test_coker_independent_of_generator_order():
    b = make_bundle(4, "z^3*u + u^2")
    res = lq_at(b, 10)
    base = res.length
    rng = random.Random(2)
    for _ in range(5):
        images = res.rho.images[:]
        rng.shuffle(images)
        ddual = res.double_dual.elements[:]
        rng.shuffle(ddual)
        assert cokernel_length(ddual, images, 10) == base


def test_stabilization_history():
    res = lq_result(make_bundle(3, "z^2*u"))
    (d0, g0, r0, l0), (d1, g1, r1, l1) = res.history[-2:]
    assert d1 == d0 + 2 and (g0, r0, l0) == (g1, r1, l1)


def test_charge_examples():
    assert charge(make_bundle(3, "z^2*u")) == lq_oracle(make_bundle(3, "z^2*u")) + 2
    for j in range(0, 5):
        assert charge(make_bundle(j, "0")) == j * j
    assert 2 <= charge(make_bundle(2, "u")) <= 4


classes = st.integers(1, 4).flatmap(
    lambda j: st.integers(0, 10**6).map(lambda s: random_class(j, random.Random(s), min_terms=0)))


@settings(max_examples=25, deadline=None)
@given(classes)
def test_bounds_hold(e):
    b = make_bundle(e.j, e.p)
    j = e.j
    lq, r1 = lq_oracle(b), r1_oracle(b)
    assert j <= lq + r1 <= j * j
    assert 0 <= lq <= j * (j + 1) // 2
    if e.p:
        assert j - 1 <= r1 <= j * (j - 1) // 2


@settings(max_examples=25, deadline=None)
@given(classes)
def test_relations_hold(e):
    m = pushforward_module(make_bundle(e.j, e.p))
    assert all(m.relation_holds(r) for r in m.rels)


def test_trunc_ring():
    R = TruncRing(3)
    f = {(1, 0): Fraction(1), (0, 1): Fraction(2)}
    sq = R.mul(f, f)
    assert sq == {(2, 0): 1, (1, 1): 4, (0, 2): 4}
    assert R.mul(sq, sq) == {}
    assert R.add(f, {(1, 0): Fraction(-1)}) == {(0, 1): 2}
    assert len(R.monomials()) == 10
