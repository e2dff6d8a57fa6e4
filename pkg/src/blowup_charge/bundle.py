"""Rank-2 bundles V(j, p) on the blown-up plane in canonical form.

V(j, p) is glued from U x C^2 and V x C^2 by the transition matrix
``[[z^j, p], [0, z^-j]]``: a section with U-frame components ``s`` has
V-frame components ``T @ s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .algebra import BiLaurent, MatrixBL, Monomial, parse_polynomial
from .errors import CanonicalSupportViolation

SPLIT = "SPLIT"


def canonical_support(j: int) -> list[Monomial]:
    """Index set (l, i) allowed in a canonical extension class, ordered by (i, l)."""
    if j < 0:
        raise ValueError("splitting type must be non-negative")
    return [Monomial(l, i)
            for i in range(1, 2 * j - 1)
            for l in range(i - j + 1, j)]


def in_canonical_support(j: int, l: int, i: int) -> bool:
    return 1 <= i <= 2 * j - 2 and i - j + 1 <= l <= j - 1


@dataclass(frozen=True)
class ExtensionClass:
    j: int
    p: BiLaurent

    def __post_init__(self):
        if not isinstance(self.j, int) or self.j < 0:
            raise ValueError(f"splitting type must be a non-negative integer, got {self.j!r}")
        if isinstance(self.p, str):
            object.__setattr__(self, "p", parse_polynomial(self.p))
        if self.p.chart != "U":
            raise ValueError("extension class must be given in U-chart coordinates")
        for m in self.p.monomials():
            if not in_canonical_support(self.j, m.zexp, m.udeg):
                raise CanonicalSupportViolation(self.j, (m.zexp, m.udeg))

    @property
    def is_split(self) -> bool:
        return not self.p

    def key(self) -> tuple:
        return (self.j, tuple(sorted((m, c) for m, c in self.p.items())))

    def __str__(self):
        return f"(j={self.j}, p={self.p})"


def transition_matrix(j: int, p: BiLaurent) -> MatrixBL:
    return MatrixBL([[BiLaurent.monomial(j, 0), p],
                     [0, BiLaurent.monomial(-j, 0)]])


@dataclass(frozen=True)
class BundleV:
    ext: ExtensionClass
    T: MatrixBL = field(compare=False)

    @property
    def j(self) -> int:
        return self.ext.j

    @property
    def p(self) -> BiLaurent:
        return self.ext.p

    def __str__(self):
        return f"V{self.ext}"


@dataclass(frozen=True)
class EndBundleT:
    """Transition matrix of End V acting on (upper-right, upper-left, lower-right, lower-left)."""

    T_end: MatrixBL


def make_bundle(j: int, p: BiLaurent | str) -> BundleV:
    ext = ExtensionClass(j, p if isinstance(p, BiLaurent) else parse_polynomial(p))
    return BundleV(ext, transition_matrix(ext.j, ext.p))


def u_multiplicity(p: BiLaurent) -> int | str:
    """Largest power of u dividing p, or ``SPLIT`` for p = 0."""
    if not p:
        return SPLIT
    return p.min_udeg()


def splitting_type(b: BundleV) -> int:
    return b.ext.j


def end_transition(b: BundleV) -> EndBundleT:
    j, p = b.j, b.p
    zj = BiLaurent.monomial(j, 0)
    zmj = BiLaurent.monomial(-j, 0)
    return EndBundleT(MatrixBL([
        [BiLaurent.monomial(2 * j, 0), -p * zj, p * zj, -(p * p)],
        [0, 1, 0, p * zmj],
        [0, 0, 1, -p * zmj],
        [0, 0, 0, BiLaurent.monomial(-2 * j, 0)],
    ]))


# vectorization used by the End/Hom bundles: (upper-right, upper-left, lower-right, lower-left)
VEC_ORDER = ((0, 1), (0, 0), (1, 1), (1, 0))


def vec(m: MatrixBL) -> tuple[BiLaurent, ...]:
    return tuple(m[r, c] for r, c in VEC_ORDER)


def unvec(v) -> MatrixBL:
    entries = [[BiLaurent.zero(), BiLaurent.zero()], [BiLaurent.zero(), BiLaurent.zero()]]
    for (r, c), e in zip(VEC_ORDER, v):
        entries[r][c] = e
    return MatrixBL(entries)


def hom_transition(T1: MatrixBL, T2: MatrixBL) -> MatrixBL:
    """4x4 matrix of X -> T2 X T1^-1 in the fixed vectorization order."""
    T1inv = T1.inverse_unimodular()
    cols = []
    for r, c in VEC_ORDER:
        basis = [[0, 0], [0, 0]]
        basis[r][c] = 1
        cols.append(vec(T2 @ MatrixBL(basis) @ T1inv))
    return MatrixBL([[cols[c][r] for c in range(4)] for r in range(4)])


def iter_monomial_classes(j: int) -> Iterator[ExtensionClass]:
    """All classes z^l u^i with (l, i) canonical, coefficient 1."""
    for m in canonical_support(j):
        yield ExtensionClass(j, BiLaurent.monomial(m.zexp, m.udeg))


def random_class(j: int, rng, max_terms: int = 3, min_terms: int = 1,
                 coeffs: tuple[int, ...] = (-3, -2, -1, 1, 2, 3)) -> ExtensionClass:
    """Sparse pseudorandom class drawn from ``rng`` (a ``random.Random``)."""
    support = canonical_support(j)
    if not support:
        return ExtensionClass(j, BiLaurent.zero())
    hi = min(max_terms, len(support))
    lo = min(min_terms, hi)
    t = rng.randint(lo, hi)
    picks = sorted(rng.sample(range(len(support)), t))
    terms = {support[k]: Fraction(rng.choice(coeffs)) for k in picks}
    return ExtensionClass(j, BiLaurent(terms))
