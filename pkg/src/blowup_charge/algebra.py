"""Exact sparse polynomials in z^{+-1} and u over the rationals.

Everything lives in the U-chart coordinates (z, u) of the blown-up plane.
The second chart V has coordinates (xi, v) = (1/z, z*u); a monomial
z^l u^i is holomorphic on V exactly when l <= i.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

from .errors import ParseError

Rational = Fraction
Scalar = Union[int, Fraction]


class Monomial(NamedTuple):
    zexp: int
    udeg: int


def _as_rational(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficients must be int or Fraction, got {type(c).__name__}")


class BiLaurent:
    """Immutable sparse polynomial, Laurent in the first variable.

    ``chart`` is ``"U"`` for polynomials in (z, u) and ``"V"`` for the image
    under :func:`to_v_chart`, written in (xi, v).  Arithmetic is only defined
    between polynomials of the same chart.
    """

    __slots__ = ("_terms", "_chart", "_hash")

    def __init__(self, terms: Mapping | Iterable = (), chart: str = "U"):
        if chart not in ("U", "V"):
            raise ValueError(f"unknown chart {chart!r}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Monomial, Fraction] = {}
        for mono, c in items:
            l, i = mono
            if not isinstance(l, int) or not isinstance(i, int):
                raise TypeError("exponents must be integers")
            if i < 0:
                raise ValueError(f"negative exponent {i} in the second variable")
            c = _as_rational(c)
            key = Monomial(l, i)
            c = clean.get(key, 0) + c
            if c:
                clean[key] = c
            else:
                clean.pop(key, None)
        self._terms = clean
        self._chart = chart
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, chart: str = "U") -> "BiLaurent":
        # trusted constructor: keys are Monomials, values nonzero Fractions
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._chart = chart
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, zexp: int, udeg: int, coeff: Scalar = 1) -> "BiLaurent":
        return cls({(zexp, udeg): coeff})

    @classmethod
    def constant(cls, c: Scalar) -> "BiLaurent":
        return cls({(0, 0): c})

    @classmethod
    def zero(cls) -> "BiLaurent":
        return cls._raw({})

    @property
    def chart(self) -> str:
        return self._chart

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def monomials(self) -> list[Monomial]:
        return sorted(self._terms, key=lambda m: (m.udeg, m.zexp))

    def coeff(self, zexp: int, udeg: int) -> Fraction:
        return self._terms.get(Monomial(zexp, udeg), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.monomials())

    def min_udeg(self) -> int | None:
        return min((m.udeg for m in self._terms), default=None)

    def max_udeg(self) -> int | None:
        return max((m.udeg for m in self._terms), default=None)

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "BiLaurent":
        if isinstance(other, BiLaurent):
            if other._chart != self._chart:
                raise ValueError("cannot combine polynomials from different charts")
            return other
        if isinstance(other, (int, Fraction)):
            return BiLaurent({(0, 0): other}, chart=self._chart)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return BiLaurent._raw(out, self._chart)

    __radd__ = __add__

    def __neg__(self):
        return BiLaurent._raw({m: -c for m, c in self._terms.items()}, self._chart)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return BiLaurent._raw({}, self._chart)
            return BiLaurent._raw({m: c * other for m, c in self._terms.items()}, self._chart)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, Fraction] = {}
        for (l1, i1), c1 in self._terms.items():
            for (l2, i2), c2 in other._terms.items():
                key = Monomial(l1 + l2, i1 + i2)
                s = out.get(key, 0) + c1 * c2
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return BiLaurent._raw(out, self._chart)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = BiLaurent({(0, 0): 1}, chart=self._chart)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, dz: int, du: int) -> "BiLaurent":
        """Multiply by the monomial z^dz u^du."""
        return BiLaurent(((m.zexp + dz, m.udeg + du), c) for m, c in self._terms.items())

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BiLaurent({(0, 0): other}, chart=self._chart)
        if not isinstance(other, BiLaurent):
            return NotImplemented
        return self._chart == other._chart and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._chart, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"BiLaurent({str(self)!r}, chart={self._chart!r})"

    def __str__(self):
        return format_polynomial(self)


def format_polynomial(q: BiLaurent) -> str:
    """Canonical text form; ordered by second-variable degree, then first exponent.

    The output is accepted by :func:`parse_polynomial` for U-chart input.
    """
    if not q:
        return "0"
    names = ("z", "u") if q.chart == "U" else ("xi", "v")
    parts: list[str] = []
    for m in q.monomials():
        c = q.coeff(*m)
        factors = []
        if m.zexp:
            factors.append(names[0] if m.zexp == 1 else f"{names[0]}^{m.zexp}")
        if m.udeg:
            factors.append(names[1] if m.udeg == 1 else f"{names[1]}^{m.udeg}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = str(mag) + "*" + "*".join(factors)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


# parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(z|u)|(\^|\*|/|\+|-))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("var", m.group(2), start))
        else:
            tokens.append(("op", m.group(3), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def expect_op(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            self.error(f"expected {op!r}", tok)

    def signed_int(self) -> int:
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        tok = self.take()
        if tok[0] != "int":
            self.error("expected an integer exponent", tok)
        return sign * int(tok[1])

    def factor(self, zexp: int, udeg: int) -> tuple[int, int]:
        tok = self.take()
        if tok[0] != "var":
            self.error("expected 'z' or 'u'", tok)
        exp = 1
        if self.peek()[:2] == ("op", "^"):
            self.take()
            exp_tok = self.peek()
            exp = self.signed_int()
            if tok[1] == "u" and exp < 0:
                raise ParseError("negative exponent of u", self.text, exp_tok[2])
        if tok[1] == "z":
            return zexp + exp, udeg
        return zexp, udeg + exp

    def term(self, sign: int) -> tuple[Monomial, Fraction]:
        coeff = Fraction(sign)
        zexp = udeg = 0
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            num = int(tok[1])
            den = 1
            if self.peek()[:2] == ("op", "/"):
                self.take()
                dtok = self.take()
                if dtok[0] != "int":
                    self.error("expected a positive integer denominator", dtok)
                den = int(dtok[1])
                if den == 0:
                    raise ParseError("zero denominator", self.text, dtok[2])
            coeff *= Fraction(num, den)
            while self.peek()[:2] == ("op", "*"):
                self.take()
                zexp, udeg = self.factor(zexp, udeg)
        elif tok[0] == "var":
            zexp, udeg = self.factor(zexp, udeg)
            while self.peek()[:2] == ("op", "*"):
                self.take()
                zexp, udeg = self.factor(zexp, udeg)
        else:
            self.error("expected a term")
        return Monomial(zexp, udeg), coeff

    def poly(self) -> BiLaurent:
        terms: list[tuple[Monomial, Fraction]] = []
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        terms.append(self.term(sign))
        while True:
            tok = self.peek()
            if tok[0] == "end":
                break
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                terms.append(self.term(-1 if tok[1] == "-" else 1))
            else:
                self.error("expected '+', '-' or end of input")
        return BiLaurent(terms)


def parse_polynomial(text: str) -> BiLaurent:
    """Parse ``text`` such as ``"z^2*u - 1/2*z^-1*u^3"`` into a U-chart polynomial."""
    if not text.strip():
        raise ParseError("empty expression", text, 0)
    return _Parser(text).poly()


# charts and holomorphy ----------------------------------------------------

def to_v_chart(q: BiLaurent) -> BiLaurent:
    """Rewrite a U-chart polynomial in (xi, v): z^l u^i = xi^(i-l) v^i."""
    if q.chart != "U":
        raise ValueError("to_v_chart expects a U-chart polynomial")
    return BiLaurent._raw({Monomial(i - l, i): c for (l, i), c in q.items()}, "V")


def to_u_chart(q: BiLaurent) -> BiLaurent:
    """Inverse of :func:`to_v_chart`: xi^e v^i = z^(i-e) u^i."""
    if q.chart != "V":
        raise ValueError("to_u_chart expects a V-chart polynomial")
    return BiLaurent._raw({Monomial(i - e, i): c for (e, i), c in q.items()}, "U")


def is_holomorphic_U(q: BiLaurent) -> bool:
    return all(m.zexp >= 0 for m in q._terms)


def is_holomorphic_V(q: BiLaurent) -> bool:
    return all(m.zexp <= m.udeg for m in q._terms)


def is_polynomial(q: BiLaurent) -> bool:
    """True when every exponent is non-negative in the polynomial's own chart."""
    return all(m.zexp >= 0 and m.udeg >= 0 for m in q._terms)


# truncation windows -------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """Finite box of monomials: u-degree in [0, umax], z-exponent in [zmin, zmax]."""

    umax: int
    zmin: int
    zmax: int

    def __post_init__(self):
        if self.umax < 0:
            raise ValueError("umax must be non-negative")
        if self.zmin > self.zmax:
            raise ValueError("zmin must not exceed zmax")

    def contains(self, zexp: int, udeg: int) -> bool:
        return 0 <= udeg <= self.umax and self.zmin <= zexp <= self.zmax

    def enlarged(self, step: tuple[int, int, int] = (2, 2, 2)) -> "Window":
        du, dzmin, dzmax = step
        return Window(self.umax + du, self.zmin - dzmin, self.zmax + dzmax)

    def as_dict(self) -> dict:
        return {"umax": self.umax, "zmin": self.zmin, "zmax": self.zmax}


def truncate(q: BiLaurent, w: Window) -> BiLaurent:
    return BiLaurent._raw({m: c for m, c in q.items() if w.contains(*m)}, q.chart)


# matrices -----------------------------------------------------------------

class MatrixBL:
    """Small dense matrix of :class:`BiLaurent` entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        rows = [tuple(_as_poly(e) for e in row) for row in entries]
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix")
        self.entries = tuple(rows)
        self.rows = len(rows)
        self.cols = width

    @classmethod
    def identity(cls, n: int) -> "MatrixBL":
        return cls([[1 if r == c else 0 for c in range(n)] for r in range(n)])

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r][c]

    def __eq__(self, other):
        if not isinstance(other, MatrixBL):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in row) for row in self.entries)
        return f"MatrixBL([{body}])"

    def __add__(self, other: "MatrixBL") -> "MatrixBL":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return MatrixBL([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def scale(self, c) -> "MatrixBL":
        return MatrixBL([[e * c for e in row] for row in self.entries])

    def __matmul__(self, other: "MatrixBL") -> "MatrixBL":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for r in range(self.rows):
            row = []
            for c in range(other.cols):
                acc = BiLaurent.zero()
                for k in range(self.cols):
                    a, b = self.entries[r][k], other.entries[k][c]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MatrixBL(out)

    def apply(self, vec: Sequence[BiLaurent]) -> tuple[BiLaurent, ...]:
        if len(vec) != self.cols:
            raise ValueError("vector length does not match matrix")
        out = []
        for row in self.entries:
            acc = BiLaurent.zero()
            for a, b in zip(row, vec):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return tuple(out)

    def transpose(self) -> "MatrixBL":
        return MatrixBL([[self.entries[r][c] for r in range(self.rows)] for c in range(self.cols)])

    def minor(self, r: int, c: int) -> "MatrixBL":
        return MatrixBL([[e for k, e in enumerate(row) if k != c]
                         for i, row in enumerate(self.entries) if i != r])

    def det(self) -> BiLaurent:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        if self.rows == 1:
            return self.entries[0][0]
        if self.rows == 2:
            (a, b), (c, d) = self.entries
            return a * d - b * c
        acc = BiLaurent.zero()
        for c, e in enumerate(self.entries[0]):
            if e:
                term = e * self.minor(0, c).det()
                acc = acc + term if c % 2 == 0 else acc - term
        return acc

    def inverse_unimodular(self) -> "MatrixBL":
        """Inverse of a square matrix whose determinant is exactly 1 (the adjugate)."""
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        if self.det() != BiLaurent.constant(1):
            raise ValueError("matrix determinant is not identically 1")
        n = self.rows
        if n == 1:
            return MatrixBL([[1]])
        if n == 2:
            (a, b), (c, d) = self.entries
            return MatrixBL([[d, -b], [-c, a]])
        adj = [[None] * n for _ in range(n)]
        for r in range(n):
            for c in range(n):
                cof = self.minor(r, c).det()
                adj[c][r] = cof if (r + c) % 2 == 0 else -cof
        return MatrixBL(adj)

    def is_upper_triangular(self) -> bool:
        return all(not self.entries[r][c] for r in range(self.rows) for c in range(min(r, self.cols)))


def _as_poly(e) -> BiLaurent:
    if isinstance(e, BiLaurent):
        return e
    if isinstance(e, (int, Fraction)):
        return BiLaurent.constant(e) if e else BiLaurent.zero()
    if isinstance(e, str):
        return parse_polynomial(e)
    raise TypeError(f"cannot use {type(e).__name__} as a matrix entry")
