"""Exact sparse linear algebra over Q.

Vectors are ``dict[int, coefficient]``.  Internally rows are scaled to
primitive integer vectors and eliminated fraction-free: ``r <- a*r - b*p``
followed by removal of the content, so no rational arithmetic happens in
the inner loop.  The pivot of a vector is its largest index, and pivots are
chosen deterministically in insertion order.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Hashable, Iterable, Mapping, Sequence


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def primitive(vec: Mapping[int, int | Fraction]) -> dict[int, int]:
    """Scale a rational vector to a primitive integer vector (same line)."""
    den = 1
    for c in vec.values():
        if isinstance(c, Fraction) and c.denominator != 1:
            den = _lcm(den, c.denominator)
    out = {}
    for k, c in vec.items():
        if c:
            out[k] = int(c * den) if den != 1 else int(c)
    g = 0
    for c in out.values():
        g = gcd(g, c)
        if g == 1:
            break
    if g > 1:
        out = {k: c // g for k, c in out.items()}
    return out


class Echelon:
    """Incrementally built echelon basis of a subspace of Q^N.

    With ``track=True`` each stored row also remembers the combination of
    inserted vectors that produced it, which is what :func:`kernel` uses.
    """

    __slots__ = ("_rows", "track")

    def __init__(self, track: bool = False):
        self._rows: dict[int, tuple[dict[int, int], dict[int, int] | None]] = {}
        self.track = track

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> set[int]:
        return set(self._rows)

    def _reduce(self, vec: dict[int, int], combo: dict[int, int] | None):
        rows = self._rows
        while vec:
            lead = max(vec)
            hit = rows.get(lead)
            if hit is None:
                break
            prow, pcombo = hit
            a = prow[lead]
            b = vec[lead]
            g = gcd(a, b)
            a //= g
            b //= g
            if a < 0:
                a, b = -a, -b
            # vec <- a*vec - b*prow
            if a != 1:
                vec = {k: a * c for k, c in vec.items()}
            for k, c in prow.items():
                s = vec.get(k, 0) - b * c
                if s:
                    vec[k] = s
                else:
                    vec.pop(k, None)
            if combo is not None:
                if a != 1:
                    combo = {k: a * c for k, c in combo.items()}
                for k, c in pcombo.items():
                    s = combo.get(k, 0) - b * c
                    if s:
                        combo[k] = s
                    else:
                        combo.pop(k, None)
            content = 0
            for c in vec.values():
                content = gcd(content, c)
                if content == 1:
                    break
            if combo is not None and content != 1:
                for c in combo.values():
                    content = gcd(content, c)
                    if content == 1:
                        break
            if content > 1:
                vec = {k: c // content for k, c in vec.items()}
                if combo is not None:
                    combo = {k: c // content for k, c in combo.items()}
        return vec, combo

    def reduce(self, vec: Mapping[int, int | Fraction]) -> dict[int, int]:
        """Residual of ``vec`` (up to a nonzero scalar) modulo the stored rows."""
        residual, _ = self._reduce(primitive(vec), None)
        return residual

    def contains(self, vec: Mapping[int, int | Fraction]) -> bool:
        return not self.reduce(vec)

    def add(self, vec: Mapping[int, int | Fraction], tag: int | None = None):
        """Insert ``vec``.  Returns None if it was independent, else the
        dependency found (a combination of tags, requires ``track``)."""
        if self.track:
            if tag is None:
                raise ValueError("tracked insertion needs a tag")
            # clear denominators without dividing by the content, so the
            # recorded combination stays an exact integer multiple
            den = 1
            for c in vec.values():
                if isinstance(c, Fraction) and c.denominator != 1:
                    den = _lcm(den, c.denominator)
            start = {k: int(c * den) for k, c in vec.items() if c}
            combo = {tag: den}
        else:
            start = primitive(vec)
            combo = None
        residual, combo = self._reduce(start, combo)
        if residual:
            self._rows[max(residual)] = (residual, combo)
            return None
        return combo if self.track else {}


def _normalized(combo: Mapping[int, int]) -> dict[int, Fraction]:
    lead = max(combo)
    c0 = combo[lead]
    return {k: Fraction(c, c0) for k, c in sorted(combo.items())}


def kernel(columns: Sequence[Mapping[int, int | Fraction]]) -> tuple[list[dict[int, Fraction]], set[int]]:
    """Kernel of the linear map sending basis vector ``j`` to ``columns[j]``.

    Returns ``(basis, pivots)``.  Each kernel vector is normalized so that its
    largest index carries coefficient 1; the vector found while processing
    column ``j`` involves only columns ``<= j``, so processing order is a
    filtration order.
    """
    ech = Echelon(track=True)
    basis = []
    for j, col in enumerate(columns):
        dep = ech.add(col, tag=j)
        if dep is not None:
            basis.append(_normalized(dep))
    return basis, ech.pivots


def rank(vectors: Iterable[Mapping[int, int | Fraction]]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return len(ech)


class Indexer:
    """Assigns consecutive integers to hashable keys (coordinates of a vector space)."""

    def __init__(self, keys: Iterable[Hashable] = ()):
        self.index: dict[Hashable, int] = {}
        self.keys: list[Hashable] = []
        for k in keys:
            self(k)

    def __call__(self, key: Hashable) -> int:
        i = self.index.get(key)
        if i is None:
            i = len(self.keys)
            self.index[key] = i
            self.keys.append(key)
        return i

    def __len__(self) -> int:
        return len(self.keys)

    def vector(self, mapping: Mapping[Hashable, int | Fraction]) -> dict[int, int | Fraction]:
        return {self(k): c for k, c in mapping.items() if c}
