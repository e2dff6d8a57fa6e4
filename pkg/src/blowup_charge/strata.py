"""Survey of the invariant values met on the space of extension classes for fixed j."""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .algebra import BiLaurent
from .bundle import BundleV, ExtensionClass, canonical_support, make_bundle, random_class
from .invariants import InvariantReport, binom2, report

BUDGET_ENV = "BLOWUP_CHARGE_BUDGET"


def default_budget(j: int) -> int:
    env = os.environ.get(BUDGET_ENV)
    if env:
        return int(env)
    return 500 if j <= 3 else 2000


def candidate_stream(j: int, budget: int, seed: int = 0) -> Iterator[ExtensionClass]:
    """Zero class, unit monomials, two-term sums with signs, then seeded random classes."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    support = canonical_support(j)
    seen = set()

    def fresh():
        yield ExtensionClass(j, BiLaurent.zero())
        for m in support:
            yield ExtensionClass(j, BiLaurent({m: Fraction(1)}))
        for m1, m2 in itertools.combinations(support, 2):
            for s1, s2 in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                yield ExtensionClass(j, BiLaurent({m1: Fraction(s1), m2: Fraction(s2)}))
        if not support:
            return
        rng = random.Random(seed)
        misses = 0
        while misses < 1000:
            yield random_class(j, rng, max_terms=min(4, len(support)), min_terms=1)
            misses += 1

    n = 0
    for e in fresh():
        key = e.key()
        if key in seen:
            continue
        seen.add(key)
        yield e
        n += 1
        if n >= budget:
            return


def _survey_reports(j: int, budget: int, seed: int = 0) -> Iterator[tuple[ExtensionClass, InvariantReport]]:
    for e in candidate_stream(j, budget, seed):
        yield e, report(BundleV(e, make_bundle(j, e.p).T), strict=False)


def charge_box(j: int) -> range:
    return range(j, j * j + 1)


def box_cells(j: int) -> list[tuple[int, int]]:
    """(w, h) cells with j-1 <= h <= C(j,2) and 1 <= w <= C(j+1,2)."""
    return [(w, h) for h in range(j - 1, binom2(j) + 1) for w in range(1, binom2(j + 1) + 1)]


@dataclass
class StrataTable:
    j: int
    budget: int
    cells: dict = field(default_factory=dict)
    spectrum: dict = field(default_factory=dict)
    outside: dict = field(default_factory=dict)
    review: list = field(default_factory=list)
    examined: int = 0

    @property
    def missing_cells(self) -> list[tuple[int, int]]:
        return [c for c in box_cells(self.j) if self.cells.get(c) is None]

    @property
    def missing_charges(self) -> list[int]:
        return [k for k in charge_box(self.j) if self.spectrum.get(k) is None]

    def rows(self) -> list[tuple[int, int, int, str]]:
        """(w, h, charge, witness p or empty), box cells first then any outside cells."""
        out = []
        for w, h in box_cells(self.j) + sorted(self.outside):
            wit = self.cells.get((w, h)) or self.outside.get((w, h))
            out.append((w, h, w + h, "" if wit is None else str(wit.p)))
        return out


def strata_survey(j: int, budget: int | None = None, seed: int = 0) -> StrataTable:
    """Fill the (l(Q), l(R^1)) box and the charge spectrum with first witnesses."""
    if j < 1:
        raise ValueError("j must be at least 1")
    budget = default_budget(j) if budget is None else budget
    table = StrataTable(j, budget)
    table.cells = {c: None for c in box_cells(j)}
    table.spectrum = {k: None for k in charge_box(j)}
    top = (binom2(j + 1), binom2(j))
    for e, rep in _survey_reports(j, budget, seed):
        table.examined += 1
        cell = rep.cell
        if cell in table.cells:
            if table.cells[cell] is None:
                table.cells[cell] = e
        elif cell not in table.outside:
            table.outside[cell] = e
        if table.spectrum.get(rep.charge, 0) is None:
            table.spectrum[rep.charge] = e
        elif rep.charge not in table.spectrum:
            table.spectrum[rep.charge] = e
        if cell == top and not e.is_split:
            table.review.append(e)
    return table


def charge_spectrum(j: int, budget: int | None = None, seed: int = 0) -> dict:
    """charge -> first witness class (None when no witness was met within budget)."""
    return strata_survey(j, budget, seed).spectrum


def find_witness(j: int, lq: int, lr1: int, budget: int | None = None, seed: int = 0):
    budget = default_budget(j) if budget is None else budget
    for e, rep in _survey_reports(j, budget, seed):
        if rep.cell == (lq, lr1):
            return e
    return None


def verify_witness(e: ExtensionClass, cell: tuple[int, int]) -> bool:
    from .invariants import clear_cache
    clear_cache()
    return report(make_bundle(e.j, e.p), strict=False).cell == cell
