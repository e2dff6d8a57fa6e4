from __future__ import annotations

from itertools import islice

import pytest

from blowup_charge.bundle import make_bundle
from blowup_charge.invariants import report
from blowup_charge.strata import (
    BUDGET_ENV, candidate_stream, charge_spectrum, default_budget, find_witness, box_cells,
    strata_survey, verify_witness,
)


def test_candidate_stream_starts_with_zero_and_monomials():
    got = [str(e.p) for e in candidate_stream(2, 4)]
    assert got == ["0", "u", "z*u", "z*u^2"]


def test_candidate_stream_j1_only_zero():
    assert [str(e.p) for e in candidate_stream(1, 50)] == ["0"]


def test_candidate_stream_deterministic_and_unique():
    a = [e.key() for e in candidate_stream(3, 60)]
    b = [e.key() for e in candidate_stream(3, 60)]
    assert a == b and len(a) == 60 and len(set(a)) == 60
    assert [e.key() for e in candidate_stream(3, 10)] == a[:10]


def test_candidate_stream_rejects_zero_budget():
    with pytest.raises(ValueError):
        list(candidate_stream(2, 0))


def test_default_budget(monkeypatch):
    monkeypatch.delenv(BUDGET_ENV, raising=False)
    assert default_budget(3) == 500 and default_budget(4) == 2000
    monkeypatch.setenv(BUDGET_ENV, "17")
    assert default_budget(2) == 17


def test_spectrum_j1():
    spec = charge_spectrum(1)
    assert list(spec) == [1] and str(spec[1].p) == "0"


def test_j2_survey():
    t = strata_survey(2)
    assert box_cells(2) == [(1, 1), (2, 1), (3, 1)]
    assert t.missing_cells == [] and t.missing_charges == []
    assert str(t.cells[(3, 1)].p) == "0"
    assert t.review == []
    for cell, e in t.cells.items():
        assert verify_witness(e, cell)
    for k, e in t.spectrum.items():
        r = report(make_bundle(2, e.p), strict=False)
        assert r.charge == k == r.lQ_oracle + r.lR1_oracle


def test_find_witness():
    assert str(find_witness(2, 3, 1).p) == "0"
    assert find_witness(2, 5, 1, budget=20) is None


def test_rows_layout():
    t = strata_survey(2, budget=4)
    assert [r[:3] for r in t.rows()] == [(1, 1, 2), (2, 1, 3), (3, 1, 4)]
