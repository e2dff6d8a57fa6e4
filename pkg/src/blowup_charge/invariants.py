"""Closed formulas for the numerical invariants and the cross-check report."""

from __future__ import annotations

import threading
from dataclasses import asdict, dataclass, field

from .bundle import SPLIT, BundleV, u_multiplicity
from .cech import moduli_result, r1_result
from .dirimg import lq_result
from .errors import CrossCheckMismatch, DomainError


def binom2(a: int) -> int:
    return a * (a - 1) // 2 if a >= 2 else 0


def r1_formula(j: int, m) -> int:
    """C(j,2) - C(j-m,2); a split class counts as the plateau C(j,2)."""
    if j < 0:
        raise DomainError("splitting type must be non-negative")
    if m == SPLIT:
        return binom2(j)
    return binom2(j) - binom2(j - m)


def moduli_dim_formula(j: int, m: int) -> int:
    """m(2j - (m+1)/2), defined for 1 <= m <= 2j-2."""
    if m == SPLIT or not 1 <= m <= 2 * j - 2:
        raise DomainError(f"u-multiplicity {m!r} outside 1..{2 * j - 2} for j={j}")
    return 2 * j * m - m * (m + 1) // 2


FATAL = "fatal"
CLAIMED = "paper-claimed"


@dataclass(frozen=True)
class Verdict:
    name: str
    ok: bool
    severity: str
    detail: str


def bounds_check(j: int, lR1: int, lQ: int, c: int) -> dict[str, Verdict]:
    """Pass/fail per bound.  The l(Q) >= 1 lower bound is reported, never fatal."""
    out = {}

    def put(name, ok, detail, severity=FATAL):
        out[name] = Verdict(name, bool(ok), severity, detail)

    put("charge_lower", c >= j, f"{j} <= c={c}")
    put("charge_upper", c <= j * j, f"c={c} <= {j * j}")
    put("lR1_lower", lR1 >= max(j - 1, 0), f"{max(j - 1, 0)} <= lR1={lR1}")
    put("lR1_upper", lR1 <= binom2(j), f"lR1={lR1} <= {binom2(j)}")
    put("lQ_upper", lQ <= j * (j + 1) // 2, f"lQ={lQ} <= {j * (j + 1) // 2}")
    lo = 1 if j > 0 else 0
    put("lQ_lower", lQ >= lo, f"{lo} <= lQ={lQ}", CLAIMED)
    put("charge_identity", c == lR1 + lQ, f"c={c} = lR1 + lQ = {lR1 + lQ}")
    return out


@dataclass
class InvariantReport:
    j: int
    p: str
    m: object
    lR1_formula: int
    lR1_oracle: int
    lQ_oracle: int
    charge: int
    h1End_formula: int | None
    h1End_oracle: int
    bounds: dict = field(default_factory=dict)
    stabilized: bool = True
    windows: dict = field(default_factory=dict)
    degree_cap: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def bounds_ok(self) -> bool:
        return all(v.ok for v in self.bounds.values() if v.severity == FATAL)

    @property
    def cell(self) -> tuple[int, int]:
        return (self.lQ_oracle, self.lR1_oracle)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["bounds"] = {k: asdict(v) for k, v in self.bounds.items()}
        return d


_cache: dict = {}
_lock = threading.Lock()


def _compute(b: BundleV, window=None, degree_cap=None) -> InvariantReport:
    j = b.j
    m = u_multiplicity(b.p)
    r1 = r1_result(b, window)
    mod = moduli_result(b, window)
    lq = lq_result(b, degree_cap)
    charge = r1.dim + lq.length
    h_formula = None
    if m != SPLIT:
        h_formula = moduli_dim_formula(j, m)
    rep = InvariantReport(
        j=j, p=str(b.p), m=m,
        lR1_formula=r1_formula(j, m), lR1_oracle=r1.dim,
        lQ_oracle=lq.length, charge=charge,
        h1End_formula=h_formula, h1End_oracle=mod.dim,
        bounds=bounds_check(j, r1.dim, lq.length, charge),
        stabilized=r1.stabilized and mod.stabilized,
        windows={"lR1": r1.window.as_dict(), "h1End": mod.window.as_dict()},
        degree_cap=lq.degree_cap,
    )
    if rep.lR1_formula != rep.lR1_oracle:
        rep.mismatches.append(("lR1", rep.lR1_formula, rep.lR1_oracle))
    if h_formula is not None and h_formula != rep.h1End_oracle:
        rep.mismatches.append(("h1End", h_formula, rep.h1End_oracle))
    for v in rep.bounds.values():
        if not v.ok and v.severity == FATAL:
            rep.mismatches.append((v.name, v.detail, "violated"))
    return rep


def report(b: BundleV, strict: bool = True, window=None, degree_cap=None) -> InvariantReport:
    """Run every oracle and formula for ``b``.

    With ``strict`` a formula/oracle disagreement or a fatal bound failure
    raises CrossCheckMismatch carrying the filled report.
    """
    key = (b.ext.key(), window, degree_cap)
    with _lock:
        rep = _cache.get(key)
    if rep is None:
        rep = _compute(b, window, degree_cap)
        with _lock:
            _cache.setdefault(key, rep)
    if strict and rep.mismatches:
        what, expected, observed = rep.mismatches[0]
        raise CrossCheckMismatch(f"{what} for {b}", expected, observed, report=rep)
    return rep


def clear_cache() -> None:
    with _lock:
        _cache.clear()
