"""Command line interface.

Exit codes: 0 ok, 1 usage or parse error, 2 cross-check mismatch,
3 a computation did not stabilize.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys

from .algebra import Window
from .bundle import SPLIT, iter_monomial_classes, make_bundle, random_class
from .errors import BlowupChargeError, CrossCheckMismatch, NonStabilized
from .invariants import FATAL, InvariantReport, report
from .strata import BUDGET_ENV, default_budget, find_witness, strata_survey

SCHEMA_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_UNSTABLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def report_json(rep: InvariantReport) -> dict:
    m = rep.m if rep.m != SPLIT else "SPLIT"
    return {
        "schema_version": SCHEMA_VERSION,
        "input": {"j": rep.j, "p": rep.p},
        "invariants": {
            "m": m,
            "lR1": {"formula": rep.lR1_formula, "oracle": rep.lR1_oracle},
            "lQ": rep.lQ_oracle,
            "charge": rep.charge,
            "h1End": {"formula": rep.h1End_formula, "oracle": rep.h1End_oracle},
        },
        "bounds": {k: {"ok": v.ok, "severity": v.severity, "detail": v.detail}
                   for k, v in rep.bounds.items()},
        "stabilization": {"windows": rep.windows, "degree_cap": rep.degree_cap,
                          "stabilized": rep.stabilized},
        "mismatches": [list(map(str, mm)) for mm in rep.mismatches],
    }


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def report_table(rep: InvariantReport) -> str:
    rows = [
        ("j", rep.j), ("p", rep.p), ("m", rep.m),
        ("l(R1) formula", rep.lR1_formula), ("l(R1) oracle", rep.lR1_oracle),
        ("l(Q)", rep.lQ_oracle), ("charge", rep.charge),
        ("h1(End) formula", "-" if rep.h1End_formula is None else rep.h1End_formula),
        ("h1(End) oracle", rep.h1End_oracle),
    ]
    for v in rep.bounds.values():
        tag = "ok" if v.ok else ("FAIL" if v.severity == FATAL else "fail (paper-claimed)")
        rows.append((f"bound {v.name}", f"{tag}  {v.detail}"))
    for what, exp, obs in rep.mismatches:
        rows.append(("MISMATCH", f"{what}: expected {exp}, observed {obs}"))
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def _window(args) -> Window | None:
    given = [args.umax, args.zmin, args.zmax]
    if all(v is None for v in given):
        return None
    if any(v is None for v in given):
        raise UsageError("--umax, --zmin and --zmax must be given together")
    if args.umax < 0 or args.zmin > args.zmax:
        raise UsageError("window needs umax >= 0 and zmin <= zmax")
    return Window(args.umax, args.zmin, args.zmax)


def _degree_cap(args) -> int | None:
    if args.degree_cap is not None and args.degree_cap < 1:
        raise UsageError("--degree-cap must be positive")
    return args.degree_cap


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_batch(path: str) -> list[tuple[int, str]]:
    items = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if ";" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'j; p'")
            j, p = line.split(";", 1)
            try:
                items.append((int(j), p.strip()))
            except ValueError:
                raise UsageError(f"{path}:{lineno}: bad splitting type {j.strip()!r}") from None
    return items


def cmd_invariants(args) -> int:
    if args.batch:
        items = _read_batch(args.batch)
    else:
        if args.j is None or args.p is None:
            raise UsageError("invariants needs --j and --p, or --batch FILE")
        items = [(args.j, args.p)]
    window, cap = _window(args), _degree_cap(args)
    reps = [report(make_bundle(j, p), strict=False, window=window, degree_cap=cap)
            for j, p in items]
    if args.format == "json":
        docs = [report_json(r) for r in reps]
        text = dump_json(docs if args.batch else docs[0])
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "p", "m", "lR1_formula", "lR1", "lQ", "charge", "h1End_formula", "h1End"])
        for r in reps:
            w.writerow([r.j, r.p, r.m, r.lR1_formula, r.lR1_oracle, r.lQ_oracle, r.charge,
                        "" if r.h1End_formula is None else r.h1End_formula, r.h1End_oracle])
        text = buf.getvalue()
    else:
        text = "\n".join(report_table(r) for r in reps)
    _emit(text, args.out)
    return EXIT_MISMATCH if any(r.mismatches for r in reps) else EXIT_OK


def verify_classes(jmax: int, samples: int, seed: int):
    """Split class, every unit monomial, then ``samples`` seeded random classes per j."""
    for j in range(0, jmax + 1):
        yield make_bundle(j, "0")
        for e in iter_monomial_classes(j):
            yield make_bundle(j, e.p)
        if j >= 2:
            rng = random.Random(seed * 1009 + j)
            for _ in range(samples):
                e = random_class(j, rng)
                yield make_bundle(j, e.p)


def run_verify(jmax: int, samples: int, seed: int, window=None, cap=None) -> dict:
    checks = {name: {"pass": 0, "fail": 0, "failures": []}
              for name in ("lR1", "h1End", "bounds", "lQ_lower_claimed")}

    def tally(name, ok, item):
        c = checks[name]
        if ok:
            c["pass"] += 1
        else:
            c["fail"] += 1
            c["failures"].append(item)

    n = 0
    for b in verify_classes(jmax, samples, seed):
        n += 1
        r = report(b, strict=False, window=window, degree_cap=cap)
        tag = {"j": r.j, "p": r.p}
        tally("lR1", r.lR1_formula == r.lR1_oracle,
              dict(tag, formula=r.lR1_formula, oracle=r.lR1_oracle))
        if r.h1End_formula is not None:
            tally("h1End", r.h1End_formula == r.h1End_oracle,
                  dict(tag, formula=r.h1End_formula, oracle=r.h1End_oracle))
        tally("bounds", r.bounds_ok,
              dict(tag, failed=sorted(k for k, v in r.bounds.items() if not v.ok and v.severity == FATAL)))
        tally("lQ_lower_claimed", r.bounds["lQ_lower"].ok, dict(tag, lQ=r.lQ_oracle))
    fatal = sum(checks[k]["fail"] for k in ("lR1", "h1End", "bounds"))
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "input": {"jmax": jmax, "samples": samples, "seed": seed},
        "classes": n,
        "checks": checks,
        "summary": "all checks passed" if not fatal else f"{fatal} fatal mismatches",
    }


def cmd_verify(args) -> int:
    if args.jmax < 0 or args.samples < 0:
        raise UsageError("--jmax and --samples must be non-negative")
    res = run_verify(args.jmax, args.samples, args.seed, _window(args), _degree_cap(args))
    if args.format == "json":
        text = dump_json(res)
    else:
        lines = [f"classes checked: {res['classes']}"]
        for k, c in res["checks"].items():
            lines.append(f"{k:18s} pass {c['pass']:5d}  fail {c['fail']:5d}")
        lines.append(res["summary"])
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if res["summary"] == "all checks passed" else EXIT_MISMATCH


def _budget(args) -> int:
    budget = default_budget(args.j) if args.budget is None else args.budget
    if budget < 1:
        raise UsageError("--budget must be at least 1")
    return budget


def _check_j(args) -> None:
    if args.j is None or args.j < 1:
        raise UsageError("--j must be at least 1")


def strata_rows(table) -> list[list]:
    return [[w, h, c, p] for w, h, c, p in table.rows()]


def cmd_strata(args) -> int:
    _check_j(args)
    table = strata_survey(args.j, _budget(args), args.seed)
    if args.format == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["w", "h", "charge", "witness_p"])
        wr.writerows(strata_rows(table))
        text = buf.getvalue()
    elif args.format == "json":
        text = dump_json({
            "schema_version": SCHEMA_VERSION, "command": "strata",
            "input": {"j": args.j, "budget": table.budget, "seed": args.seed},
            "cells": [{"w": w, "h": h, "charge": c, "witness_p": p or None}
                      for w, h, c, p in table.rows()],
            "missing": [list(c) for c in table.missing_cells],
            "review": [str(e.p) for e in table.review],
            "examined": table.examined,
        })
    else:
        lines = [f"j={args.j}  candidates examined: {table.examined}", "  w   h  charge  witness"]
        for w, h, c, p in table.rows():
            lines.append(f"{w:3d} {h:3d} {c:7d}  {p if p else 'not found within budget'}")
        for e in table.review:
            lines.append(f"review: non-split class at the maximal cell: {e.p}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    _check_j(args)
    table = strata_survey(args.j, _budget(args), args.seed)
    spec = sorted(table.spectrum.items())
    if args.format == "json":
        text = dump_json({
            "schema_version": SCHEMA_VERSION, "command": "spectrum",
            "input": {"j": args.j, "budget": table.budget, "seed": args.seed},
            "spectrum": [{"charge": k, "witness_p": None if e is None else str(e.p)} for k, e in spec],
        })
    elif args.format == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["charge", "witness_p"])
        wr.writerows([[k, "" if e is None else str(e.p)] for k, e in spec])
        text = buf.getvalue()
    else:
        text = "".join(f"{k:4d}  {e.p if e is not None else 'not found within budget'}\n"
                       for k, e in spec)
    _emit(text, args.out)
    return EXIT_OK


def cmd_witness(args) -> int:
    _check_j(args)
    if args.lq is None or args.lr1 is None:
        raise UsageError("witness needs --lq and --lr1")
    e = find_witness(args.j, args.lq, args.lr1, _budget(args), args.seed)
    if args.format == "json":
        text = dump_json({"schema_version": SCHEMA_VERSION, "command": "witness",
                          "input": {"j": args.j, "lq": args.lq, "lr1": args.lr1},
                          "witness_p": None if e is None else str(e.p)})
    else:
        text = ("not found within budget" if e is None else f"p = {e.p}") + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    """Small fixed battery: split maxima and the worked example."""
    out = []
    ok = True
    for j in range(0, 4):
        r = report(make_bundle(j, "0"), strict=False)
        good = (r.lR1_oracle, r.lQ_oracle, r.charge) == (j * (j - 1) // 2, j * (j + 1) // 2, j * j)
        ok &= good
        out.append(f"{'pass' if good else 'FAIL'}  split j={j}: lR1={r.lR1_oracle} lQ={r.lQ_oracle} c={r.charge}")
    r = report(make_bundle(3, "z^2*u"), strict=False)
    good = r.charge == r.lR1_oracle + r.lQ_oracle and r.bounds_ok
    ok &= good
    out.append(f"{'pass' if good else 'FAIL'}  (3, z^2*u): lR1={r.lR1_oracle} lQ={r.lQ_oracle} c={r.charge}")
    _emit("\n".join(out) + "\n", args.out)
    return EXIT_OK if ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blowup-charge",
        description="Numerical invariants of rank-2 bundles V(j, p) on the blown-up plane.",
        epilog=("Polynomials use z, u, integer or p/q coefficients, '*', '^' and '+'/'-', "
                "e.g. \"z^2*u - 1/2*z^-1*u^3\".  Batch files hold one 'j; p' per line.  "
                f"The default survey budget can be set with {BUDGET_ENV}.  "
                "Exit codes: 0 ok, 1 usage/parse error, 2 cross-check mismatch, 3 not stabilized."),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("table", "json")):
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument("--seed", type=int, default=0)

    def overrides(p):
        p.add_argument("--umax", type=int, help="initial window: max u-degree")
        p.add_argument("--zmin", type=int, help="initial window: min z-exponent")
        p.add_argument("--zmax", type=int, help="initial window: max z-exponent")
        p.add_argument("--degree-cap", type=int, help="initial degree cap for the module computations")

    p = sub.add_parser("invariants", help="report for one bundle or a batch file")
    p.add_argument("--j", type=int)
    p.add_argument("--p", help="extension class polynomial")
    p.add_argument("--batch", help="file with one 'j; p' per line")
    common(p, ("json", "table", "csv"))
    overrides(p)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("verify", help="formula versus oracle sweep")
    p.add_argument("--jmax", type=int, default=3)
    p.add_argument("--samples", type=int, default=20, help="random classes per j")
    common(p, ("json", "table"))
    overrides(p)
    p.set_defaults(func=cmd_verify)

    for name, func, fmts in (("strata", cmd_strata, ("table", "csv", "json")),
                             ("spectrum", cmd_spectrum, ("table", "csv", "json"))):
        p = sub.add_parser(name, help=f"{name} survey over candidate classes")
        p.add_argument("--j", type=int, required=True)
        p.add_argument("--budget", type=int)
        common(p, fmts)
        p.set_defaults(func=func)

    p = sub.add_parser("witness", help="first candidate class with given (l(Q), l(R1))")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--lq", type=int, required=True)
    p.add_argument("--lr1", type=int, required=True)
    p.add_argument("--budget", type=int)
    common(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("selftest", help="quick fixed checks")
    p.add_argument("--out")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CrossCheckMismatch as e:
        print(f"cross-check mismatch: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    except NonStabilized as e:
        print(f"not stabilized: {e}", file=sys.stderr)
        return EXIT_UNSTABLE
    except BlowupChargeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
