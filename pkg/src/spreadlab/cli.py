"""Command-line front end.

Subcommands cover constructions, verification, exhaustive searches and the
named scenario catalog.  Reports are JSON by default (sorted keys, no
timestamps, so identical flags give identical bytes) or CSV with
--format csv.  Exit codes: 0 all expectations met, 1 an expectation
failed (report carries a witness), 2 usage or input error.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import backend, fieldreduction, gf, scenarios, spreads, spreadsets, sperner
from .closure import closure as closure_fixpoint
from .closure import point_codes, restricted_closure, subplane_trial
from .errors import BudgetExceededError, DomainError
from .projgeom import standard_element

SCHEMA = "spreadlab/1"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        seq = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_jsonable(v) for v in seq]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def _flatten(prefix: str, x, rows: list) -> None:
    if isinstance(x, dict):
        for k in sorted(x):
            _flatten(f"{prefix}.{k}" if prefix else str(k), x[k], rows)
    elif isinstance(x, list):
        for i, v in enumerate(x):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, x))


def _emit(report: dict, fmt: str, out_dir, stem: str) -> None:
    report = dict(report)
    report["schema"] = SCHEMA
    report = _jsonable(report)
    if fmt == "csv":
        rows = []
        _flatten("", report, rows)
        text = "key,value\n" + "".join(f"{k},{v}\n" for k, v in rows)
    else:
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, f"{stem}.{fmt}")
        with open(path, "w") as fh:
            fh.write(text)


def _int_list(text: str) -> list:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise DomainError(f"expected a comma-separated integer list: {text!r}") from exc


def _resolve_set(name, q: int, n: int) -> spreadsets.SpreadSet:
    name = name or "field"
    if name == "field":
        return spreadsets.field_spread_set(q, n)
    if name == "dickson":
        return spreadsets.spread_set_from_quasifield(spreadsets.dickson_nearfield(q, n))
    raise DomainError(f"unknown spread set name: {name!r} (expected field or dickson)")


def _build_spread(args) -> spreads.Spread:
    kind = args.kind or getattr(args, "kind_pos", None) or "desarguesian"
    kind = {"s3": "sr", "u3": "ur"}.get(kind, kind)
    q, n = args.q, args.n
    r = args.r
    if kind == "desarguesian":
        return fieldreduction.desarguesian_spread(r or 3, n, q)
    if kind == "sr":
        return spreads.construct_S_r(_resolve_set(args.set, q, n), r or 3)
    if kind == "t3":
        M = _resolve_set(args.set, q, n)
        M0 = _resolve_set(args.set0 or "dickson", q, n)
        return spreads.construct_T_3(M, M0)
    if kind == "ur":
        r = r or 3
        M = _resolve_set(args.set, q, n)
        blocks = (args.blocks or ",".join(["dickson"] * (r - 1))).split(",")
        if len(blocks) != r - 1:
            raise DomainError(f"--blocks needs {r - 1} names for r={r}")
        return spreads.construct_U_r(M, [_resolve_set(b.strip(), q, n) for b in blocks])
    raise DomainError(f"unknown spread kind: {kind!r}")


# ---------------------------------------------------------------- handlers

def cmd_field_info(args):
    f = gf.gf_of_order(args.q)
    report = {
        "command": "field info",
        "q": f.order,
        "p": f.p,
        "degree": f.d,
        "modulus": list(f.modulus),
        "modulus_str": gf.poly_str(f.modulus),
        "generator": int(f.generator),
        "has_tables": bool(f.has_tables),
    }
    return report, False


def cmd_spread_build(args):
    S = _build_spread(args)
    report = spreads.spread_report(S)
    report["command"] = "spread build"
    return report, not report["valid"]


def cmd_spread_verify(args):
    S = _build_spread(args)
    ok, witness = spreads.validate_spread(S)
    report = {
        "command": "spread verify",
        "provenance": S.provenance,
        "size": len(S),
        "valid": ok,
    }
    if not ok:
        report["witness"] = witness
    return report, not ok


def cmd_spread_normals(args):
    S = _build_spread(args)
    ok, witness = spreads.validate_spread(S)
    if not ok:
        return {"command": "spread normals", "valid": False,
                "witness": witness}, True
    idx = spreads.normal_indices(S)
    report = {
        "command": "spread normals",
        "provenance": S.provenance,
        "size": len(S),
        "valid": True,
        "normal_count": len(idx),
        "normal_indices": idx,
    }
    return report, False


def cmd_spread_maxgp(args):
    S = _build_spread(args)
    ok, witness = spreads.validate_spread(S)
    if not ok:
        return {"command": "spread maxgp", "valid": False,
                "witness": witness}, True
    k, sub = spreads.max_normal_general_position(S)
    report = {
        "command": "spread maxgp",
        "provenance": S.provenance,
        "valid": True,
        "max_general_position": k,
        "witness_indices": sub,
    }
    return report, False


def cmd_spreadset_search(args):
    found = spreadsets.search_closed_spread_sets(
        args.n, args.q, args.closure, budget=args.budget or spreadsets._SEARCH_BUDGET)
    report = {
        "command": "spreadset search",
        "q": args.q,
        "n": args.n,
        "closure": args.closure,
        "count": len(found),
        "sets": [M.code_list for M in found],
    }
    return report, False


def cmd_spreadset_dickson(args):
    Q = spreadsets.dickson_nearfield(args.q, args.n)
    axioms = spreadsets.check_quasifield_axioms(Q)
    M = spreadsets.spread_set_from_quasifield(Q)
    report = {
        "command": "spreadset dickson",
        "q": args.q,
        "n": args.n,
        "order": Q.order,
        "axioms_pass": axioms["pass"],
        "associative": axioms["extras"]["multiplicative_associative"]["pass"],
        "kernel_size": len(spreadsets.kernel_of(Q)),
        "multiplication_closed": spreadsets.is_nearfield_set(M),
        "addition_closed": spreadsets.is_semifield_set(M),
        "codes": M.code_list,
    }
    return report, not axioms["pass"]


def cmd_spreadset_nuclei(args):
    M = _resolve_set(args.set, args.q, args.n)
    report = {
        "command": "spreadset nuclei",
        "q": args.q,
        "n": args.n,
        "set": args.set or "field",
        "right_nucleus": [spreadsets.mat_code(args.q, x)
                          for x in spreadsets.right_nucleus(M)],
        "middle_nucleus": [spreadsets.mat_code(args.q, x)
                           for x in spreadsets.middle_nucleus(M)],
        "center": [spreadsets.mat_code(args.q, x)
                   for x in spreadsets.center(M)],
    }
    return report, False


def cmd_spreadset_axioms(args):
    M = _resolve_set(args.set, args.q, args.n)
    Q = spreadsets.quasifield_from_spread_set(M)
    report = spreadsets.check_quasifield_axioms(Q)
    report["command"] = "spreadset axioms"
    report["set"] = args.set or "field"
    return report, not report["pass"]


def cmd_regulus(args):
    q0 = args.q0
    if q0 is None:
        raise DomainError("regulus needs --q0")
    M = _resolve_set(args.set, args.q, args.n)
    r = args.r or 2
    S = spreads.construct_S_r(M, r)
    if args.element is not None:
        E = S.elements[args.element]
    else:
        E = standard_element(S.field, r, S.n, r - 1)
    closed = spreads.regulus_closure_at(S, E, q0)
    report = {
        "command": "regulus",
        "q": args.q,
        "n": args.n,
        "r": r,
        "q0": q0,
        "set": args.set or "field",
        "element": S.index_of(E),
        "closed": closed,
    }
    if not closed:
        report["witness"] = scenarios._regulus_violation(S, E, q0)
    return report, not closed


def cmd_closure_run(args):
    f = gf.gf_of_order(args.q)
    q = args.q
    if not args.points:
        raise DomainError("closure run needs --points")
    pts = [(c // (q * q), (c // q) % q, c % q) for c in _int_list(args.points)]
    if args.pivots:
        pivots = [(c // (q * q), (c // q) % q, c % q)
                  for c in _int_list(args.pivots)]
        got = restricted_closure(f, pts, pivots)
        mode = "restricted"
    else:
        got = closure_fixpoint(f, pts)
        mode = "full"
    codes = sorted(point_codes(f, got))
    report = {
        "command": "closure run",
        "q": q,
        "mode": mode,
        "size": len(codes),
        "points": codes,
    }
    return report, False


def cmd_closure_lemma53(args):
    import random

    q = args.q
    trials = args.trials
    rng = random.Random(args.seed)
    failures = []
    for t in range(trials):
        res = subplane_trial(q, rng)
        if not res["pass"]:
            failures.append({"trial": t, "frame": res["frame"],
                             "restricted": res["restricted_affine_points"],
                             "closure": res["closure_affine_points"]})
    report = {
        "command": "closure lemma53",
        "q": q,
        "trials": trials,
        "seed": args.seed,
        "expected_affine_points": gf.factor_prime_power(q)[0] ** 2,
        "failures": failures[:5],
        "failure_count": len(failures),
        "pass": not failures,
    }
    return report, bool(failures)


def cmd_sperner_build(args):
    S = _build_spread(args)
    T = sperner.build_sperner(S)
    report = sperner.validate_design(T)
    report["command"] = "sperner build"
    report["provenance"] = S.provenance
    return report, not report["pass"]


def cmd_sperner_normals(args):
    S = _build_spread(args)
    T = sperner.build_sperner(S)
    rows = sperner.normal_line_scan(T, oracle=args.oracle, threads=args.threads)
    report = {
        "command": "sperner normals",
        "provenance": S.provenance,
        "oracle": bool(args.oracle),
        "classes": len(rows),
        "normal_count": sum(1 for r in rows if r["normal"]),
        "lines": rows,
    }
    return report, False


def cmd_sperner_export(args):
    S = _build_spread(args)
    T = sperner.build_sperner(S)
    text = sperner.export_design_csv(T)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "sperner_design.csv")
        with open(path, "w") as fh:
            fh.write(text)
        report = {
            "command": "sperner export",
            "provenance": S.provenance,
            "path": path,
            "bytes": len(text.encode()),
            "rows": text.count("\n"),
        }
        return report, False
    sys.stdout.write(text)
    return None, False


def cmd_scenario_list(args):
    return {"command": "scenario list",
            "scenarios": scenarios.list_scenarios()}, False


def cmd_scenario_run(args):
    params = {}
    for key in ("q", "n", "r", "q0", "budget", "trials", "samples"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    params["seed"] = args.seed
    if args.oracle:
        params["oracle"] = True
    report = scenarios.run_scenario(args.name, params)
    return report, not report["pass"]


# ----------------------------------------------------------------- parser

def _add_common(sp, *, q=None, n=None):
    sp.add_argument("--q", type=int, default=q, help="field order")
    sp.add_argument("--n", type=int, default=n, help="matrix rank over the field")
    sp.add_argument("--r", type=int, default=None, help="number of blocks")
    sp.add_argument("--q0", type=int, default=None, help="subfield order")
    sp.add_argument("--threads", type=int, default=None, help="worker threads")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    sp.add_argument("--oracle", action="store_true",
                    help="use the unoptimized normal-line scan")
    sp.add_argument("--budget", type=int, default=None, help="search work budget")
    sp.add_argument("--out", default=None, help="directory for file outputs")


def _add_build_flags(sp):
    sp.add_argument("kind_pos", nargs="?", default=None, metavar="KIND",
                    help="spread kind (positional alias for --kind)")
    sp.add_argument("--kind", default=None,
                    choices=("desarguesian", "sr", "s3", "t3", "ur", "u3"))
    sp.add_argument("--set", default=None, help="core spread set: field or dickson")
    sp.add_argument("--set0", default=None, help="second set for t3")
    sp.add_argument("--blocks", default=None,
                    help="comma-separated block sets for ur")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spreadlab",
        description="exact spread, quasifield and translation-structure toolkit")
    subs = ap.add_subparsers(dest="group", required=True)

    g = subs.add_parser("field", help="finite field reports")
    gs = g.add_subparsers(dest="action", required=True)
    sp = gs.add_parser("info", help="field structure report")
    _add_common(sp, q=9)
    sp.set_defaults(func=cmd_field_info)

    g = subs.add_parser("spread", help="spread construction and verification")
    gs = g.add_subparsers(dest="action", required=True)
    for name, fn in (("build", cmd_spread_build), ("verify", cmd_spread_verify),
                     ("normals", cmd_spread_normals), ("maxgp", cmd_spread_maxgp)):
        sp = gs.add_parser(name)
        _add_build_flags(sp)
        _add_common(sp, q=3, n=2)
        sp.set_defaults(func=fn)

    g = subs.add_parser("spreadset", help="spread set search and reports")
    gs = g.add_subparsers(dest="action", required=True)
    sp = gs.add_parser("search")
    sp.add_argument("--closure", required=True,
                    choices=("multiplication", "addition"))
    _add_common(sp, q=3, n=2)
    sp.set_defaults(func=cmd_spreadset_search)
    sp = gs.add_parser("dickson")
    _add_common(sp, q=3, n=2)
    sp.set_defaults(func=cmd_spreadset_dickson)
    for name, fn in (("nuclei", cmd_spreadset_nuclei),
                     ("axioms", cmd_spreadset_axioms)):
        sp = gs.add_parser(name)
        sp.add_argument("--set", default=None, help="field or dickson")
        _add_common(sp, q=3, n=2)
        sp.set_defaults(func=fn)

    sp = subs.add_parser("regulus", help="regulus closure at a spread element")
    sp.add_argument("--set", default=None, help="field or dickson")
    sp.add_argument("--element", type=int, default=None,
                    help="spread element index (default: the shears element)")
    _add_common(sp, q=3, n=2)
    sp.set_defaults(func=cmd_regulus, action=None)

    g = subs.add_parser("closure", help="closure of point sets in a plane")
    gs = g.add_subparsers(dest="action", required=True)
    sp = gs.add_parser("run")
    sp.add_argument("--points", default=None, help="comma-separated point codes")
    sp.add_argument("--pivots", default=None,
                    help="restrict new lines to these pivot codes")
    _add_common(sp, q=9)
    sp.set_defaults(func=cmd_closure_run)
    sp = gs.add_parser("lemma53")
    sp.add_argument("--trials", type=int, default=100)
    _add_common(sp, q=9)
    sp.set_defaults(func=cmd_closure_lemma53)

    g = subs.add_parser("sperner", help="affine translation design over a spread")
    gs = g.add_subparsers(dest="action", required=True)
    for name, fn in (("build", cmd_sperner_build),
                     ("normals", cmd_sperner_normals),
                     ("export", cmd_sperner_export)):
        sp = gs.add_parser(name)
        _add_build_flags(sp)
        _add_common(sp, q=3, n=2)
        sp.set_defaults(func=fn)

    g = subs.add_parser("scenario", help="named verification scenarios")
    gs = g.add_subparsers(dest="action", required=True)
    sp = gs.add_parser("list")
    _add_common(sp)
    sp.set_defaults(func=cmd_scenario_list)
    sp = gs.add_parser("run")
    sp.add_argument("name", help="scenario tag, see scenario list")
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--samples", type=int, default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_scenario_run)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.threads is not None:
        backend.set_threads(args.threads)
    stem = f"{args.group}_{args.action}" if args.action else args.group
    try:
        report, failed = args.func(args)
    except BudgetExceededError as exc:
        _emit({"command": stem, "error": "budget exceeded", "detail": str(exc)},
              args.format, args.out, stem)
        return 1
    except DomainError as exc:
        sys.stderr.write(json.dumps(
            {"schema": SCHEMA, "error": str(exc)}, sort_keys=True) + "\n")
        return 2
    if report is not None:
        _emit(report, args.format, args.out, stem)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
