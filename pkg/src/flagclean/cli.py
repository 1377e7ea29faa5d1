"""Command-line interface.

Exit codes: 0 success, 1 parse/validation error, 2 precondition failure
(window too small, missing parameter, disconnected charts), 3 semantic
negative (not clean, oracle disagreement, failed check).
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import atlas, cleanness, lattice, loopgroup
from .builtin import builtin_sl2
from .errors import (Disconnected, MissingParameter, ModelFileError,
                     NonUnitDeterminant, WindowTooSmall)
from .modelfile import dump_model, load_model
from .symcore import as_rational, format_rational, monomial_str

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_NEGATIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _model(args):
    return load_model(args.model) if args.model else builtin_sl2()


def _assignment(pairs):
    out = {}
    for item in pairs or []:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise UsageError(f"expected NAME=RATIONAL, got {item!r}")
        try:
            out[name] = as_rational(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from None
    return out


def _rationals(text):
    try:
        return [as_rational(v) for v in text.split(",") if v.strip()]
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _pair_name(i, j):
    return f"Psi_{i}{j}" if len(str(i)) == 1 and len(str(j)) == 1 else f"Psi_{i},{j}"


# Each command returns (report dict, human text, exit code).

def cmd_derive(args):
    crit = cleanness.criterion(_model(args))
    report = crit.to_dict()
    lines = []
    for entry in report["forms"]:
        line = entry["form"]
        if args.witnesses:
            wit = ", ".join(f"chart {w['chart']}: {w['coordinate']}" for w in entry["witnesses"])
            line += f"    [{wit}]"
        lines.append(line)
    return report, "\n".join(lines), EXIT_OK


def cmd_check(args):
    model = _model(args)
    verdict = cleanness.evaluate_clean(model, _assignment(args.set))
    report = verdict.to_dict()
    bad = {v["form"] for v in report["violated"]}
    lines = ["CLEAN" if verdict.clean else "NOT CLEAN"]
    for v in report["values"]:
        flag = "   <- integral" if v["form"] in bad else ""
        lines.append(f"  {v['form']} = {v['value']}{flag}")
    return report, "\n".join(lines), EXIT_OK if verdict.clean else EXIT_NEGATIVE


def cmd_transitions(args):
    model = _model(args)
    ids = model.chart_ids
    entries = []
    lines = []
    for a, i in enumerate(ids):
        for j in ids[a + 1:]:
            tr = atlas.transition(model, i, j)
            text = tr.format(model.chart(j).base_coords, model.fiber.names)
            entries.append({"target": str(i), "source": str(j), "map": text,
                            "base_exponents": [list(r) for r in tr.base.exponents],
                            "base_coefficients": [format_rational(c) for c in tr.base.coeffs],
                            "fiber_twists": [list(r) for r in tr.fiber_twists],
                            "fiber_units": [format_rational(u) for u in tr.fiber_units]})
            lines.append(f"{_pair_name(i, j)}: {text}")
    return {"transitions": entries}, "\n".join(lines), EXIT_OK


def cmd_linebundle(args):
    model = _model(args)
    rep = atlas.check_linebundle(model)
    report = rep.to_dict()
    lines = []
    for e in rep.entries:
        i, j = e.pair
        names = model.chart(i).base_coords
        mono = monomial_str(1, e.derived, names)
        line = f"t_{i}{j}^(-1) = {mono} (up to a constant)"
        if e.declared is not None:
            line += f"; declared {monomial_str(1, e.declared, names)}"
        if e.twist_actual is not None:
            line += f"; central twist {list(e.twist_actual)} expected {list(e.twist_expected)}"
        lines.append(line + ("  ok" if e.ok else "  MISMATCH"))
    lines.append("line bundle: " + ("consistent" if rep.ok else "INCONSISTENT"))
    return report, "\n".join(lines), EXIT_OK if rep.ok else EXIT_NEGATIVE


def cmd_oracle_simple(args):
    mu = _rationals(args.mu)
    simple = lattice.is_simple(mu, args.window)
    clean = lattice.is_clean_oracle(mu, args.window)
    report = {"mu": [format_rational(m) for m in mu], "window": args.window,
              "simple": simple, "clean": clean}
    text = f"simple: {str(simple).lower()}\nclean: {str(clean).lower()}"
    return report, text, EXIT_OK


def cmd_oracle_clean(args):
    model = _model(args)
    res = lattice.oracle_vs_criterion(model, _assignment(args.set), args.window)
    report = res.to_dict()
    lines = [f"chart {c['chart']}: exponents ({', '.join(c['exponents'])}) -> "
             f"{'clean' if c['clean'] else 'not clean'}" for c in report["charts"]]
    lines.append(f"oracle: {'CLEAN' if res.oracle_clean else 'NOT CLEAN'}; "
                 f"criterion: {'CLEAN' if res.criterion_clean else 'NOT CLEAN'}; "
                 f"{'agree' if res.agree else 'DISAGREE'}")
    code = EXIT_OK if res.agree and res.criterion_clean else EXIT_NEGATIVE
    return report, "\n".join(lines), code


def cmd_oracle_grid(args):
    model = _model(args)
    start = time.perf_counter()
    res = lattice.oracle_grid(model, args.denominator_bound, as_rational(args.range),
                              args.samples, args.window, args.seed)
    report = res.to_dict()
    lines = [f"cases: {res.cases} of {res.total_grid} grid points (clean: {res.clean_cases})",
             f"agreement {report['agreement_percent']}%"]
    for d in report["disagreements"][:10]:
        lines.append("  disagreement at " + ", ".join(f"{k}={v}" for k, v in d.items()))
    if not args.json:
        lines.append(f"elapsed {time.perf_counter() - start:.1f}s")
    return report, "\n".join(lines), EXIT_OK if res.ok else EXIT_NEGATIVE


def cmd_verify(args):
    model = _model(args)
    coc = atlas.verify_cocycles(model)
    lb = atlas.check_linebundle(model)
    fx = loopgroup.verify_fixtures(model.fixtures, args.precision)
    ok = coc.ok and lb.ok and fx.ok
    report = {"ok": ok, "cocycles": coc.to_dict(), "linebundle": lb.to_dict(), "fixtures": fx.to_dict()}
    lines = [f"cocycles: {len(coc.checked)} checked, {len(coc.failures)} failed"]
    lines += [f"  FAIL {f.detail}" for f in coc.failures]
    lines.append(f"line bundle: {len(lb.entries)} pairs, {len(lb.mismatches)} mismatched")
    lines += [f"  FAIL pair {e.pair}" for e in lb.mismatches]
    lines.append(f"loop-group fixtures: {len(fx.results)} checked, "
                 f"{sum(v.status != f.expected for f, v in fx.results)} failed")
    for f, v in fx.results:
        mark = "ok  " if v.status == f.expected else "FAIL"
        lines.append(f"  {mark} {f.name}: {v.status} (expected {f.expected})")
    lines.append("verify: " + ("PASS" if ok else "FAIL"))
    return report, "\n".join(lines), EXIT_OK if ok else EXIT_NEGATIVE


def cmd_export(args):
    text = dump_model(_model(args))
    return {"model": text}, text.rstrip("\n"), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flagclean", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--model", metavar="PATH", help="YAML model file")
    src.add_argument("--builtin", action="store_true", help="use the builtin SL2 model (default)")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("derive", parents=[common], help="print the cleanness criterion")
    p.add_argument("--witnesses", action="store_true", help="show which chart divisors produce each form")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("check", parents=[common], help="decide cleanness at a rational assignment")
    p.add_argument("--set", nargs="+", metavar="NAME=RAT", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("transitions", parents=[common], help="print total transition maps")
    p.set_defaults(func=cmd_transitions)

    p = sub.add_parser("linebundle", parents=[common], help="derive and compare line-bundle cocycles")
    p.set_defaults(func=cmd_linebundle)

    p = sub.add_parser("verify", parents=[common], help="cocycle, line-bundle and loop-group checks")
    p.add_argument("--precision", type=int, default=loopgroup.DEFAULT_PRECISION)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", parents=[common], help="write the model as YAML")
    p.set_defaults(func=cmd_export)

    oracle = sub.add_parser("oracle", help="lattice reachability oracle")
    osub = oracle.add_subparsers(dest="oracle_command", required=True)
    p = osub.add_parser("simple", parents=[common], help="simplicity of the pushforward for exponents MU")
    p.add_argument("--mu", required=True, help="comma-separated rationals, e.g. 1/2,1/3")
    p.add_argument("--window", type=int, default=lattice.DEFAULT_WINDOW)
    p.set_defaults(func=cmd_oracle_simple)
    p = osub.add_parser("clean", parents=[common], help="oracle vs criterion at one assignment")
    p.add_argument("--set", nargs="+", metavar="NAME=RAT", required=True)
    p.add_argument("--window", type=int, default=lattice.DEFAULT_WINDOW)
    p.set_defaults(func=cmd_oracle_clean)
    p = osub.add_parser("grid", parents=[common], help="oracle vs criterion over a rational grid")
    p.add_argument("--denominator-bound", type=int, default=4)
    p.add_argument("--range", default="3", help="values in [-R, R]")
    p.add_argument("--samples", type=int, default=5000, help="deterministic sample size (0 = full grid)")
    p.add_argument("--window", type=int, default=lattice.DEFAULT_WINDOW,
                   help="minimum window; widened per case when the exponents demand it")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle_grid)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "samples", None) == 0:
        args.samples = None
    try:
        report, text, code = args.func(args)
    except (ModelFileError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (WindowTooSmall, MissingParameter, Disconnected, NonUnitDeterminant) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
