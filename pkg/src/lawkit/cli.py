"""Command-line front end.

Exit codes: 0 verdict pass/complete, 1 certified failure verdict,
2 unknown at the given bounds, 3 usage or parse errors, 4 budget exhaustion.
The LAWKIT_BUDGET environment variable caps enumeration node counts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from ._util import BudgetExceededError
from .base import make_graph, make_set
from .dsl import LawkitParseError, emit, parse
from .experiments import EXPERIMENTS, Report, run_experiment
from .models import enumerate_models
from .pretheory import bundled, bundled_names, congruence_closure, hom_classes
from .theorycheck import complete_to_theory, is_theory, theories_isomorphic_bounded

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3
EXIT_BUDGET = 4


def _load_pretheory(spec: str):
    """A pretheory from a file path, or a bundled presentation by name."""
    if os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            return parse(fh.read())
    if spec in bundled_names():
        return bundled(spec)
    raise LawkitParseError(f"no such file or bundled presentation: {spec}", 0, 0)


def _parse_arity(text: str) -> int:
    return int(text.strip().lstrip("[").rstrip("]"))


def _emit_report(report: Report, as_json: bool) -> int:
    if as_json:
        print(json.dumps(report.to_dict(), sort_keys=True, indent=2, default=str))
    else:
        print(report.to_text())
    return report.exit_code


def _cmd_check_theory(args) -> int:
    p = _load_pretheory(args.file)
    verdict = is_theory(p, bound=args.bound, certify=args.certify)
    status = {"theory": "pass", "not-theory": "fail",
              "unknown-at-bound": "unknown"}[verdict.status]
    report = Report(f"check-theory {args.file}", status,
                    {"bound": verdict.bound},
                    {"verdict": verdict.status,
                     "witness": verdict.witness,
                     "completeness_flags": {f"{k[0]},{k[1]}": v
                                            for k, v in verdict.details.get("flags", {}).items()}})
    return _emit_report(report, args.json)


def _cmd_models(args) -> int:
    p = _load_pretheory(args.file)
    rows = {}
    if p.family.kind == "fin":
        carriers = [make_set(args.size)]
    else:
        carriers = []
        for v in range(args.size + 1):
            for e in range(args.size + 1):
                if v == 0 and e > 0:
                    continue
                import itertools
                for edges in itertools.product(
                        itertools.product(range(v), repeat=2), repeat=e):
                    carriers.append(make_graph(v, edges))
    total = 0
    for x in carriers:
        n = len(enumerate_models(p, x))
        total += n
        key = ",".join(str(s) for s in x.sizes)
        rows[key] = rows.get(key, 0) + n
    report = Report(f"models {args.file}", "pass", {"size": args.size},
                    {"models": total, "by_carrier_sizes": rows})
    return _emit_report(report, args.json)


def _cmd_hom(args) -> int:
    p = _load_pretheory(args.file)
    a, b = _parse_arity(args.a), _parse_arity(args.b)
    window = sorted(set(p.default_window()) | {a, b})
    table = congruence_closure(p, args.bound, window=window, certify=args.certify)
    reps = hom_classes(table, a, b)
    report = Report(f"hom {args.file} {a} {b}", "pass",
                    {"bound": args.bound},
                    {"classes": len(reps),
                     "complete": table.complete[(a, b)],
                     "representatives": [w.pretty(p.family) for w in reps]})
    return _emit_report(report, args.json)


def _cmd_complete(args) -> int:
    p = _load_pretheory(args.file)
    tt = complete_to_theory(p, bound=args.bound, depth=args.depth)
    fam = p.family
    sizes = {f"{fam.format_arity(a)},{fam.format_arity(b)}": tt.size(a, b)
             for a in tt.window for b in tt.window}
    report = Report(f"complete {args.file}", "pass",
                    {"bound": args.bound, "depth": args.depth},
                    {"hom_counts": sizes,
                     "saturated": {str(b): tt.exact[b] for b in tt.window}})
    return _emit_report(report, args.json)


def _cmd_iso(args) -> int:
    p1 = _load_pretheory(args.file1)
    p2 = _load_pretheory(args.file2)
    if p1.family is not p2.family:
        print("error: pretheories have different arity families", file=sys.stderr)
        return EXIT_USAGE
    window = sorted(set(p1.default_window()) | set(p2.default_window()))[:args.max_arity + 1]
    t1 = complete_to_theory(p1, bound=args.bound, depth=args.depth,
                            window=window, with_words=False)
    t2 = complete_to_theory(p2, bound=args.bound, depth=args.depth,
                            window=window, with_words=False)
    verdict = theories_isomorphic_bounded(t1, t2, census_bound=args.census)
    status = {"isomorphic": "pass", "not-isomorphic": "fail",
              "unknown": "unknown"}[verdict.status]
    report = Report(f"iso {args.file1} {args.file2}", status,
                    {"bound": args.bound, "depth": args.depth,
                     "census": args.census},
                    {"verdict": verdict.status, **verdict.detail})
    return _emit_report(report, args.json)


def _cmd_experiment(args) -> int:
    report = run_experiment(args.name)
    return _emit_report(report, args.json)


def _cmd_bundled(args) -> int:
    p = bundled(args.name)
    if args.emit:
        sys.stdout.write(emit(p))
    else:
        print(f"{p.name}: base {p.family.kind}, {len(p.generators)} generators, "
              f"{len(p.equations)} equations (use --emit for the file)")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lawkit",
        description="finite presheaf engine for pretheories, their models, "
                    "and monad arity experiments")
    ap.add_argument("--json", action="store_true", help="machine-readable reports")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check-theory", help="decide the theory condition up to a bound")
    c.add_argument("file")
    c.add_argument("--bound", type=int, default=6)
    c.add_argument("--no-certify", dest="certify", action="store_false")
    c.set_defaults(fn=_cmd_check_theory)

    c = sub.add_parser("models", help="count concrete models on small carriers")
    c.add_argument("file")
    c.add_argument("--size", type=int, required=True)
    c.set_defaults(fn=_cmd_models)

    c = sub.add_parser("hom", help="bounded hom classes between two arities")
    c.add_argument("file")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--bound", type=int, default=6)
    c.add_argument("--no-certify", dest="certify", action="store_false")
    c.set_defaults(fn=_cmd_hom)

    c = sub.add_parser("complete", help="bounded theory completion")
    c.add_argument("file")
    c.add_argument("--bound", type=int, default=6)
    c.add_argument("--depth", type=int, default=4)
    c.set_defaults(fn=_cmd_complete)

    c = sub.add_parser("iso", help="bounded isomorphism of completed theories")
    c.add_argument("file1")
    c.add_argument("file2")
    c.add_argument("--bound", type=int, default=3)
    c.add_argument("--depth", type=int, default=2)
    c.add_argument("--census", type=int, default=2)
    c.add_argument("--max-arity", type=int, default=2)
    c.set_defaults(fn=_cmd_iso)

    c = sub.add_parser("experiment", help="run a bundled experiment")
    c.add_argument("name", choices=sorted(EXPERIMENTS))
    c.set_defaults(fn=_cmd_experiment)

    c = sub.add_parser("bundled", help="show a bundled presentation")
    c.add_argument("name", choices=bundled_names())
    c.add_argument("--emit", action="store_true")
    c.set_defaults(fn=_cmd_bundled)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except LawkitParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
