"""Command-line interface.

Subcommands: `check` (classify an instance file and its quota profile),
`solve` (run one of the three solvers), `repro` (re-derive the reference
examples), `fuzz` (monotonicity campaigns). Exit codes: 0 success / no
violations, 1 invalid input, 2 infeasible constraints, 3 violations or
failed reproductions. All rationals are printed as canonical "p/q".
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .binary_solver import (
    InfeasibleConstraintsError,
    NotBinaryError,
    NotPartiallyAlignedError,
    solve_binary,
)
from .lab import fuzz_monotonicity, repro_examples
from .model import (
    ValidationError,
    check_constraints,
    classify_instance,
    load_instance,
    rat_str,
    vacuous_profile,
)
from .oracle import solve_exante_grid
from .response import check_ex_ante_ic  # noqa: F401  (re-exported convenience)
from .sender_lp import solve_expost

__all__ = ["main"]

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2
EXIT_VIOLATIONS = 3


def _flatten(obj, prefix=""):
    rows = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            rows.extend(_flatten(v, f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            rows.extend(_flatten(v, f"{prefix}[{i}]"))
    else:
        rows.append((prefix, obj))
    return rows


def _emit(doc: dict, fmt: str, out) -> None:
    if fmt == "json":
        json.dump(doc, out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        out.write("key,value\n")
        for key, value in _flatten(doc):
            text = "" if value is None else str(value)
            if "," in text or '"' in text:
                text = '"' + text.replace('"', '""') + '"'
            out.write(f"{key},{text}\n")
    else:
        for key, value in _flatten(doc):
            out.write(f"{key}: {value}\n")


def _read_instance(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    return load_instance(text)


def _solution_doc(sol) -> dict:
    return {
        "method": sol.method,
        "scheme": [[rat_str(v) for v in row] for row in sol.scheme.probs],
        "response": [[rat_str(v) for v in row] for row in sol.response.probs],
        "sender_eu": rat_str(sol.sender_eu),
        "receiver_eu": rat_str(sol.receiver_eu),
        "action_probs": [rat_str(v) for v in sol.action_probs],
    }


def _cmd_check(args, out) -> int:
    inst, profile = _read_instance(args.instance)
    cls = classify_instance(inst)
    doc = {
        "states": inst.n,
        "actions": inst.m,
        "classification": {
            "state_matching": cls.state_matching,
            "action_matching": cls.action_matching,
            "sender_case": cls.sender_case,
        },
    }
    code = EXIT_OK
    if profile is not None:
        status = check_constraints(profile, inst)
        doc["constraints"] = {
            "implementable": status.implementable,
            "feasible": status.feasible,
            "dimension_mismatch": status.dimension_mismatch,
        }
        if not status.implementable:
            code = EXIT_INFEASIBLE
    _emit(doc, args.format, out)
    return code


def _cmd_solve(args, out) -> int:
    inst, profile = _read_instance(args.instance)
    if profile is None:
        profile = vacuous_profile(inst.m)
    doc: dict = {"solver": args.method}
    if args.method == "binary":
        try:
            sol = solve_binary(inst, profile)
        except InfeasibleConstraintsError as exc:
            _emit({"solver": "binary", "status": "infeasible", "detail": str(exc)},
                  args.format, out)
            return EXIT_INFEASIBLE
        except (NotBinaryError, NotPartiallyAlignedError) as exc:
            raise ValidationError(str(exc)) from exc
        doc.update(status="optimal", solution=_solution_doc(sol))
    elif args.method == "expost":
        res = solve_expost(inst, profile)
        if res.status != "optimal":
            _emit({"solver": "expost", "status": "infeasible"}, args.format, out)
            return EXIT_INFEASIBLE
        doc.update(status="optimal", solution=_solution_doc(res.solution))
    else:  # grid
        delta = None if args.band is None else Fraction(args.band)
        rep = solve_exante_grid(inst, profile, K=args.grid, delta=delta)
        if rep.status != "optimal":
            _emit({"solver": "grid", "status": "infeasible"}, args.format, out)
            return EXIT_INFEASIBLE
        doc.update(
            status="optimal",
            solution=_solution_doc(rep.solution),
            grid={
                "K": rep.K,
                "delta": rat_str(rep.delta),
                "sender_upper_gap": rat_str(rep.sender_upper_gap),
                "grid_max_sender_eu": rat_str(rep.grid_max_sender_eu),
                "schemes_enumerated": rep.scheme_count,
                "schemes_evaluated": rep.evaluated,
                "backend": rep.backend,
            },
        )
    _emit(doc, args.format, out)
    return EXIT_OK


def _cmd_repro(args, out) -> int:
    eps = Fraction(args.eps)
    report = repro_examples(args.which, eps=eps)
    _emit(report.to_dict(), args.format, out)
    return EXIT_OK if report.status == "pass" else EXIT_VIOLATIONS


def _cmd_fuzz(args, out) -> int:
    report = fuzz_monotonicity(args.mode, args.trials, args.seed, K=args.grid)
    _emit(report.to_dict(), args.format, out)
    return EXIT_OK if not report.violations else EXIT_VIOLATIONS


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "csv", "text"), default="text",
                     help="output format (default: text)")

    parser = argparse.ArgumentParser(
        prog="quotasig",
        description="Solvers and verification lab for quota-constrained persuasion games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[fmt],
                       help="classify an instance and its quota profile")
    p.add_argument("instance", help="instance file (JSON)")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("solve", parents=[fmt], help="solve an instance")
    p.add_argument("instance", help="instance file (JSON)")
    p.add_argument("--method", choices=("binary", "expost", "grid"),
                   required=True)
    p.add_argument("--grid", type=int, default=None, metavar="K",
                   help="grid resolution for --method grid")
    p.add_argument("--band", default=None, metavar="DELTA",
                   help="sender-optimality band p/q for --method grid")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("repro", parents=[fmt],
                       help="re-derive a reference example")
    p.add_argument("which", choices=("sec31", "sec4", "coin", "nonalign-exact"))
    p.add_argument("--eps", default="1/100", metavar="p/q",
                   help="mismatch reward in the sec31 instance")
    p.set_defaults(fn=_cmd_repro)

    p = sub.add_parser("fuzz", parents=[fmt],
                       help="run a monotonicity fuzz campaign")
    p.add_argument("--mode", choices=("theorem2-binary", "prop3-ternary"),
                   required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--grid", type=int, default=None, metavar="K")
    p.set_defaults(fn=_cmd_fuzz)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args, sys.stdout)
    except (ValidationError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
