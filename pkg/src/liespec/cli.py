"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 classification rejection,
3 numerical or tolerance failure (including failed checks).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus
from .errors import (
    ClassificationError,
    ConsistencyError,
    DegenerateBasisError,
    DimensionError,
    InstanceError,
    LieSpecError,
    NotApplicableError,
    NotClosedError,
    SingularMatrixError,
    ToleranceError,
)
from .instance import Instance, dumps_instance, instance_from_dict, instance_to_dict, parse_instance
from .liealg import NON_SOLVABLE
from .report import add_spectrum, cplx, dumps, render_text, structure_report
from .spectrum import joint_spectrum, taylor_oracle
from .verify import CHECKS, SKIPPED, run_checks

EXIT_OK, EXIT_USAGE, EXIT_CLASS, EXIT_NUMERIC = 0, 1, 2, 3

GENERATORS = {
    "solvable": corpus.random_solvable,
    "nilpotent": corpus.random_nilpotent,
    "commuting": corpus.random_commuting,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, (ClassificationError, NotApplicableError)):
        return EXIT_CLASS
    if isinstance(exc, (ToleranceError, ConsistencyError, SingularMatrixError)):
        return EXIT_NUMERIC
    if isinstance(exc, (UsageError, InstanceError, DimensionError, DegenerateBasisError, NotClosedError, OSError)):
        return EXIT_USAGE
    if isinstance(exc, LieSpecError):
        return EXIT_NUMERIC
    return EXIT_USAGE


def load(source: str, args) -> Instance:
    """An instance file, or the name of a bundled example when no such file exists."""
    overrides = {"rank_rel": args.tol_rank, "eig_cluster": args.tol_cluster, "residual": args.tol_residual}
    if Path(source).exists():
        return parse_instance(source, overrides)
    try:
        doc = corpus.bundled(source)
    except KeyError:
        raise UsageError(f"{source}: no such file, and not a bundled example ({', '.join(corpus.bundled_names())})")
    return instance_from_dict(doc, overrides)


def emit(doc: dict, fmt: str) -> None:
    sys.stdout.write(dumps(doc) if fmt == "json" else render_text(doc))


def cmd_analyze(args) -> int:
    inst = load(args.instance, args)
    emit(structure_report(inst.name, inst.family, inst.tolerances), args.format)
    return EXIT_OK


def _spectrum_doc(inst: Instance):
    doc = structure_report(inst.name, inst.family, inst.tolerances)
    if doc["classification"] == NON_SOLVABLE:
        raise ClassificationError(f"{inst.name}: algebra is not solvable", NON_SOLVABLE)
    result = joint_spectrum(inst.family, inst.tolerances)
    return add_spectrum(doc, result, inst.tolerances), result


def cmd_spectrum(args) -> int:
    doc, _ = _spectrum_doc(load(args.instance, args))
    emit(doc, args.format)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = [c.strip() for c in args.checks.split(",") if c.strip()] if args.checks else list(CHECKS)
    unknown = [c for c in names if c not in CHECKS]
    if unknown:
        raise UsageError(f"unknown check(s): {', '.join(unknown)}; choose from {', '.join(CHECKS)}")
    inst = load(args.instance, args)
    doc, result = _spectrum_doc(inst)
    doc["checks"] = run_checks(result, names, inst.tolerances, seed=args.seed)
    emit(doc, args.format)
    failed = [n for n, c in doc["checks"].items() if c["status"] not in ("pass", SKIPPED)]
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_oracle(args) -> int:
    inst = load(args.instance, args)
    points = taylor_oracle(inst.family, inst.tolerances)
    doc = {
        "schema": "liespec.report/1",
        "instance": {"name": inst.name, "space_dim": inst.family.d, "generators": list(inst.family.labels)},
        "tolerances": inst.tolerances.as_dict(),
        "oracle": sorted([cplx(v) for v in p] for p in points),
    }
    emit(doc, args.format)
    return EXIT_OK


def cmd_examples(args) -> int:
    if args.action == "list":
        for name in corpus.bundled_names():
            print(name)
        return EXIT_OK
    if args.action == "emit":
        if not args.name:
            raise UsageError("examples emit needs a NAME")
        try:
            sys.stdout.write(corpus.bundled_text(args.name))
        except KeyError as exc:
            raise UsageError(exc.args[0]) from exc
        return EXIT_OK
    if args.dim is None or args.n is None:
        raise UsageError("examples gen needs --dim and --n")
    try:
        fam = GENERATORS[args.kind](args.seed, args.dim, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    name = f"random_{args.kind}_s{args.seed}_d{args.dim}_n{args.n}"
    sys.stdout.write(dumps_instance(instance_to_dict(name, fam)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol-rank", type=float, help="relative singular-value cutoff for numerical rank")
    common.add_argument("--tol-cluster", type=float, help="radius for merging eigenvalues and spectrum points")
    common.add_argument("--tol-residual", type=float, help="residual bound for closure and shape checks")
    common.add_argument("--format", choices=("json", "text"), default="text")

    parser = _Parser(prog="liespec", description="Joint spectra of solvable Lie algebras of matrices")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, func, text in (
        ("analyze", cmd_analyze, "classification, series and Jordan-Hölder flag"),
        ("spectrum", cmd_spectrum, "joint spectrum with Betti vectors"),
        ("oracle", cmd_oracle, "joint eigenvalues of a commuting family"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("instance", help="instance JSON file or bundled example name")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", parents=[common], help="spectrum plus consistency checks")
    p.add_argument("instance", help="instance JSON file or bundled example name")
    p.add_argument("--checks", help=f"comma-separated subset of {','.join(CHECKS)} (default: all)")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled characters")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("examples", help="bundled corpus and random instances")
    p.add_argument("action", choices=("list", "emit", "gen"))
    p.add_argument("name", nargs="?", help="bundled example to emit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--kind", choices=sorted(GENERATORS), default="solvable")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LieSpecError, UsageError, OSError, ValueError) as exc:
        code = exit_code(exc)
        if getattr(args, "format", "text") == "json" and code != EXIT_USAGE:
            sys.stdout.write(json.dumps({"schema": "liespec.report/1", "error": _error(exc)}, indent=2) + "\n")
        print(f"liespec: {exc}", file=sys.stderr)
        return code


def _error(exc) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ClassificationError) and exc.classification:
        out["classification"] = exc.classification
    return out


if __name__ == "__main__":
    sys.exit(main())
