"""Command-line interface.

Every command prints a JSON report on stdout.  Exit status: 0 pass,
1 check or verification failure, 2 usage or parse error, 3 not applicable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import expr as ex
from .corpus import EmptyCorpus, run_corpus
from .extremal import BlowUpError, EmptyEnsemble, drift, ensemble_trajectories, write_csv
from .family import Family, FamilyError, Generator, generator_of
from .files import CorpusEntry, FileFormatError, load_problem, load_transform, resolve
from .homogeneity import NonPolynomialProblem, detect_weights, scaling_integral
from .invariance import DimensionMismatch, check_family, check_generator
from .model import UnsolvableControl
from .noether import FirstIntegral, GeneratorRejected, first_integral, verify_symbolic
from .search import Ansatz, SearchError, search_report

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NA = 0, 1, 2, 3


class NotApplicable(Exception):
    pass


def _emit(report: dict) -> None:
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _transform_arg(args):
    """Family/generator from the second argument, or from the corpus entry."""
    if args.transform:
        return load_transform(args.transform)
    obj = resolve(args.problem)
    if isinstance(obj, CorpusEntry):
        return obj.family if obj.family is not None else obj.generator
    raise FileFormatError("a family or generator file is required")


def _generator_arg(args) -> Generator:
    if args.generator:
        t = load_transform(args.generator)
    else:
        obj = resolve(args.problem)
        if not isinstance(obj, CorpusEntry):
            raise FileFormatError("a generator file is required")
        t = obj.generator
    if isinstance(t, Family):
        t = generator_of(t)
    return t


def cmd_check(args) -> tuple:
    p = load_problem(args.problem)
    t = _transform_arg(args)
    if isinstance(t, Family):
        rep = check_family(p, t)
    else:
        rep = check_generator(p, t)
    return {"status": "pass" if rep.passed else "fail", "report": rep.to_dict()}, rep.passed


def cmd_derive(args) -> tuple:
    p = load_problem(args.problem)
    g = _generator_arg(args)
    out = {"generator": g.to_dict(), "integrals": []}
    ok = True
    for k in range(1, g.r + 1):
        c = first_integral(p, g, k, check=not args.force)
        res = verify_symbolic(p, c, g, k)
        ok &= res.is_zero()
        out["integrals"].append({"parameter": k, "first_integral": str(c.value), "residual": str(res)})
    out["status"] = "pass" if ok else "fail"
    return out, ok


def cmd_homog(args) -> tuple:
    p = load_problem(args.problem)
    basis = detect_weights(p)
    entries = []
    for w in basis:
        prim = w.primitive()
        entries.append({"weights": prim.to_dict(), "first_integral": str(scaling_integral(p, prim).value)})
    return {"status": "pass", "dimension": len(basis), "basis": entries}, True


def cmd_search(args) -> tuple:
    p = load_problem(args.problem)
    a = Ansatz(args.degree, not args.no_time_change, not args.no_gauge)
    rep = search_report(p, a)
    ok = all(g["residual"] == "0" for g in rep["generators"])
    rep["status"] = "pass" if ok else "fail"
    return rep, ok


def _integral_arg(args, p) -> FirstIntegral:
    if args.integral:
        return FirstIntegral(ex.parse(args.integral), "user", p)
    obj = resolve(args.problem)
    if isinstance(obj, CorpusEntry):
        return FirstIntegral(obj.expected_integral, "user", p)
    raise FileFormatError("--integral is required unless a corpus entry is given")


def cmd_simulate(args) -> tuple:
    p = load_problem(args.problem)
    c = _integral_arg(args, p)
    try:
        trajs, blowups = ensemble_trajectories(p, args.trials, args.seed, args.step)
    except UnsolvableControl as err:
        raise NotApplicable(f"{err}; use `derive` for symbolic verification") from None
    rows = []
    worst = None
    for j, traj in sorted(trajs.items()):
        rep = drift(traj, c)
        rep.worst_trial = j
        rows.append({"trial": j, "reference": rep.reference, "max_abs_drift": rep.max_abs_drift,
                     "relative_drift": rep.relative_drift})
        if worst is None or rep.relative_drift > worst.relative_drift:
            worst = rep
        if args.out:
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            write_csv(traj, out_dir / f"{p.name}_trial{j:03d}.csv", [rep])
    ok = worst is not None and worst.relative_drift <= args.tol
    report = {
        "status": "pass" if ok else "fail",
        "integral": str(c.value),
        "tol": args.tol,
        "trials": args.trials,
        "blowups": {str(j): t for j, t in sorted(blowups.items())},
        "worst": None if worst is None else {**worst.to_dict(), "trials": args.trials, "blowups": len(blowups)},
        "drift_table": rows,
    }
    if args.out:
        report["csv_dir"] = str(args.out)
    return report, ok


def cmd_corpus(args) -> tuple:
    rep = run_corpus(args.dir, trials=args.trials, seed=args.seed, step=args.step, tol=args.tol)
    return rep, rep["status"] == "pass"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasinoether",
        description="Quasi-invariance, symmetry generators and Noether first integrals for optimal control problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tol", type=float, default=1e-6, help="relative drift tolerance")
        sp.add_argument("--step", type=float, default=1e-3, help="RK4 step")
        sp.add_argument("--trials", type=int, default=20)
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--out", default=None, help="output directory for CSV trajectories")

    sp = sub.add_parser("check", help="quasi-invariance of a family or the determining equations of a generator")
    sp.add_argument("problem", help="problem file or corpus entry name")
    sp.add_argument("transform", nargs="?", help="family or generator file")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("derive", help="first integral of a generator with its symbolic certificate")
    sp.add_argument("problem")
    sp.add_argument("generator", nargs="?")
    sp.add_argument("--force", action="store_true", help="skip the necessary-condition check")
    common(sp)
    sp.set_defaults(func=cmd_derive)

    sp = sub.add_parser("homog", help="scaling weights and their first integrals")
    sp.add_argument("problem")
    common(sp)
    sp.set_defaults(func=cmd_homog)

    sp = sub.add_parser("search", help="polynomial ansatz search for generators")
    sp.add_argument("problem")
    sp.add_argument("--degree", type=int, default=1)
    sp.add_argument("--no-time-change", action="store_true")
    sp.add_argument("--no-gauge", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("simulate", help="drift of a first integral along random extremals")
    sp.add_argument("problem")
    sp.add_argument("--integral", default=None, help="expression; defaults to the corpus entry's integral")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("corpus", help="run every bundled example end to end")
    sp.add_argument("--dir", default=None, help="alternative corpus directory")
    common(sp)
    sp.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code else EXIT_PASS
    echo = {"command": args.command, "argv": list(argv) if argv is not None else sys.argv[1:]}
    try:
        report, ok = args.func(args)
    except NotApplicable as err:
        _emit({**echo, "status": "not-applicable", "message": str(err), "exit_status": EXIT_NA})
        return EXIT_NA
    except (GeneratorRejected, BlowUpError) as err:
        _emit({**echo, "status": "fail", "message": str(err), "exit_status": EXIT_FAIL})
        return EXIT_FAIL
    except (FileFormatError, ex.ExprError, FamilyError, DimensionMismatch, NonPolynomialProblem, SearchError,
            EmptyCorpus, EmptyEnsemble, ValueError) as err:
        _emit({**echo, "status": "error", "message": str(err), "exit_status": EXIT_USAGE})
        return EXIT_USAGE
    code = EXIT_PASS if ok else EXIT_FAIL
    _emit({**echo, **report, "exit_status": code})
    return code


if __name__ == "__main__":
    sys.exit(main())
