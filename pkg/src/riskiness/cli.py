"""Command-line front end.

Exit codes: 0 success, 2 validation failure, 3 numeric ambiguity, 4 I/O.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from typing import Any, Sequence

from . import core, dyadic, sweep, tree
from .errors import (
    BoundarySignAmbiguous,
    InsufficientEvents,
    NotAGamble,
    NotConditionalGamble,
    ShapeMismatch,
    SpecInvalid,
)
from .gamble import DensityGamble, gamble_from_dict, validate
from .phi import boundary_lambda, phi_curve
from .simulate import SimulationSpec, simulate, submartingale_check

EXIT_OK, EXIT_VALIDATION, EXIT_AMBIGUOUS, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("riskiness")


class IOFailure(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("RISKINESS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IOFailure(f"cannot read {path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOFailure(f"cannot write {out}: {exc}") from exc


def _fmt(x: float) -> str:
    return "nan" if not math.isfinite(x) else f"{x:.17g}"


def _json(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _plot(kind: str, path: str | None, *args) -> None:
    if path is None:
        return
    from . import plotting

    try:
        getattr(plotting, kind)(*args, path)
    except OSError as exc:
        raise IOFailure(f"cannot write figure {path}: {exc}") from exc


def cmd_validate(args) -> int:
    g = gamble_from_dict(_load_json(args.gamble))
    stats = validate(g)
    _emit(_json(stats.__dict__), args.out)
    return EXIT_OK


def cmd_riskiness(args) -> int:
    g = gamble_from_dict(_load_json(args.gamble))
    res = core.riskiness(g, tol=args.tol, tie=args.tie)
    _emit(_json(res.as_dict()), args.out)
    return EXIT_OK


def cmd_phi(args) -> int:
    g = gamble_from_dict(_load_json(args.gamble))
    validate(g)
    lam_star = boundary_lambda(g)
    lams = [lam_star * i / (args.points - 1) for i in range(args.points)]
    vals = phi_curve(g, lams)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("lambda", "phi"))
    for lam, v in zip(lams, vals):
        w.writerow((_fmt(lam), "-inf" if v == -math.inf else _fmt(v)))
    _emit(buf.getvalue(), args.out)
    _plot("plot_phi", args.plot, g)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = sweep.SweepSpec.from_dict(_load_json(args.sweep))
    rows = sweep.run_sweep(spec, tol=args.tol, workers=_threads())
    bounds = sweep.locate_boundaries(spec, rows)
    out = args.out or spec.out
    _emit(sweep.rows_to_csv(rows), out)
    summary = {
        "rows": len(rows),
        "not_a_gamble": sum(r.regime == sweep.NOT_A_GAMBLE for r in rows),
        "ambiguous": sum(r.regime == sweep.AMBIGUOUS for r in rows),
        "boundaries": [b.__dict__ for b in bounds],
    }
    # CSV owns stdout when no output file is given
    (sys.stdout if out else sys.stderr).write(_json(summary))
    _plot("plot_sweep", args.plot, spec, rows, bounds)
    return EXIT_OK


def cmd_approx(args) -> int:
    g = gamble_from_dict(_load_json(args.gamble))
    if not isinstance(g, DensityGamble):
        raise NotAGamble("dyadic approximation needs a density gamble")
    validate(g)
    report = dyadic.lambda_sequence(g, n_max=args.n_max, workers=_threads())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("n", "lambda_n", "rho_n", "status"))
    solved = {lv.level: lv for lv in report.levels}
    for n in sorted(set(solved) | set(report.skipped)):
        if n in solved:
            w.writerow((n, _fmt(solved[n].lam), _fmt(solved[n].rho), "ok"))
        else:
            w.writerow((n, "nan", "nan", "not-yet-a-gamble"))
    _emit(buf.getvalue(), args.out)
    log.info(
        "target lambda=%.17g (%s), gap=%.3e, monotone=%s",
        report.target.lam, report.target.regime.value, report.gap, report.monotone,
    )
    _plot("plot_convergence", args.plot, report)
    return EXIT_OK


def cmd_tree(args) -> int:
    try:
        t = tree.GambleTree.from_dict(_load_json(args.tree))
    except ValueError as exc:
        raise SpecInvalid(str(exc)) from exc
    process = tree.riskiness_process(t)
    _emit(process.table() + "\n", args.out)
    return EXIT_OK


def cmd_consistency(args) -> int:
    try:
        a = tree.GambleTree.from_dict(_load_json(args.tree_a))
        b = tree.GambleTree.from_dict(_load_json(args.tree_b))
    except ValueError as exc:
        raise SpecInvalid(str(exc)) from exc
    rep = tree.time_consistency_check(a, b)
    _emit(_json({"violated": rep.violated, "witnesses": [w.__dict__ for w in rep.witnesses]}), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    raw = _load_json(args.spec)
    if args.seed is not None:
        raw = dict(raw, seed=args.seed)
    if (args.paths_csv or args.plot) and not raw.get("record_paths"):
        raw = dict(raw, record_paths=args.record_paths)
    spec = SimulationSpec.from_dict(raw)
    stats = simulate(spec, workers=_threads())
    out = stats.to_dict(per_path=not args.summary_only)
    try:
        rep = submartingale_check(stats)
        out["submartingale"] = rep.__dict__
    except InsufficientEvents as exc:
        out["submartingale"] = {"error": str(exc)}
    _emit(_json(out), args.out)
    if args.paths_csv and stats.trajectories is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("path", "t", "wealth"))
        for p, row in enumerate(stats.trajectories):
            for t, wv in enumerate(row):
                w.writerow((p, t, _fmt(float(wv))))
        _emit(buf.getvalue(), args.paths_csv)
    if stats.trajectories is not None:
        _plot("plot_wealth", args.plot, stats.trajectories)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fh-riskiness", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--out", help="output file (default: stdout)")
        return sp

    sp = add("validate", cmd_validate, "check gamble preconditions and print moments")
    sp.add_argument("--gamble", required=True)

    sp = add("riskiness", cmd_riskiness, "extended riskiness of a gamble")
    sp.add_argument("--gamble", required=True)
    sp.add_argument("--tol", type=float, default=core.ROOT_TOL)
    sp.add_argument("--tie", choices=("raise", "maximal-loss"), default="raise",
                    help="what to do when phi(1/L) is within its error bound of 0")

    sp = add("phi", cmd_phi, "tabulate phi(lambda) on [0, 1/L]")
    sp.add_argument("--gamble", required=True)
    sp.add_argument("--points", type=int, default=201)
    sp.add_argument("--plot", help="write a PNG of phi")

    sp = add("sweep", cmd_sweep, "riskiness over a parameter grid (CSV)")
    sp.add_argument("--sweep", required=True)
    sp.add_argument("--tol", type=float, default=core.ROOT_TOL)
    sp.add_argument("--plot", help="write a PNG of rho and lambda against the parameter")

    sp = add("approx", cmd_approx, "dyadic approximation lambda_n (CSV)")
    sp.add_argument("--gamble", required=True)
    sp.add_argument("--n-max", type=int, default=None)
    sp.add_argument("--plot", help="write a PNG of lambda_n against n")

    sp = add("tree", cmd_tree, "conditional riskiness on an event tree")
    sp.add_argument("tree")

    sp = add("consistency", cmd_consistency, "time-consistency check for two trees")
    sp.add_argument("tree_a")
    sp.add_argument("tree_b")

    sp = add("simulate", cmd_simulate, "wealth-process simulation (JSON stats)")
    sp.add_argument("spec")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--paths-csv", help="write (path, t, wealth) rows for recorded paths")
    sp.add_argument("--record-paths", type=int, default=20)
    sp.add_argument("--summary-only", action="store_true", help="omit per-path arrays")
    sp.add_argument("--plot", help="write a PNG of the recorded paths")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BoundarySignAmbiguous as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (NotAGamble, SpecInvalid, NotConditionalGamble, ShapeMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
