"""Command-line front end.

Every subcommand is a thin adapter over one library call. Exit codes:
0 success or threshold holds, 1 threshold fails, 2 bad input,
3 unsupported model structure, 4 threshold undecided below the saturation point.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import errors
from .errors import InputError, ParseError, UnsupportedStructure, VpeError
from .expectation import Direction, solve_expectation
from .gadget import build_gadget
from .mdp import load_mdp, serialize_mdp
from .numeric import format_rational, rational_parse, render
from .schedulers import MemorylessScheduler, WeightBasedScheduler, parse_scheduler, serialize_scheduler
from .simulate import simulate
from .variance import min_variance_among_optimal
from .vpe import (
    DEFAULT_BUDGET,
    Objective,
    Verdict,
    VpeReport,
    frontier,
    maximize_vpe,
    saturation_point,
    threshold,
    vpe_of_scheduler,
)

EXIT_OK, EXIT_FAILS, EXIT_INPUT, EXIT_UNSUPPORTED, EXIT_UNDECIDED = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _rational(text: str) -> Fraction:
    try:
        return rational_parse(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _natural(text: str) -> int:
    if not text.isdigit():
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}")
    return int(text)


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _direction(args) -> Direction:
    return Direction.MINIMIZE if args.min else Direction.MAXIMIZE


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_scheduler(path: str, m) -> WeightBasedScheduler:
    try:
        tail = min_variance_among_optimal(m, Direction.MINIMIZE).scheduler
    except VpeError:
        tail = None
    return parse_scheduler(_read(path), m, default_tail=tail)


def _frontier_csv(rows) -> str:
    out = ["lambda,expectation,variance,vpe"]
    for r in rows:
        out.append(",".join(format_rational(x) for x in (r.lam, r.expectation, r.variance, r.vpe)))
    return "\n".join(out) + "\n"


def _print_report(rep: VpeReport, out) -> None:
    print(f"lambda = {render(rep.lam)}", file=out)
    print(f"bound = {rep.bound_used}", file=out)
    print(f"exact = {'true' if rep.exact else 'false'}", file=out)
    print(f"objective = {rep.objective.value}", file=out)
    print(f"vpe = {render(rep.value)}", file=out)
    print(f"expectation = {render(rep.moments.expectation)}", file=out)
    print(f"variance = {render(rep.moments.variance)}", file=out)


def cmd_validate(args, out) -> int:
    m = load_mdp(args.file)
    count = sum(len(m.actions[s]) for s in m.states)
    print(f"valid: {m.n} states, {count} actions", file=out)
    return EXIT_OK


def cmd_expect(args, out) -> int:
    m = load_mdp(args.file)
    sol = solve_expectation(m, _direction(args))
    print(f"direction = {sol.direction.value}", file=out)
    for s in m.nongoal:
        print(f"{s} = {render(sol.values[s])} via {sol.witness[s]} optimal {','.join(sol.optimal_actions[s])}", file=out)
    return EXIT_OK


def cmd_varmin(args, out) -> int:
    m = load_mdp(args.file)
    sol = min_variance_among_optimal(m, _direction(args))
    print(f"direction = {sol.direction.value}", file=out)
    for s in m.nongoal:
        print(
            f"{s} choose {sol.scheduler[s]} expectation {render(sol.expectation[s])} "
            f"variance {render(sol.variance[s])} second_moment {render(sol.second_moment[s])}",
            file=out,
        )
    if args.out:
        sched = WeightBasedScheduler(0, MemorylessScheduler.deterministic(sol.scheduler))
        _write(args.out, serialize_scheduler(sched, m))
    return EXIT_OK


def cmd_saturation(args, out) -> int:
    m = load_mdp(args.file)
    c = saturation_point(m, args.lam)
    print(f"n = {c.n}", file=out)
    print(f"W = {c.W}", file=out)
    print(f"eps = {render(c.eps)}", file=out)
    print(f"delta = {render(c.delta) if c.delta is not None else 'absent'}", file=out)
    for name in ("U1", "U2", "b_half", "B_half"):
        print(f"{name} = {render(getattr(c, name))}", file=out)
    print(f"K = {c.K}", file=out)
    print(f"degenerate = {'true' if c.degenerate else 'false'}", file=out)
    return EXIT_OK


def cmd_vpe(args, out) -> int:
    m = load_mdp(args.file)
    objective = Objective.MINIMIZE_EXPECTATION if args.minimize_expectation else Objective.MAXIMIZE_EXPECTATION
    code = EXIT_OK
    if args.threshold is not None:
        res = threshold(m, args.lam, args.threshold, args.bound, objective, args.budget, args.jobs)
        rep = res.report
        code = {Verdict.HOLDS: EXIT_OK, Verdict.FAILS: EXIT_FAILS, Verdict.LOWER_BOUND_ONLY: EXIT_UNDECIDED}[res.verdict]
    else:
        rep = maximize_vpe(m, args.lam, args.bound, objective, args.budget, args.jobs)
    _print_report(rep, out)
    if args.threshold is not None:
        print(f"threshold {format_rational(args.threshold)}: {res.verdict.value}", file=out)
    if args.out:
        _write(args.out, serialize_scheduler(rep.scheduler, m))
    if args.emit_frontier_csv:
        from .vpe import FrontierRow

        row = FrontierRow(rep.lam, rep.moments.expectation, rep.moments.variance, rep.value)
        _write(args.emit_frontier_csv, _frontier_csv([row]))
    return code


def cmd_eval(args, out) -> int:
    m = load_mdp(args.file)
    sched = _load_scheduler(args.scheduler, m)
    _print_report(vpe_of_scheduler(m, args.lam, sched), out)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    m = load_mdp(args.file)
    sched = _load_scheduler(args.scheduler, m)
    s = simulate(m, sched, args.samples, args.seed, jobs=args.jobs)
    print(f"# generator {s.generator}", file=out)
    print(f"# samples {s.samples} seed {s.seed}", file=out)
    print(f"# mean = {render(s.mean)}", file=out)
    print(f"# variance = {render(s.variance)}", file=out)
    print(f"# min = {s.minimum}", file=out)
    print(f"# max = {s.maximum}", file=out)
    out.write(s.histogram_csv())
    return EXIT_OK


def cmd_frontier(args, out) -> int:
    m = load_mdp(args.file)
    rows = frontier(m, args.lambdas, args.bound, args.budget, args.jobs)
    out.write(_frontier_csv(rows))
    return EXIT_OK


def cmd_gadget(args, out) -> int:
    m = load_mdp(args.file)
    g = build_gadget(m, args.target)
    side = f"lambda {format_rational(g.lam)}\ntheta {format_rational(g.theta)}\n"
    header = "".join(f"# {line}\n" for line in side.splitlines())
    _write(args.out, header + serialize_mdp(g.mdp))
    out.write(side)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vpemdp", description="Exact variance-penalized expectation for weighted MDPs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        return sp

    def direction(sp):
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--max", action="store_true")
        g.add_argument("--min", action="store_true")

    def search(sp):
        sp.add_argument("--bound", type=_natural)
        sp.add_argument("--budget", type=_natural, default=DEFAULT_BUDGET,
                        help="maximal number of enumerated assignments")
        sp.add_argument("--jobs", type=_natural, default=1)

    sp = add("validate", cmd_validate, "parse and validate a model")
    sp.add_argument("file")
    sp = add("expect", cmd_expect, "optimal expected accumulated weight")
    direction(sp)
    sp.add_argument("file")
    sp = add("varmin", cmd_varmin, "minimal variance among expectation-optimal schedulers")
    direction(sp)
    sp.add_argument("--out")
    sp.add_argument("file")
    sp = add("saturation", cmd_saturation, "saturation point constants")
    sp.add_argument("--lambda", dest="lam", type=_rational, required=True)
    sp.add_argument("file")
    sp = add("vpe", cmd_vpe, "maximal variance-penalized expectation")
    sp.add_argument("--lambda", dest="lam", type=_rational, required=True)
    search(sp)
    sp.add_argument("--minimize-expectation", action="store_true")
    sp.add_argument("--threshold", type=_rational)
    sp.add_argument("--out")
    sp.add_argument("--emit-frontier-csv")
    sp.add_argument("file")
    sp = add("eval", cmd_eval, "VPE of a given scheduler")
    sp.add_argument("--lambda", dest="lam", type=_rational, required=True)
    sp.add_argument("--scheduler", required=True)
    sp.add_argument("file")
    sp = add("simulate", cmd_simulate, "seeded Monte Carlo runs of a scheduler")
    sp.add_argument("--scheduler", required=True)
    sp.add_argument("--samples", type=_natural, required=True)
    sp.add_argument("--seed", type=_natural, required=True)
    sp.add_argument("--jobs", type=_natural, default=1)
    sp.add_argument("file")
    sp = add("frontier", cmd_frontier, "optimal (expectation, variance) per lambda as CSV")
    sp.add_argument("--lambdas", type=_rational_list, required=True)
    search(sp)
    sp.add_argument("file")
    sp = add("gadget", cmd_gadget, "build the exact-weight reachability reduction instance")
    sp.add_argument("--target", type=_natural, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("file")
    return p


def dispatch(argv, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except (InputError, errors.BoundTooLarge, errors.ZeroVisitDivision, OSError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except (UnsupportedStructure, errors.StepLimitExceeded, errors.SingularMatrix) as exc:
        print(f"unsupported: {exc}", file=err)
        return EXIT_UNSUPPORTED


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
