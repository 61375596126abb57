"""Command-line front end.

Exit codes
----------
    0  no Errors (Warnings allowed)
    1  layout Errors found
    2  unreadable, malformed or out-of-contract input
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, documents
from .dispatch import FilteredObscured, TouchEvent, dispatch
from .errors import ScenarioError
from .geometry import DpPoint, dp_to_px
from .scenario import run_trials
from .windowing import is_point_obscured

EXIT_OK, EXIT_ERRORS, EXIT_INPUT = 0, 1, 2


def _name(path: str) -> str:
    return Path(path).stem


def _print_violations(violations) -> None:
    if not violations:
        print("violations: none")
        return
    print("violations:")
    for v in violations:
        print(f"  {v}")


def _fmt_ci(ci) -> str:
    return f"[{ci[0]:.6f}, {ci[1]:.6f}]"


def cmd_validate(args) -> int:
    script = documents.load_script(args.scenario)
    violations = analysis.validate_layout(script, args.min_target_dp)
    print(f"scenario: {_name(args.scenario)}")
    _print_violations(violations)
    return EXIT_ERRORS if analysis.errors(violations) else EXIT_OK


def cmd_simulate(args) -> int:
    script = documents.load_script(args.scenario)
    violations = analysis.validate_layout(script, args.min_target_dp)
    if analysis.errors(violations):
        _print_violations(violations)
        return EXIT_ERRORS
    est = run_trials(script, args.trials, args.seed)
    ratings = analysis.rate_attack(script)
    if args.format == "json":
        print(
            documents.dumps(
                {
                    "scenario": _name(args.scenario),
                    "policy": str(script.policy),
                    "trials": {
                        "n": est.n,
                        "seed": est.seed,
                        "successes": est.successes,
                        "p_hat": est.p_hat,
                        "ci95": list(est.ci95),
                    },
                    "ratings": ratings.as_dict(),
                }
            ),
            end="",
        )
    else:
        print(f"scenario: {_name(args.scenario)}")
        print(f"policy: {script.policy}")
        print(f"trials: n={est.n} seed={est.seed} successes={est.successes} p_hat={est.p_hat:.6f} ci95={_fmt_ci(est.ci95)}")
        print(f"ratings: {ratings.summary()}")
    return EXIT_OK


def _parse_tap(text: str) -> tuple[float, float, int]:
    try:
        x, y, t = text.split(",")
        return float(x), float(y), int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,t (dp, dp, ms), got {text!r}") from None


def cmd_trace(args) -> int:
    script = documents.load_script(args.scenario)
    if not 0 <= args.screen < script.n_steps:
        raise ScenarioError(f"--screen must be in [0, {script.n_steps - 1}]")
    stack = script.stack(args.screen)
    for x, y, t in args.tap:
        px = dp_to_px(DpPoint(x, y), script.device)
        outcome = dispatch(stack, TouchEvent(px, t))
        line = (
            f"t={t} dp=({x:g},{y:g}) px=({px.x},{px.y}) policy={script.policy} "
            f"screen={stack.current_screen.name} {outcome}"
        )
        if isinstance(outcome, FilteredObscured):
            line += f" obscured={str(is_point_obscured(stack, px, t)).lower()}"
        print(line)
    return EXIT_OK


def cmd_report(args) -> int:
    script = documents.load_script(args.scenario)
    report = analysis.feasibility_report(script, args.trials or None, args.seed, args.min_target_dp)
    if args.format == "json":
        print(documents.dumps(report.to_dict()), end="")
    else:
        print(f"scenario: {_name(args.scenario)}")
        _print_violations(report.violations)
        steps = ", ".join(f"{p:.6f}" for p in report.per_step_success)
        print(f"success ({report.success_method}): per step {steps}; overall {report.overall_success:.6f}")
        if report.trials is not None:
            t = report.trials
            print(f"trials: n={t.n} seed={t.seed} p_hat={t.p_hat:.6f} ci95={_fmt_ci(t.ci95)}")
        print(f"ratings: {report.ratings.summary()}")
        for line in report.ratings.render_list().splitlines():
            print(f"  {line}")
        print("stealth notes:" if report.stealth_notes else "stealth notes: none")
        for note in report.stealth_notes:
            print(f"  - {note}")
    return EXIT_ERRORS if analysis.errors(list(report.violations)) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tapsim", description="Tapjacking attack simulator and feasibility analyzer.")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_cmd(name: str, help: str, fn) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("scenario", help="scenario JSON file, or the name of a bundled fixture")
        p.set_defaults(func=fn)
        return p

    def layout_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--min-target-dp", type=float, default=analysis.MIN_TARGET_DP)

    def trial_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--trials", type=int, default=1000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("text", "json"), default="text")

    layout_opts(scenario_cmd("validate", "check the bait layout", cmd_validate))

    p = scenario_cmd("simulate", "estimate attack success by Monte Carlo", cmd_simulate)
    trial_opts(p)
    layout_opts(p)

    p = scenario_cmd("trace", "dispatch single taps and print the outcome", cmd_trace)
    p.add_argument("--tap", type=_parse_tap, action="append", required=True, metavar="X,Y,T",
                   help="tap position in dp and time in ms; repeatable")
    p.add_argument("--screen", type=int, default=0, help="index of the victim screen under the overlay")

    p = scenario_cmd("report", "full feasibility report", cmd_report)
    trial_opts(p)
    layout_opts(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "trials", 1) < 0:
        print("error: --trials must be >= 0", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ScenarioError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
