"""Command-line entry points: run one trial, run a batch, or validate.

Exit codes: 0 on success, 2 for configuration errors, 3 for runtime
failures inside an otherwise valid run.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ValidationError
from .scenario import builtin_scenarios, load_scenario
from .simulate import run_batch, run_trial

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergoshape",
        description="Ergodic tactile exploration and shape estimation runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one closed-loop trial")
    run.add_argument("scenario", help="scenario JSON path or built-in name")
    run.add_argument("--out", type=Path, default=None,
                     help="output directory (default: runs/<name>-seed<seed>)")
    run.add_argument("--seed", type=int, default=None, help="override scenario seed")
    run.add_argument("--trial", type=int, default=0, help="trial index (RNG stream)")
    run.add_argument("--policy", choices=("esac", "geer"), default=None,
                     help="override the steering policy")

    batch = sub.add_parser("batch", help="run repeated sampled-start trials")
    batch.add_argument("scenario", help="scenario JSON path or built-in name")
    batch.add_argument("--trials", type=int, default=10, help="trials per policy")
    batch.add_argument("--policy", choices=("esac", "geer", "both"), default="both")
    batch.add_argument("--out", type=Path, default=None,
                       help="output directory (default: runs/<name>-batch)")
    batch.add_argument("--seed", type=int, default=None, help="override scenario seed")

    val = sub.add_parser("validate", help="check a scenario without running it")
    val.add_argument("scenario", nargs="?", default=None,
                     help="scenario JSON path or built-in name; omit to list built-ins")
    return parser


def _load(args: argparse.Namespace):
    scenario = load_scenario(args.scenario)
    if getattr(args, "seed", None) is not None:
        if args.seed < 0:
            raise ValidationError("--seed must be >= 0")
        scenario = replace(scenario, seed=args.seed)
    if getattr(args, "policy", None) in ("esac", "geer"):
        scenario = scenario.with_policy(args.policy)
    return scenario


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = _load(args)
    out = args.out if args.out is not None else Path("runs") / f"{scenario.name}-seed{scenario.seed}"
    result = run_trial(scenario, trial_index=args.trial, out_dir=out)
    final = result.metrics.rows[-1]
    err = final["area_error"]
    print(
        f"{scenario.name}: t={final['t']:g} contacts={final['contacts']} "
        f"detected={final['detected']}/{len(scenario.shapes)} "
        f"gamma={final['gamma']:.4g} "
        f"area_error={'n/a' if err is None else format(err, '.4g')} -> {out}"
    )
    return EXIT_OK


def _cmd_batch(args: argparse.Namespace) -> int:
    scenario = _load(args)
    if args.trials < 1:
        raise ValidationError("--trials must be >= 1")
    policies = ("esac", "geer") if args.policy == "both" else (args.policy,)
    out = args.out if args.out is not None else Path("runs") / f"{scenario.name}-batch"
    summary = run_batch(scenario, args.trials, policies, out_dir=out)
    for policy, rows in summary["arms"].items():
        ok = [r for r in rows if "error" not in r]
        found = [r for r in ok if r["all_detected_time"] is not None]
        print(
            f"{scenario.name}/{policy}: {len(ok)}/{len(rows)} trials completed, "
            f"{len(found)} found every shape -> {out}"
        )
        for r in rows:
            if "error" in r:
                print(f"  trial {r['trial']}: {r['error']}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    if args.scenario is None:
        for name in builtin_scenarios():
            print(name)
        return EXIT_OK
    scenario = load_scenario(args.scenario)
    print(f"{scenario.name}: ok ({scenario.dimension}D, {len(scenario.shapes)} shapes, "
          f"{scenario.duration:g}s, policy={scenario.policy}, "
          f"estimator={scenario.estimator})")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "batch": _cmd_batch, "validate": _cmd_validate}
    try:
        return handlers[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
