"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 enumeration cap refusal.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import DEFAULT_CAP, CapExceeded, brute_force_optimum, export_results, format_table, run_batch
from .belief import BeliefError
from .codec import CodecError
from .optimizers import ALGORITHMS, ConfigError, SwarmConfig
from .scenario import (BUILTIN_NAMES, ScenarioError, builtin_description, builtin_scenario,
                       export_scenario, load_scenario)

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_CAP = 0, 1, 2, 3
VALIDATION_ERRORS = (ScenarioError, ConfigError, BeliefError, CodecError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def resolve_scenario(ref: str):
    if ref.startswith("builtin:"):
        return builtin_scenario(ref.split(":", 1)[1])
    text = Path(ref).read_text(encoding="utf-8")
    return load_scenario(text)


def _config(args) -> SwarmConfig:
    return SwarmConfig(swarm_size=args.swarm_size, generations=args.generations, seed=args.seed)


def _check_algos(algos):
    if not algos:
        raise ConfigError(f"at least one --algo is required; supported: {', '.join(ALGORITHMS)}")
    for a in algos:
        if a not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {a!r}; supported: {', '.join(ALGORITHMS)}")


def cmd_run(args) -> int:
    _check_algos([args.algo])
    scenario = resolve_scenario(args.scenario)
    stats = run_batch(scenario, args.algo, _config(args), args.runs, args.workers, args.penalty_mode)
    export_results([stats], args.out, traces=True, timing=args.timing)
    print(f"{stats.algo} on {stats.scenario}: {stats.mean_fitness:.4f} ± {stats.std_fitness:.4f} "
          f"over {stats.runs} runs ({stats.mean_wall_time:.2f} s/run)")
    return EXIT_OK


def cmd_compare(args) -> int:
    _check_algos(args.algo)
    refs = args.scenario or [f"builtin:{n}" for n in BUILTIN_NAMES]
    scenarios = [resolve_scenario(r) for r in refs]
    cfg = _config(args)
    stats = [run_batch(s, a, cfg, args.runs, args.workers, args.penalty_mode) for s in scenarios for a in args.algo]
    export_results(stats, args.out, traces=args.traces, timing=args.timing)
    table = format_table(stats)
    Path(args.out, "table.txt").write_text(table, encoding="utf-8", newline="")
    print(table, end="")
    return EXIT_OK


def cmd_brute(args) -> int:
    scenario = resolve_scenario(args.scenario)
    if args.horizon is not None and args.horizon < 1:
        raise ConfigError(f"--horizon must be >= 1, got {args.horizon}")
    j, path = brute_force_optimum(scenario, args.horizon, args.cap)
    print(f"J* = {j:.6f}")
    print("path: " + " ".join(f"({r},{c})" for r, c in path.cells))
    return EXIT_OK


def cmd_scenario(args) -> int:
    if args.action == "list":
        for name in BUILTIN_NAMES:
            print(f"{name}  {builtin_description(name)}")
    elif args.action == "export":
        Path(args.path).write_text(export_scenario(builtin_scenario(args.name)), encoding="utf-8", newline="")
    elif args.action == "validate":
        s = load_scenario(Path(args.path).read_text(encoding="utf-8"))
        print(f"{args.path}: ok ({s.name}, {s.shape.rows}x{s.shape.cols}, horizon {s.horizon})")
    return EXIT_OK


def _add_experiment_flags(p):
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results")
    p.add_argument("--traces", action="store_true", help="write per-generation convergence CSV")
    p.add_argument("--penalty-mode", action="store_true", help="node PSO scores invalid paths as 0 instead of repairing")
    p.add_argument("--swarm-size", type=int, default=1000)
    p.add_argument("--generations", type=int, default=100)
    p.add_argument("--workers", type=int, default=1, help="threads for fitness evaluation; results do not depend on it")
    p.add_argument("--timing", action="store_true", help="include wall time in summary.csv (breaks byte-reproducibility)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mpsearch", description="Moving-target search path planning.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("run", help="repeated runs of one algorithm on one scenario")
    p.add_argument("--scenario", required=True, help="path to a JSON file or builtin:s1..s6")
    p.add_argument("--algo", required=True)
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="scenarios x algorithms table")
    p.add_argument("--scenario", action="append", default=[])
    p.add_argument("--algo", action="append", default=[])
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("brute", help="exhaustive optimum for small instances")
    p.add_argument("--scenario", required=True)
    p.add_argument("--horizon", type=int)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_brute)

    p = sub.add_parser("scenario", help="list, export or validate scenarios")
    ssub = p.add_subparsers(dest="action", parser_class=_Parser)
    ssub.add_parser("list")
    e = ssub.add_parser("export")
    e.add_argument("name")
    e.add_argument("path")
    v = ssub.add_parser("validate")
    v.add_argument("path")
    p.set_defaults(func=cmd_scenario)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None or (args.command == "scenario" and args.action is None):
            raise UsageError("a command is required")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CapExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_CAP
    except VALIDATION_ERRORS as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
