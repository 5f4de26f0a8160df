"""Command-line entry point: ``ssdkit run | list | describe | check``.

Exit codes: 0 when every row passes or is not falsified, 1 when any row
fails, 2 on configuration or input errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .builtins import builtin_space, list_builtins
from .errors import ConfigError, SSDError, UnknownBuiltin
from .report import Check, CheckReport
from .anchors import ref
from .scenario import SUITES, bundled_names, describe, load_scenario, run_scenario
from .sets import min_pairwise_q, read_points_csv
from .space import EPS_Q

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _workers(arg: int | None) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("SSDKIT_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"SSDKIT_WORKERS must be an integer, got {env!r}", key="SSDKIT_WORKERS") from None
    return 1


def cmd_run(args) -> int:
    sc = load_scenario(args.scenario, seed=args.seed)
    report = run_scenario(sc, workers=_workers(args.workers))
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(report.table())
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_list(args) -> int:
    print(list_builtins())
    print("scenarios:")
    for name in bundled_names():
        print(f"  {name}")
    print("suites:")
    print("  " + ", ".join(SUITES))
    return EXIT_OK


def cmd_describe(args) -> int:
    print(describe(args.name))
    return EXIT_OK


def cmd_check_q_positive(args) -> int:
    space = builtin_space(args.space)
    pts = read_points_csv(args.points, space.dim)
    value, i, j = min_pairwise_q(space, pts)
    viol = -value if value != float("inf") else float("-inf")
    wit = [pts[i].tolist(), pts[j].tolist()] if viol > args.tol else None
    report = CheckReport("q-positive")
    report.add(Check.measure("q_positive", ref("qpos"), viol, args.tol, witness=wit,
                             points=int(pts.shape[0]), min_q=value, space=space.name))
    sys.stdout.write(report.to_json(include_wall_time=False))
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ssdkit", description="Verification suites for SSD spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario file or bundled scenario")
    r.add_argument("scenario", help="path to a .toml scenario or a bundled scenario name")
    r.add_argument("--out", help="write the JSON report here and print a table")
    r.add_argument("--seed", type=int, default=None, help="override the scenario seed (default 42)")
    r.add_argument("--workers", type=int, default=None, help="thread pool size (env SSDKIT_WORKERS)")
    r.set_defaults(func=cmd_run)

    ls = sub.add_parser("list", help="list builtin spaces, sets, scenarios and suites")
    ls.set_defaults(func=cmd_list)

    d = sub.add_parser("describe", help="describe a bundled scenario, suite, space or set")
    d.add_argument("name")
    d.set_defaults(func=cmd_describe)

    c = sub.add_parser("check", help="one-off checks")
    csub = c.add_subparsers(dest="check", required=True)
    qp = csub.add_parser("q-positive", help="exhaustive pair scan of a CSV point set")
    qp.add_argument("--space", required=True, help="builtin space, e.g. pairing(1)")
    qp.add_argument("--points", required=True, help="CSV file, one point per row")
    qp.add_argument("--tol", type=float, default=EPS_Q)
    qp.set_defaults(func=cmd_check_q_positive)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UnknownBuiltin) as e:
        print(f"ssdkit: error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (SSDError, OSError) as e:
        print(f"ssdkit: error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
