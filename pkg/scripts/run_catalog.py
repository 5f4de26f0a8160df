"""Run every bundled scenario and write one JSON report per scenario."""

import argparse
import time
from pathlib import Path

from ssdkit.scenario import bundled_names, load_scenario, run_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="reports", help="output directory")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in bundled_names():
        t0 = time.perf_counter()
        report = run_scenario(load_scenario(name, seed=args.seed), workers=args.workers)
        (out / f"{name}.json").write_text(report.to_json(), encoding="utf-8")
        status = "pass" if report.passed else "FAIL"
        print(f"{name:<22} {status:<5} {len(report.checks):>3} rows  {time.perf_counter() - t0:6.2f}s")


if __name__ == "__main__":
    main()
