"""How the achieved distance ratio on the pairing diagonal approaches sqrt(2) as the mesh shrinks.

For the diagonal of R^2 with the swap pairing and f = half the squared norm,
dist(c, A) / sqrt(-inf q(A - c)) equals sqrt(2) exactly. Sampling the
diagonal inflates the distance and deflates the infimum, so the minimum ratio
over probes sits slightly above sqrt(2) and converges as h -> 0.
"""

import argparse

import numpy as np

from ssdkit.builtins import builtin_set, builtin_space
from ssdkit.convex import Quadratic
from ssdkit.vz import distance_bounds_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--probes", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    sp = builtin_space("pairing(1)")
    f = Quadratic.half_norm_sq(2)
    C = np.random.default_rng(args.seed).uniform(-2, 2, (args.probes, 2))
    print(f"{'h':>8} {'points':>7} {'ratio':>12} {'ratio - sqrt2':>14}")
    for h in (0.2, 0.1, 0.05, 0.02, 0.01, 0.005):
        A = builtin_set({"kind": "diagonal", "lo": -3.0, "hi": 3.0, "step": h}, sp)
        ratio = distance_bounds_check(sp, f, C, A)["sharpness"].data["achieved_ratio"]
        print(f"{h:8.3f} {len(A):7d} {ratio:12.8f} {ratio - np.sqrt(2):14.3e}")


if __name__ == "__main__":
    main()
