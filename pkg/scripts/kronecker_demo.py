"""Hitting times of random torus targets by the flow of sqrt(2), sqrt(3), sqrt(5) as delta shrinks."""
import argparse
import math

import numpy as np

from larckit.torus import solve_with_doubling


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--targets", type=int, default=5)
    ap.add_argument("--modes", type=int, default=3, choices=(1, 2, 3))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    xhat = np.array([math.sqrt(p) for p in (2, 3, 5)][:args.modes]) / (2 * math.pi)
    print("target  delta    t              residual   candidates")
    for k in range(args.targets):
        lam = rng.uniform(0, 1, size=args.modes)
        for delta in (1e-1, 3e-2, 1e-2, 3e-3):
            c = solve_with_doubling(xhat, lam, delta)
            print(f"{k:<6}  {delta:<7.0e}  {c.t:<13.6f}  {c.max_residual:.2e}   {c.candidates}")


if __name__ == "__main__":
    main()
