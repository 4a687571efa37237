"""Trotter and commutator product-formula errors for random Hermitian pairs, written as CSV."""
import argparse
import csv
import sys

import numpy as np

from larckit.cli import product_formula_curve
from larckit.linop import random_hermitian


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=10)
    ap.add_argument("--max-dim", type=int, default=8)
    ap.add_argument("--max-power", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["pair", "dim", "n", "trotter_error", "commutator_error"])
    for p in range(args.pairs):
        d = int(rng.integers(2, args.max_dim + 1))
        a, b = random_hermitian(d, rng), random_hermitian(d, rng)
        for n, te, ce in product_formula_curve(a, b, args.max_power):
            w.writerow([p, d, n, f"{te:.6e}", f"{ce:.6e}"])


if __name__ == "__main__":
    main()
