"""Central blocks of the truncated Jaynes-Cummings model and their Lie algebras."""
import argparse

from larckit.blocks import block_lie_closure
from larckit.models import make_jaynes_cummings


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cutoff", type=int, default=6)
    ap.add_argument("--omega", type=float, nargs=3, default=(1.0, 1.3, 0.7),
                    metavar=("ATOM", "CAVITY", "COUPLING"))
    args = ap.parse_args()
    for cutoff in range(1, args.cutoff + 1):
        rep = block_lie_closure(make_jaynes_cummings(*args.omega, cutoff))
        dims = rep.decomposition.block_dims
        su = [b["derived_dim"] for b in rep.per_block]
        print(f"cutoff {cutoff}: blocks {dims}  algebra dim {rep.algebra_dim}  su parts {su}  "
              f"with sigma_1: {rep.full_dim}/{rep.ambient_dim}")


if __name__ == "__main__":
    main()
