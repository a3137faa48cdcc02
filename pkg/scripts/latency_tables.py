"""Decoding time-step tables for the three standard code sizes.

Prints the unlimited-parallelism step counts for the bit-level and
node-based soft-output decoders (and the hard node decoder) at
L in {2, 4, 8}, then the budget-constrained counts for the node-based
soft decoder at L = 4.
"""

import argparse

from polarkit.analysis import latency_constrained, latency_unlimited
from polarkit.code_model import build_code

SIZES = ((256, 85), (512, 256), (1024, 512))
DECODERS = ("so_scl", "so_fscl", "fscl")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--budgets", type=int, nargs="+",
                    default=[8, 32, 128],
                    help="parallel node-computation budgets N_par")
    args = ap.parse_args()

    print("unlimited parallelism")
    print(f"{'code':12s} {'decoder':8s}   L=2   L=4   L=8")
    for n, k in SIZES:
        spec = build_code(n, k)
        for dec in DECODERS:
            steps = [latency_unlimited(spec, L, dec).total_steps
                     for L in (2, 4, 8)]
            print(f"{f'({n},{k})':12s} {dec:8s} "
                  + " ".join(f"{s:5d}" for s in steps))

    print()
    print("budget-constrained, so_fscl, L=4")
    print(f"{'code':12s} " + " ".join(f"N_par={b:<4d}" for b in args.budgets))
    for n, k in SIZES:
        spec = build_code(n, k)
        steps = [latency_constrained(spec, 4, "so_fscl", b).total_steps
                 for b in args.budgets]
        print(f"{f'({n},{k})':12s} " + " ".join(f"{s:9d} " for s in steps))


if __name__ == "__main__":
    main()
