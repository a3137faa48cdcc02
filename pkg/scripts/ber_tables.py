"""Error-rate comparison across decoder variants at the (512, 256) point.

Runs the dynamic-frozen code through the exact and hardware-friendly
soft-output node decoders (plus the unanimous-fallback ablation) over an
Eb/N0 grid and writes one CSV per arm in the harness format.

Example:
    python3 scripts/ber_tables.py --out-dir results --min-block-errors 500
"""

import argparse
import pathlib

from polarkit.code_model import DynFrozenCfg, build_code
from polarkit.harness import SimConfig, run_trials, write_csv

G7 = (1, 0, 1, 1, 0, 1, 1)

ARMS = (
    # name, mode, f_d, use_xi_mod
    ("exact", "exact", None, True),
    ("exact_noxi", "exact", None, False),
    ("hwf_fd3", "hwf", 3, True),
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--ebn0", type=float, nargs="+",
                    default=[1.5, 2.0, 2.5, 3.0])
    ap.add_argument("--list-size", type=int, default=2)
    ap.add_argument("--min-block-errors", type=int, default=500)
    ap.add_argument("--max-blocks", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, mode, f_d, xi in ARMS:
        spec = build_code(512, 256,
                          dyn=DynFrozenCfg(mode="convolutional", g=G7,
                                           f_d=f_d))
        cfg = SimConfig(spec, decoder="so_fscl", mode=mode,
                        L=args.list_size, ebn0_grid=tuple(args.ebn0),
                        min_block_errors=args.min_block_errors,
                        max_blocks=args.max_blocks, seed=args.seed,
                        use_xi_mod=xi)
        stats = run_trials(cfg)
        path = out_dir / f"ber_{name}_L{args.list_size}.csv"
        write_csv(stats, path)
        for s in stats:
            print(f"{name} {s.ebn0_db} dB: ber {s.ber:.4e} "
                  f"bler {s.bler:.4e} ({s.block_errors} block errors)")


if __name__ == "__main__":
    main()
