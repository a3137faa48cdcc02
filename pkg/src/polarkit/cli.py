"""Command-line front end.

Subcommands: construct, encode, decode, simulate, calibrate, latency,
opcount, product-sim.  Code specs travel as key=value text files
(written by `construct --out`, read back with `--code-file`);
reliability sequences as text files with one 1-based index per line,
least reliable first, the last K lines forming the information set.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import analysis, harness
from .code_model import (DynFrozenCfg, build_code, encode_info,
                         load_reliability_sequence, load_spec, spec_to_text)

G7 = (1, 0, 1, 1, 0, 1, 1)


def _parse_fd(text):
    if text is None:
        return None  # static frozen bits
    f_d = None if text == "inf" else int(text)
    return DynFrozenCfg(mode="convolutional", g=G7, f_d=f_d)


def _spec_from_args(args):
    if getattr(args, "code_file", None):
        return load_spec(args.code_file)
    if args.n is None or args.k is None:
        raise SystemExit("need --code-file or both --n and --k")
    order = (load_reliability_sequence(args.rel_seq, args.n)
             if args.rel_seq else None)
    return build_code(args.n, args.k, reliability_order=order,
                      dyn=_parse_fd(args.fd))


def _write_or_print(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_code_args(p):
    p.add_argument("--code-file", help="spec file written by construct")
    p.add_argument("--n", type=int, help="block length (power of two)")
    p.add_argument("--k", type=int, help="information length")
    p.add_argument("--rel-seq", help="reliability file, 1-based, least first")
    p.add_argument("--fd", metavar="F_D",
                   help="dynamic frozen bits: per-node cap or 'inf' "
                        "(omit flag for static zeros)")


def _add_dec_args(p, fscl_ok=True):
    choices = ["so_fscl", "so_scl"] + (["fscl", "pyndiah"] if fscl_ok else [])
    p.add_argument("--decoder", default="so_fscl", choices=choices)
    p.add_argument("--list-size", type=int, default=2, metavar="L")
    p.add_argument("--mode", default="exact", choices=["exact", "hwf"])
    p.add_argument("--no-xi-mod", action="store_true",
                   help="disable the one-sided APP fallback")


def cmd_construct(args):
    spec = _spec_from_args(args)
    _write_or_print(spec_to_text(spec), args.out)
    return 0


def cmd_encode(args):
    spec = _spec_from_args(args)
    bits = np.loadtxt(args.infile, dtype=np.int64, ndmin=1)
    if bits.shape != (spec.K,):
        raise SystemExit(f"expected {spec.K} information bits")
    c = encode_info(bits.astype(np.uint8), spec)
    _write_or_print("\n".join(str(int(b)) for b in c) + "\n", args.out)
    return 0


def cmd_decode(args):
    spec = _spec_from_args(args)
    llrs = np.loadtxt(args.llr_file, dtype=float, ndmin=1)
    if llrs.shape != (spec.N,):
        raise SystemExit(f"LLR file must hold {spec.N} values")
    chat, res = harness.decode_block(llrs, spec, args.list_size, args.decoder,
                                     args.mode, not args.no_xi_mod)
    print(f"decoder={args.decoder}")
    print(f"mode={args.mode}")
    print(f"decision={''.join(str(int(b)) for b in chat)}")
    if res is not None:
        print(f"lambda_t={res.lambda_t!r}")
        print(f"gamma_star={res.gamma_star!r}")
        if args.out:
            _write_or_print(
                "\n".join(f"{x:.12g}" for x in res.app_llrs) + "\n", args.out)
    elif args.out:
        _write_or_print("\n".join(str(int(b)) for b in chat) + "\n", args.out)
    return 0


def cmd_simulate(args):
    spec = _spec_from_args(args)
    cfg = harness.SimConfig(
        spec, decoder=args.decoder, mode=args.mode, L=args.list_size,
        channel=args.channel, ebn0_grid=tuple(args.ebn0),
        min_block_errors=args.min_block_errors, max_blocks=args.max_blocks,
        seed=args.seed, use_xi_mod=not args.no_xi_mod, out_path=args.out)
    stats = harness.run_trials(cfg)
    if not args.out:
        sys.stdout.write(harness.stats_csv(stats))
    return 0


def cmd_calibrate(args):
    spec = _spec_from_args(args)
    cfg = harness.SimConfig(
        spec, decoder=args.decoder, mode=args.mode, L=args.list_size,
        ebn0_grid=(args.ebn0,), seed=args.seed,
        use_xi_mod=not args.no_xi_mod)
    bins = harness.calibration_run(
        cfg, max_blocks=args.blocks,
        tracked=tuple(args.tracked or ()), min_tracked=args.min_tracked)
    lines = ["exponent,blocks,mean_approx,empirical_bler"]
    for j in sorted(bins):
        b = bins[j]
        lines.append(f"{j:g},{b.blocks},{b.mean_approx:.6g},"
                     f"{b.empirical_bler:.6g}")
    _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


def cmd_latency(args):
    spec = _spec_from_args(args)
    if args.npar:
        rep = analysis.latency_constrained(spec, args.list_size, args.decoder,
                                           args.npar)
    else:
        rep = analysis.latency_unlimited(spec, args.list_size, args.decoder)
    print(analysis.format_report(rep))
    if args.out:
        _write_or_print(analysis.reports_csv([rep]), args.out)
    return 0


def cmd_opcount(args):
    spec = _spec_from_args(args)
    rng = np.random.default_rng(args.seed)
    from .channel import ChannelCfg, channel_llr, transmit
    ch = ChannelCfg("awgn", args.ebn0, spec.K / spec.N)
    info = rng.integers(0, 2, spec.K, dtype=np.uint8)
    llrs = channel_llr(transmit(encode_info(info, spec), ch, rng), ch)
    rep = analysis.op_count_run(llrs, spec, args.list_size,
                                decoder=args.decoder, mode=args.mode)
    print(analysis.format_report(rep))
    if args.out:
        _write_or_print(analysis.reports_csv([rep]), args.out)
    return 0


def cmd_product_sim(args):
    spec = _spec_from_args(args)
    cfg = harness.ProductCodeCfg(
        spec, L=args.list_size, i_bp=args.iters, weight=args.weight,
        decoder=args.decoder, mode=args.mode,
        use_xi_mod=not args.no_xi_mod)
    st = harness.product_run(cfg, args.ebn0, seed=args.seed,
                             min_block_errors=args.min_block_errors,
                             max_blocks=args.max_blocks)
    text = harness.stats_csv([st])
    _write_or_print(text, args.out)
    if args.out:
        sys.stdout.write(text)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="polarkit",
                                 description="polar-code decoding toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code spec file")
    _add_code_args(p)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_construct)

    p = sub.add_parser("encode", help="encode one information block")
    _add_code_args(p)
    p.add_argument("infile", help="information bits, one per line")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("decode", help="decode one block from an LLR file")
    _add_code_args(p)
    _add_dec_args(p)
    p.add_argument("llr_file", help="one decimal per line, length N")
    p.add_argument("--out", help="write APP LLRs (soft) or bits (hard)")
    p.set_defaults(fn=cmd_decode)

    p = sub.add_parser("simulate", help="Monte Carlo BER/BLER sweep")
    _add_code_args(p)
    _add_dec_args(p)
    p.add_argument("--ebn0", type=float, nargs="+", required=True)
    p.add_argument("--channel", default="awgn",
                   choices=["awgn", "rayleigh"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-block-errors", type=int, default=500)
    p.add_argument("--max-blocks", type=int, default=10_000_000)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("calibrate", help="soft-output calibration bins")
    _add_code_args(p)
    _add_dec_args(p, fscl_ok=False)
    p.add_argument("--ebn0", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--blocks", type=int, default=20000)
    p.add_argument("--tracked", type=float, nargs="*",
                   help="bin exponents that must reach --min-tracked")
    p.add_argument("--min-tracked", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_calibrate)

    p = sub.add_parser("latency", help="deterministic time-step model")
    _add_code_args(p)
    p.add_argument("--decoder", default="so_fscl",
                   choices=["so_fscl", "so_scl", "fscl"])
    p.add_argument("--list-size", type=int, default=2, metavar="L")
    p.add_argument("--npar", type=int, default=0,
                   help="parallel-op budget (0 = unlimited)")
    p.add_argument("--out", help="CSV path")
    p.set_defaults(fn=cmd_latency)

    p = sub.add_parser("opcount", help="instrumented operation counts")
    _add_code_args(p)
    p.add_argument("--decoder", default="so_fscl",
                   choices=["so_fscl", "so_scl", "fscl"])
    p.add_argument("--list-size", type=int, default=2, metavar="L")
    p.add_argument("--mode", default="exact", choices=["exact", "hwf"])
    p.add_argument("--ebn0", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path")
    p.set_defaults(fn=cmd_opcount)

    p = sub.add_parser("product-sim", help="iterative product-code BER")
    _add_code_args(p)
    _add_dec_args(p, fscl_ok=False)
    p.add_argument("--ebn0", type=float, required=True)
    p.add_argument("--iters", type=int, default=20, metavar="I_BP")
    p.add_argument("--weight", type=float, default=0.4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-block-errors", type=int, default=200)
    p.add_argument("--max-blocks", type=int, default=100_000)
    p.add_argument("--out", help="CSV path")
    p.set_defaults(fn=cmd_product_sim)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
