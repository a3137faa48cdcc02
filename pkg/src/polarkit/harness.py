"""Monte Carlo BER/BLER harness, soft-output calibration, and a polar
product-code application.

BER is counted over codeword bits: APP decoders decide each bit by the
sign of its APP LLR, hard-output decoders emit the best surviving
codeword, and a block error is any bit mismatch within the block.
Confidence intervals are Wald half-widths at 95%; raw counts are kept
in the stats so other interval constructions can be recomputed.

Every trial draws from np.random.default_rng((seed, trial_index)), so
results do not depend on batching or on where the stop rule fires.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .channel import ChannelCfg, channel_llr, transmit
from .code_model import dynamic_frozen_value, encode, encode_info
from .fscl import fscl_decode
from .logdomain import LLR_MAX
from .soft_output import so_fscl_decode, so_scl_decode

CSV_HEADER = "ebn0_db,blocks,block_errors,bits,bit_errors,ber,bler,ci_ber,ci_bler,seconds"

_Z95 = 1.959963984540054

DECODERS = ("so_fscl", "so_scl", "fscl", "pyndiah")


def wald_halfwidth(errors, n):
    """95% normal-approximation half-width for a proportion."""
    if n <= 0:
        return 0.0
    p = errors / n
    return _Z95 * np.sqrt(max(p * (1.0 - p), 0.0) / n)


@dataclass
class SimConfig:
    spec: object
    decoder: str = "so_fscl"
    mode: str = "exact"
    L: int = 2
    channel: str = "awgn"
    ebn0_grid: tuple = (1.5, 2.0)
    min_block_errors: int = 500
    max_blocks: int = 10_000_000
    seed: int = 0
    use_xi_mod: bool = True
    out_path: str | None = None

    def __post_init__(self):
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder: {self.decoder!r}")
        if len(tuple(self.ebn0_grid)) == 0:
            raise ValueError("ebn0_grid must be nonempty")
        if self.min_block_errors < 1 or self.max_blocks < 1:
            raise ValueError("stop rule must be positive")


@dataclass
class TrialStats:
    ebn0_db: float
    blocks: int
    block_errors: int
    bits: int
    bit_errors: int
    seconds: float

    @property
    def ber(self):
        return self.bit_errors / self.bits if self.bits else 0.0

    @property
    def bler(self):
        return self.block_errors / self.blocks if self.blocks else 0.0

    @property
    def ci_ber(self):
        return wald_halfwidth(self.bit_errors, self.bits)

    @property
    def ci_bler(self):
        return wald_halfwidth(self.block_errors, self.blocks)

    def csv_row(self):
        return (f"{self.ebn0_db:g},{self.blocks},{self.block_errors},"
                f"{self.bits},{self.bit_errors},{self.ber:.6g},"
                f"{self.bler:.6g},{self.ci_ber:.6g},{self.ci_bler:.6g},"
                f"{self.seconds:.3f}")


def stats_csv(stats):
    return "\n".join([CSV_HEADER] + [s.csv_row() for s in stats]) + "\n"


def write_csv(stats, path):
    with open(path, "w") as fh:
        fh.write(stats_csv(stats))


def decode_block(llrs, spec, L, decoder="so_fscl", mode="exact",
                 use_xi_mod=True):
    """One block decode; returns (codeword decision, soft result or None)."""
    if decoder == "fscl":
        paths = fscl_decode(llrs, spec, L, mode=mode)
        return paths.codewords[paths.best_index()].astype(np.uint8), None
    if decoder == "pyndiah":
        paths = fscl_decode(llrs, spec, L, mode=mode)
        ell = pyndiah_baseline(paths.codewords, paths.pms, llrs)
        return (ell < 0).astype(np.uint8), None
    fn = so_fscl_decode if decoder == "so_fscl" else so_scl_decode
    res = fn(llrs, spec, L, mode=mode, use_xi_mod=use_xi_mod)
    return (res.app_llrs < 0).astype(np.uint8), res


def run_trials(cfg):
    """Simulate each grid point until the stop rule fires.

    Returns one TrialStats per Eb/N0 point, in grid order, and writes
    the CSV when cfg.out_path is set.
    """
    spec = cfg.spec
    rate = spec.K / spec.N
    out = []
    for ebn0 in cfg.ebn0_grid:
        ch = ChannelCfg(cfg.channel, float(ebn0), rate)
        t0 = time.perf_counter()
        blocks = block_errors = bit_errors = bits = 0
        trial = 0
        while blocks < cfg.max_blocks and block_errors < cfg.min_block_errors:
            rng = np.random.default_rng((cfg.seed, trial))
            trial += 1
            info = rng.integers(0, 2, spec.K, dtype=np.uint8)
            c = encode_info(info, spec)
            obs = transmit(c, ch, rng)
            llrs = channel_llr(obs, ch)
            chat, _ = decode_block(llrs, spec, cfg.L, cfg.decoder, cfg.mode,
                                   cfg.use_xi_mod)
            wrong = int(np.count_nonzero(chat != c))
            blocks += 1
            bits += spec.N
            bit_errors += wrong
            block_errors += wrong > 0
        out.append(TrialStats(float(ebn0), blocks, block_errors, bits,
                              bit_errors, time.perf_counter() - t0))
    if cfg.out_path:
        write_csv(out, cfg.out_path)
    return out


@dataclass
class CalibrationBin:
    exponent: float
    blocks: int = 0
    approx_sum: float = 0.0
    errors: int = 0

    @property
    def mean_approx(self):
        return self.approx_sum / self.blocks if self.blocks else 0.0

    @property
    def empirical_bler(self):
        return self.errors / self.blocks if self.blocks else 0.0


def calibration_run(cfg, bin_exponents=(1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0),
                    max_blocks=20000, tracked=(), min_tracked=0,
                    cap_blocks=None):
    """Bin blocks by 1 - Gamma* and record the empirical BLER per bin.

    A block with 1 - Gamma* inside [10^(-j-0.1), 10^(-j+0.1)) lands in
    bin j; the block counts as an error when the best surviving path
    differs from the transmitted codeword.  Blocks with Gamma* = 1
    land in a degenerate bin keyed by +inf.  Empty bins are omitted
    from the result.

    The run stops at max_blocks, but keeps going (up to cap_blocks)
    while any exponent listed in `tracked` has fewer than min_tracked
    blocks, so sparse gated bins can be filled deliberately.
    """
    if cfg.decoder not in ("so_fscl", "so_scl"):
        raise ValueError("calibration needs a soft-output decoder")
    spec = cfg.spec
    ch = ChannelCfg(cfg.channel, float(cfg.ebn0_grid[0]), spec.K / spec.N)
    if cap_blocks is None:
        cap_blocks = 5 * max_blocks
    bins = {}
    lo = {j: 10.0 ** (-j - 0.1) for j in bin_exponents}
    hi = {j: 10.0 ** (-j + 0.1) for j in bin_exponents}

    def unfilled():
        return any(bins.get(j) is None or bins[j].blocks < min_tracked
                   for j in tracked)

    blocks = 0
    trial = 0
    while blocks < max_blocks or (min_tracked and unfilled()
                                  and blocks < cap_blocks):
        rng = np.random.default_rng((cfg.seed, trial))
        trial += 1
        info = rng.integers(0, 2, spec.K, dtype=np.uint8)
        c = encode_info(info, spec)
        llrs = channel_llr(transmit(c, ch, rng), ch)
        _, res = decode_block(llrs, spec, cfg.L, cfg.decoder, cfg.mode,
                              cfg.use_xi_mod)
        u = 1.0 - res.gamma_star
        blocks += 1
        if u <= 0.0:
            key = float("inf")
        else:
            key = None
            for j in bin_exponents:
                if lo[j] <= u < hi[j]:
                    key = j
                    break
            if key is None:
                continue
        b = bins.setdefault(key, CalibrationBin(key))
        best = res.paths.codewords[res.paths.best_index()]
        b.blocks += 1
        b.approx_sum += max(u, 0.0)
        b.errors += int(np.any(best != c))
    return bins


def pyndiah_baseline(codewords, pms, llr_ch=None, saturation=None):
    """List-based APP LLRs: per bit, the metric gap between the best
    codeword carrying 0 and the best carrying 1.

    When one side is absent from the list the LLR falls back to
    +-saturation; the default saturation is the largest two-sided
    margin present in the list, capped at LLR_MAX.
    """
    cw = np.asarray(codewords)
    pms = np.asarray(pms, dtype=float)
    if cw.ndim != 2 or cw.shape[0] == 0:
        raise ValueError("candidate list must be nonempty")
    m0 = np.where(cw == 0, pms[:, None], np.inf).min(axis=0)
    m1 = np.where(cw == 1, pms[:, None], np.inf).min(axis=0)
    both = np.isfinite(m0) & np.isfinite(m1)
    diff = np.where(both, m1 - m0, 0.0)
    if saturation is None:
        mags = np.abs(diff[both])
        saturation = float(min(LLR_MAX, mags.max())) if mags.size else LLR_MAX
    ell = np.where(both, diff, np.where(np.isfinite(m0),
                                        saturation, -saturation))
    return np.clip(ell, -LLR_MAX, LLR_MAX)


@dataclass
class ProductCodeCfg:
    spec: object  # component code (N_c, K_c)
    L: int = 4
    i_bp: int = 20
    weight: float = 0.4
    decoder: str = "so_fscl"
    mode: str = "exact"
    use_xi_mod: bool = True

    def __post_init__(self):
        if not 0.0 < self.weight <= 1.0:
            raise ValueError("weight must be in (0, 1]")
        if self.i_bp < 1:
            raise ValueError("i_bp must be >= 1")
        if self.decoder not in ("so_fscl", "so_scl"):
            raise ValueError("product decoding needs a soft-output decoder")


def product_encode(info, cfg):
    """K_c x K_c info matrix -> N_c x N_c array; every row and every
    column of the result is a component codeword."""
    spec = cfg.spec
    info = np.asarray(info, dtype=np.uint8)
    if info.shape != (spec.K, spec.K):
        raise ValueError(f"info must be {spec.K}x{spec.K}")
    rows = np.stack([encode_info(info[i], spec) for i in range(spec.K)])
    return np.stack([encode_info(rows[:, j], spec)
                     for j in range(spec.N)], axis=1)


def codeword_ok(c, spec):
    """True when c satisfies every frozen constraint of the component."""
    u = encode(np.asarray(c, dtype=np.uint8))
    for i in np.flatnonzero(spec.is_frozen):
        if u[i] != dynamic_frozen_value(u[:i], int(i), spec):
            return False
    return True


def _extract_info(c_matrix, spec):
    # invert the two encoding passes; row decode then column decode
    info_idx = np.flatnonzero(~spec.is_frozen)
    w = encode(np.asarray(c_matrix, dtype=np.uint8))[:, info_idx]
    cols = [encode(w[:, j])[info_idx] for j in range(info_idx.size)]
    return np.stack(cols, axis=1)


def product_decode(chan_llrs, cfg):
    """Iterative row/column soft decoding with scaled extrinsic exchange.

    Each half-iteration decodes all rows (or columns) with input
    channel LLR + weight * extrinsic from the other dimension, where
    extrinsic = APP output - decoder input.  Stops early once the hard
    decisions form valid codewords in both dimensions.
    """
    spec = cfg.spec
    n = spec.N
    chan_llrs = np.asarray(chan_llrs, dtype=float)
    if chan_llrs.shape != (n, n):
        raise ValueError(f"channel LLRs must be {n}x{n}")
    fn = so_fscl_decode if cfg.decoder == "so_fscl" else so_scl_decode

    def pass_dim(block_in, axis):
        app = np.empty_like(block_in)
        for k in range(n):
            vec = block_in[k] if axis == 0 else block_in[:, k]
            res = fn(vec, spec, cfg.L, mode=cfg.mode,
                     use_xi_mod=cfg.use_xi_mod)
            if axis == 0:
                app[k] = res.app_llrs
            else:
                app[:, k] = res.app_llrs
        return app

    ext_cols = np.zeros_like(chan_llrs)
    iters = 0
    chat = (chan_llrs < 0).astype(np.uint8)
    for iters in range(1, cfg.i_bp + 1):
        in_rows = chan_llrs + cfg.weight * ext_cols
        app_rows = pass_dim(in_rows, axis=0)
        ext_rows = app_rows - in_rows
        in_cols = chan_llrs + cfg.weight * ext_rows
        app_cols = pass_dim(in_cols, axis=1)
        ext_cols = app_cols - in_cols
        chat = (app_cols < 0).astype(np.uint8)
        rows_ok = all(codeword_ok(chat[i], spec) for i in range(n))
        if rows_ok and all(codeword_ok(chat[:, j], spec) for j in range(n)):
            break
    return _extract_info(chat, spec), iters


def product_run(cfg, ebn0_db, seed=0, min_block_errors=200,
                max_blocks=100_000, channel="awgn"):
    """Monte Carlo over product-code blocks; stats count info bits."""
    spec = cfg.spec
    k2 = spec.K * spec.K
    rate = k2 / (spec.N * spec.N)
    ch = ChannelCfg(channel, float(ebn0_db), rate)
    t0 = time.perf_counter()
    blocks = block_errors = bit_errors = bits = 0
    trial = 0
    while blocks < max_blocks and block_errors < min_block_errors:
        rng = np.random.default_rng((seed, trial))
        trial += 1
        info = rng.integers(0, 2, (spec.K, spec.K), dtype=np.uint8)
        c = product_encode(info, cfg)
        llrs = channel_llr(transmit(c, ch, rng), ch)
        info_hat, _ = product_decode(llrs, cfg)
        wrong = int(np.count_nonzero(info_hat != info))
        blocks += 1
        bits += k2
        bit_errors += wrong
        block_errors += wrong > 0
    return TrialStats(float(ebn0_db), blocks, block_errors, bits,
                      bit_errors, time.perf_counter() - t0)
