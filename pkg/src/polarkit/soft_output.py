"""Soft-output extraction for node-based list decoding.

Tracks the log-domain mass of every pruned decoding subtree while the
hard-output decoder runs, then turns the surviving list plus that mass
into per-bit APP LLRs and a block reliability estimate.  The accumulator
lambda_T defers the uniform frozen-bit discount: each node shifts the
running value by n_frozen*ln2 so earlier contributions end up weighted
by 2^{-(#frozen bits decoded later)}.
"""

from dataclasses import dataclass

import numpy as np

from .code_model import NodeKind
from .fscl import fscl_decode
from .logdomain import (LLR_MAX, LN2, box_minus, box_plus, box_plus_reduce,
                        check_mode, softplus)
from .scl_core import PathList, f_func, scl_decode

# mass-subtraction guards: survivors can numerically exceed the marginal
SNAP_EPS = 1e-14
DOMAIN_EPS = 1e-6

NEG_INF = float("-inf")


def frz_dec(pms, node, alpha_t, mode="exact", counter=None):
    """Per-parent metric at the node's last frozen level.

    Valid for the high-rate kinds only.  The frozen prefix (plus the
    first information bit when the prefix length is odd-sized 1 or 3)
    occupies the leftmost length-2 or length-4 subspan, reached by
    f-descent alone since every prefix bit is known.  That subspan is a
    Rate0 (2 frozen) or REP (frozen + one marginalized info bit)
    subcode with a closed-form metric.
    """
    pms = np.asarray(pms, dtype=np.float64)
    if node.kind is NodeKind.RATE1:
        return pms.copy()
    if node.kind not in (NodeKind.SPC, NodeKind.TYPE_III, NodeKind.TYPE_IV):
        raise ValueError(f"no frozen-level metric for {node.kind.name} nodes")
    target = 4 if node.kind is NodeKind.TYPE_IV else 2
    a = alpha_t
    while a.shape[1] > target:
        half = a.shape[1] // 2
        a = f_func(a[:, :half], a[:, half:], mode, counter)
    if counter is not None:
        counter.add("add_sub", a.size)
        counter.add("hd_sign", a.size)
    tot = pms + softplus(-a, mode, counter).sum(axis=1)
    if node.kind is not NodeKind.TYPE_III:
        # REP view: marginalize the single info bit of the subspan
        if counter is not None:
            counter.add("add_sub", a.size)
            counter.add("hd_sign", a.shape[0])
        tot = tot - softplus(-a.sum(axis=1), mode, counter)
    return tot


def lambda_update_lowrate(lam, node, disc_pms, mode="exact", counter=None):
    """Fold all discarded candidates of an exhaustively decoded node."""
    shifted = lam - node.n_frozen * LN2
    contrib = box_plus_reduce(-np.asarray(disc_pms, dtype=np.float64),
                              mode, counter)
    return float(box_plus(shifted, contrib, mode, counter))


def lambda_update_highrate(lam, node, pm_fs, surv_pms, mode="exact",
                           counter=None):
    """Unvisited mass of a flip-decoded node: every valid descendant of
    the parents (via the frozen-level marginals) minus the survivors.

    When the survivor count equals parents * 2^{K_s} nothing was pruned
    and the contribution is exactly -inf; the numerical difference is
    then pure rounding noise and must not be trusted.
    """
    pm_fs = np.asarray(pm_fs, dtype=np.float64)
    surv_pms = np.asarray(surv_pms, dtype=np.float64)
    shifted = lam - node.n_frozen * LN2
    if surv_pms.size == pm_fs.size << node.n_info:
        return float(shifted)
    total = box_plus_reduce(-pm_fs, mode, counter)
    kept = box_plus_reduce(-surv_pms, mode, counter)
    if kept - total > DOMAIN_EPS:
        raise ArithmeticError(
            f"survivor mass exceeds the frozen-level marginal by "
            f"{kept - total:.3e}; metrics are inconsistent")
    if total - kept < SNAP_EPS:
        contrib = NEG_INF
    else:
        contrib = box_minus(total, kept, mode, counter)
    return float(box_plus(shifted, contrib, mode, counter))


def lambda_update_highrate_hwf(lam, node, pm_fs, eta, disc_pms, L,
                               counter=None):
    """Subtraction-free variant: parents with no surviving descendant
    contribute their full frozen-level marginal, and the final flip
    round's losers stand in for the rest with weight ln(L-1) each."""
    pm_fs = np.asarray(pm_fs, dtype=np.float64)
    shifted = lam - node.n_frozen * LN2
    inherited = np.zeros(pm_fs.size, dtype=bool)
    inherited[np.asarray(eta, dtype=np.int64)] = True
    orphan = box_plus_reduce(-pm_fs[~inherited], "hwf", counter)
    disc_pms = np.asarray(disc_pms, dtype=np.float64)
    if L > 1 and disc_pms.size:
        wbar = box_plus_reduce(float(np.log(L - 1)) - disc_pms, "hwf", counter)
    else:
        wbar = NEG_INF
    out = box_plus(shifted, orphan, "hwf", counter)
    return float(box_plus(out, wbar, "hwf", counter))


def channel_bit_logprobs(llr_ch, mode="exact", counter=None):
    """Per-bit prior log probabilities ln P(c=0|y), ln P(c=1|y)."""
    llr_ch = np.asarray(llr_ch, dtype=np.float64)
    lam0 = -softplus(-llr_ch, mode, counter)
    if counter is not None:
        counter.add("add_sub", llr_ch.size)
    return lam0, lam0 - llr_ch


def _masked_mass(codewords, pms, bit, mode, counter):
    """Per-position log-sum of e^{-PM} over paths whose codeword bit is
    ``bit``; empty sets give -inf."""
    P, N = codewords.shape
    out = np.full(N, NEG_INF)
    for p in range(P):
        contrib = np.where(codewords[p] == bit, -pms[p], NEG_INF)
        out = box_plus(out, contrib, mode, counter)
    return out


def app_llrs(codewords, pms, lambda_t, llr_ch, mode="exact", use_xi_mod=True,
             counter=None):
    """Per-bit APP LLRs from the surviving list and the pruned mass.

    The pruned mass enters each bit weighted by the channel prior of
    that bit; when the whole list agrees on a bit the prior is replaced
    by max/min of the two hypotheses so the unexplored mass cannot
    overrule a unanimous list (disable with use_xi_mod=False).  Output
    clamped to +-LLR_MAX.
    """
    check_mode(mode)
    codewords = np.asarray(codewords)
    pms = np.asarray(pms, dtype=np.float64)
    llr_ch = np.asarray(llr_ch, dtype=np.float64)
    lam0, lam1 = channel_bit_logprobs(llr_ch, mode, counter)
    m0 = _masked_mass(codewords, pms, 0, mode, counter)
    m1 = _masked_mass(codewords, pms, 1, mode, counter)
    t0 = box_plus(m0, lambda_t + lam0, mode, counter)
    t1 = box_plus(m1, lambda_t + lam1, mode, counter)
    if counter is not None:
        counter.add("add_sub", 3 * llr_ch.size)
    ell = t0 - t1
    if use_xi_mod:
        n1 = (codewords == 1).sum(axis=0)
        n0 = codewords.shape[0] - n1
        vmass = float(box_plus_reduce(-pms, mode, counter))
        lmax = np.maximum(lam0, lam1)
        lmin = np.minimum(lam0, lam1)
        if counter is not None:
            counter.add("compare", llr_ch.size)
        unan0 = box_plus(vmass, lambda_t + lmax, mode, counter) \
            - (lambda_t + lmin)
        unan1 = (lambda_t + lmin) \
            - box_plus(vmass, lambda_t + lmax, mode, counter)
        ell = np.where(n1 == 0, unan0, np.where(n0 == 0, unan1, ell))
    return np.clip(ell, -LLR_MAX, LLR_MAX)


def block_reliability(pms, lambda_t, mode="exact", counter=None):
    """Estimated probability that the lowest-metric path is correct."""
    pms = np.asarray(pms, dtype=np.float64)
    denom = box_plus(box_plus_reduce(-pms, mode, counter), lambda_t,
                     mode, counter)
    return float(np.exp(-pms.min() - denom))


@dataclass
class NodeTrace:
    index: int
    kind: NodeKind
    n_parents: int
    n_discarded: int
    pm_fs: np.ndarray | None
    lambda_after: float


@dataclass
class SoftDecodeResult:
    paths: PathList
    app_llrs: np.ndarray
    lambda_t: float
    gamma_star: float
    traces: list | None = None


def so_fscl_decode(llrs, spec, L, mode="exact", use_xi_mod=True, counter=None,
                   collect_trace=False):
    """Node-based list decode plus APP LLR extraction.

    The soft side runs as an observer of the hard decoder: survivor
    lists and PMs are bitwise those of fscl_decode with the same
    arguments.
    """
    check_mode(mode)
    state = {"lam": NEG_INF}
    traces = [] if collect_trace else None

    def hook(node, idx, alpha_t, outcome, pms_before):
        pm_fs = None
        if node.kind in (NodeKind.RATE0, NodeKind.REP, NodeKind.TYPE_I,
                         NodeKind.TYPE_II):
            # exhaustive kinds: disc_pms lists every rejected candidate
            state["lam"] = lambda_update_lowrate(
                state["lam"], node, outcome.disc_pms, mode, counter)
        else:
            pm_fs = frz_dec(pms_before, node, alpha_t, mode, counter)
            if mode == "hwf":
                state["lam"] = lambda_update_highrate_hwf(
                    state["lam"], node, pm_fs, outcome.eta, outcome.disc_pms,
                    L, counter)
            else:
                state["lam"] = lambda_update_highrate(
                    state["lam"], node, pm_fs, outcome.pms, mode, counter)
        if traces is not None:
            traces.append(NodeTrace(idx, node.kind, pms_before.size,
                                    outcome.disc_pms.size, pm_fs,
                                    state["lam"]))

    paths = fscl_decode(llrs, spec, L, mode, counter, soft_hook=hook)
    lam = state["lam"]
    ell = app_llrs(paths.codewords, paths.pms, lam, llrs, mode, use_xi_mod,
                   counter)
    gamma = block_reliability(paths.pms, lam, mode, counter)
    return SoftDecodeResult(paths, ell, lam, gamma, traces)


def so_scl_decode(llrs, spec, L, mode="exact", use_xi_mod=True, counter=None):
    """Bit-by-bit list decode with the same soft-output extraction.

    lambda_T is accumulated at discard time with the frozen discount
    applied up front; the APP assembly is shared with so_fscl_decode.
    """
    paths, lam = scl_decode(llrs, spec, L, mode=mode, track_soft=True,
                            counter=counter)
    ell = app_llrs(paths.codewords, paths.pms, lam, llrs, mode, use_xi_mod,
                   counter)
    gamma = block_reliability(paths.pms, lam, mode, counter)
    return SoftDecodeResult(paths, ell, lam, gamma, None)
