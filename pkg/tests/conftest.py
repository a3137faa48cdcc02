"""Shared reference implementations for the test suite.

Everything here is deliberately independent of the package internals:
brute-force codebook enumeration, prefix-mass list replay, and a
sequential bit-by-bit node decoder.  Tests compare the fast paths
against these.
"""

import numpy as np

from polarkit.code_model import build_code, dynamic_frozen_value, encode, encode_info
from polarkit.logdomain import LLR_MAX, LN2
from polarkit.scl_core import f_func, g_func
from polarkit.logdomain import softplus


def logsumexp(v):
    v = np.asarray(v, dtype=np.float64)
    if v.size == 0:
        return -np.inf
    m = v.max()
    if np.isneginf(m):
        return -np.inf
    return float(m + np.log(np.exp(v - m).sum()))


def full_codebook(spec):
    """All 2^K codewords (rows) and the matching messages."""
    K = spec.K
    msgs = ((np.arange(2 ** K)[:, None] >> np.arange(K - 1, -1, -1)) & 1
            ).astype(np.int8)
    if spec.dyn.mode == "static_zero":
        u = np.zeros((msgs.shape[0], spec.N), dtype=np.int8)
        u[:, spec.info_set] = msgs
        return encode(u), msgs
    return np.array([encode_info(m, spec) for m in msgs]), msgs


def map_llrs(llrs, cb):
    """Exact per-bit APP LLRs by full-codebook enumeration."""
    pm = np.log1p(np.exp(-np.abs(llrs))).sum() \
        + np.where(cb == (llrs < 0), 0.0, np.abs(llrs)).sum(axis=1)
    m0 = np.array([logsumexp(np.where(cb[:, j] == 0, -pm, -np.inf))
                   for j in range(cb.shape[1])])
    m1 = np.array([logsumexp(np.where(cb[:, j] == 1, -pm, -np.inf))
                   for j in range(cb.shape[1])])
    return np.clip(m0 - m1, -LLR_MAX, LLR_MAX)


def prefix_logmass(llrs):
    """lm[d][p]: ln sum of e^{-PM_N} over all extensions of prefix p
    (depth d+1).  Pure algebraic identity of the butterfly metric, valid
    for any frozen-bit convention."""
    N = llrs.size
    U = ((np.arange(1 << N)[:, None] >> np.arange(N - 1, -1, -1)) & 1
         ).astype(np.int8)
    C = encode(U)
    logm = -np.logaddexp(0.0, -(1.0 - 2.0 * C) * llrs).sum(axis=1)
    out = []
    for d in range(N):
        block = logm.reshape(1 << (d + 1), -1)
        m = block.max(axis=1)
        out.append(m + np.log(np.exp(block - m[:, None]).sum(axis=1)))
    return out


def ref_scl_replay(llrs, spec, L):
    """Independent list-decode replay.

    Path metrics come from the prefix-mass table instead of running
    softplus updates, so agreement checks both the metric recursion and
    the pruning bookkeeping.  Returns (u rows, pms, lambda_ref) with
    lambda_ref the weighted discarded-prefix sum.
    """
    lm = prefix_logmass(llrs)
    N = spec.N
    paths = np.zeros(1, dtype=np.int64)
    terms = []
    for i in range(N):
        if spec.is_frozen[i]:
            kids = np.empty_like(paths)
            for j, p in enumerate(paths):
                bits = (p >> np.arange(i - 1, -1, -1)) & 1 if i else \
                    np.zeros(0, dtype=np.int64)
                kids[j] = 2 * p + dynamic_frozen_value(bits, i, spec)
            paths = kids
            continue
        cand = np.empty(2 * paths.size, dtype=np.int64)
        cand[0::2] = 2 * paths
        cand[1::2] = 2 * paths + 1
        cand_pm = -lm[i][cand]
        if cand.size <= L:
            keep = np.arange(cand.size)
            drop = np.empty(0, dtype=np.int64)
        else:
            order = np.argsort(cand_pm, kind="stable")
            keep, drop = order[:L], order[L:]
        for d in drop:
            terms.append(-cand_pm[d] - spec.frozen_after[i] * LN2)
        paths = cand[keep]
    pms = -lm[N - 1][paths]
    rows = ((paths[:, None] >> np.arange(N - 1, -1, -1)) & 1).astype(np.int8)
    return rows, pms, logsumexp(terms)


def ref_node_scl(pms, alpha_t, n_frozen, L):
    """Sequential list decode of one frozen-prefix span (static zeros).

    Returns (codewords, u bits, pms) in final selection order."""
    P, Ns = alpha_t.shape
    state = {
        "u": np.zeros((P, Ns), dtype=np.int8),
        "pm": np.asarray(pms, dtype=np.float64).copy(),
        "bit": 0,
    }

    def rec(alpha):
        m = alpha.shape[1]
        if m == 1:
            i = state["bit"]
            state["bit"] += 1
            a = alpha[:, 0]
            if i < n_frozen:
                state["pm"] = state["pm"] + softplus(-a)
                return np.zeros((alpha.shape[0], 1), dtype=np.int8), None
            Q = a.size
            cand = np.empty(2 * Q)
            cand[0::2] = state["pm"] + softplus(-a)
            cand[1::2] = state["pm"] + softplus(a)
            order = np.argsort(cand, kind="stable")
            keep = order[:L] if cand.size > L else np.arange(cand.size)
            par, bit = keep // 2, (keep % 2).astype(np.int8)
            state["u"] = state["u"][par]
            state["u"][:, i] = bit
            state["pm"] = cand[keep]
            return bit.reshape(-1, 1), par
        half = m // 2
        a, b = alpha[:, :half], alpha[:, half:]
        bl, ol = rec(f_func(a, b))
        if ol is not None:
            a, b = a[ol], b[ol]
        br, orr = rec(g_func(a, b, bl))
        if orr is not None:
            bl = bl[orr]
        beta = np.concatenate([bl ^ br, br], axis=1)
        if ol is None:
            org = orr
        elif orr is None:
            org = ol
        else:
            org = ol[orr]
        return beta, org

    beta, _ = rec(np.asarray(alpha_t, dtype=np.float64))
    return beta, state["u"], state["pm"]


def span_metric(alpha, s):
    """Exact metric increment for emitting sub-codeword s under LLRs
    alpha (both 1-D)."""
    return float(np.logaddexp(0.0, -(1.0 - 2.0 * s) * alpha).sum())


def fscl_lambda_oracle(llrs, spec, L):
    """Node-level enumeration of every unexplored valid extension.

    Hooks the hard decoder, enumerates all 2^{K_s} sub-codewords per
    surviving parent at each node, removes the kept candidates, and
    accumulates the frozen-weighted remainder mass.
    """
    from polarkit.fscl import _codeword_table, fscl_decode

    terms = []

    def hook(node, idx, alpha_t, outcome, pms_before):
        T = _codeword_table(node.length, node.n_info).astype(np.float64)
        sp0 = np.logaddexp(0.0, -alpha_t)
        sp1 = np.logaddexp(0.0, alpha_t)
        cand = pms_before[:, None] + sp0 @ (1 - T).T + sp1 @ T.T
        keep = np.zeros(cand.shape, dtype=bool)
        k = node.n_info
        u_surv = encode(outcome.s_info)
        if k:
            w = 1 << np.arange(k - 1, -1, -1)
            t_idx = (u_surv[:, node.length - k:].astype(np.int64) * w).sum(axis=1)
        else:
            t_idx = np.zeros(outcome.eta.size, dtype=np.int64)
        keep[np.asarray(outcome.eta, dtype=np.int64), t_idx] = True
        rest = cand[~keep]
        if rest.size:
            fa = spec.frozen_after[node.end - 1]
            terms.append(logsumexp(-rest) - fa * LN2)

    fscl_decode(llrs, spec, L, soft_hook=hook)
    return logsumexp(terms)


def multiset(rows, pms, digits=9):
    return sorted((round(float(p), digits), tuple(int(x) for x in row))
                  for p, row in zip(pms, rows))


def random_spec(N, K, rng, dyn=None):
    return build_code(N, K, reliability_order=rng.permutation(N), dyn=dyn)


def noisy_llrs(spec, rng, sigma=0.8, codeword=None):
    """One AWGN observation of a random (or given) codeword; returns
    (codeword, llrs)."""
    if codeword is None:
        info = rng.integers(0, 2, spec.K).astype(np.int8)
        codeword = encode_info(info, spec)
    y = 1.0 - 2.0 * codeword + rng.normal(0, sigma, size=spec.N)
    return codeword, 2.0 * y / (sigma * sigma)


def frozen_prefix_metric(alpha, n_frozen):
    """Bit-level metric of deciding a span's first n_frozen bits to zero.

    Walks the in-span butterfly with the f/g combines and accumulates
    the per-bit softplus penalties; all partial sums stay zero because
    every decided bit is zero.  Independent route from the codeword-side
    span metric used inside the node decoders.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if n_frozen == 0:
        return 0.0
    if alpha.size == 1:
        return float(np.logaddexp(0.0, -alpha[0]))
    half = alpha.size // 2
    left = f_func(alpha[:half], alpha[half:])
    if n_frozen <= half:
        return frozen_prefix_metric(left, n_frozen)
    total = frozen_prefix_metric(left, half)
    right = g_func(alpha[:half], alpha[half:], 0)
    return total + frozen_prefix_metric(right, n_frozen - half)
