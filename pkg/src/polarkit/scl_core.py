"""List decoding core: LLR kernels, path metrics, bit-by-bit SCL.

Path metrics are negative log posteriors: e^-PM is the probability of
the partial input path given the channel output, marginalized over all
undecided bits.  The tree walk is shared with the node-based decoder:
``_traverse`` recurses over aligned spans, asks a sink object whether a
span is terminal, and remaps per-span LLR state through the origin maps
that selections produce.
"""

from dataclasses import dataclass

import numpy as np

from .logdomain import LN2, box_plus, box_plus_reduce, check_mode, softplus


def f_func(a, b, mode="exact", counter=None):
    """Check-node LLR combine, exact form:
    sign(a) sign(b) min{|a|,|b|} + softplus(-|a+b|) - softplus(-|a-b|).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if counter is not None:
        m = np.broadcast(a, b).size
        counter.add("add_sub", 4 * m)
        counter.add("compare", m)
        counter.add("hd_sign", 3 * m)
    base = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    corr = softplus(-np.abs(a + b), mode, counter) - softplus(-np.abs(a - b), mode, counter)
    return base + corr


def g_func(a, b, bits, counter=None):
    """Variable-node combine (1 - 2*bit) * a + b."""
    a = np.asarray(a, dtype=np.float64)
    if counter is not None:
        m = np.broadcast(a, np.asarray(b)).size
        counter.add("add_sub", m)
        counter.add("hd_sign", m)
    return (1.0 - 2.0 * np.asarray(bits, dtype=np.float64)) * a + np.asarray(b, dtype=np.float64)


def combine_beta(left, right, counter=None):
    """Partial-sum combine: first half left XOR right, second half right."""
    left = np.asarray(left)
    right = np.asarray(right)
    if counter is not None:
        counter.add("bit_ops", left.size)
    return np.concatenate([left ^ right, right], axis=-1)


def pm_update_bit(pm, llr, bit, mode="exact", counter=None):
    """PM increment for one decision: pm + softplus(-(1-2*bit)*llr)."""
    if counter is not None:
        counter.add("add_sub", np.size(np.asarray(llr)))
        counter.add("hd_sign", np.size(np.asarray(llr)))
    signed = (1.0 - 2.0 * np.asarray(bit, dtype=np.float64)) * np.asarray(llr, dtype=np.float64)
    return pm + softplus(-signed, mode, counter)


def pm_update_codeword(pm, llrs, s_hat, mode="exact", counter=None):
    """Codeword-side PM: pm + sum_k softplus(-(1-2*s[k])*llr[k]).

    Operates along the last axis; equals the total of the per-bit
    updates over the same span.
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    if counter is not None:
        counter.add("add_sub", llrs.size)
        counter.add("hd_sign", llrs.size)
    signed = (1.0 - 2.0 * np.asarray(s_hat, dtype=np.float64)) * llrs
    return pm + softplus(-signed, mode, counter).sum(axis=-1)


def select_paths(cand_pm, L, counter=None):
    """Keep the L smallest metrics; ties go to the earlier candidate.

    Candidates must already be ordered parent-major with the bit-0 /
    no-flip child first, so the stable sort implements the documented
    tie-break.  Returns (kept, discarded) index arrays; kept is in
    ascending metric order.
    """
    P = cand_pm.shape[0]
    if P <= L:
        return np.arange(P), np.empty(0, dtype=np.int64)
    if counter is not None:
        counter.sort("pm", P)
    order = np.argsort(cand_pm, kind="stable")
    return order[:L], order[L:]


@dataclass
class DecPath:
    u_hat: np.ndarray
    codeword: np.ndarray
    pm: float


@dataclass
class PathList:
    """Survivor set in final selection order (ascending metric)."""

    u_hat: np.ndarray  # (P, N)
    codewords: np.ndarray  # (P, N)
    pms: np.ndarray  # (P,)
    eta: np.ndarray | None = None  # origin of each survivor in the previous list

    @property
    def paths(self):
        return [DecPath(self.u_hat[i], self.codewords[i], float(self.pms[i]))
                for i in range(self.pms.size)]

    def best_index(self):
        return int(np.argmin(self.pms))


def _traverse(sink, stage, position, alpha, mode, counter):
    """Recurse over aligned spans; returns (beta, origin).

    ``origin`` maps the sink's path indices after the span back to the
    indices before it (None when unchanged), so pending per-span LLR
    state held by ancestor frames can follow duplications and drops.
    """
    if sink.is_leaf(stage, position):
        return sink.handle_leaf(stage, position, alpha)
    half = alpha.shape[1] // 2
    a, b = alpha[:, :half], alpha[:, half:]
    beta_l, org_l = _traverse(sink, stage - 1, 2 * position,
                              f_func(a, b, mode, counter), mode, counter)
    if org_l is not None:
        a, b = a[org_l], b[org_l]
    beta_r, org_r = _traverse(sink, stage - 1, 2 * position + 1,
                              g_func(a, b, beta_l, counter), mode, counter)
    if org_r is not None:
        beta_l = beta_l[org_r]
    beta = combine_beta(beta_l, beta_r, counter)
    if org_l is None:
        return beta, org_r
    if org_r is None:
        return beta, org_l
    return beta, org_l[org_r]


class _SclSink:
    """Bit-by-bit leaves: frozen updates and info-bit splits."""

    def __init__(self, spec, L, mode, track_soft, counter):
        self.spec = spec
        self.L = L
        self.mode = mode
        self.track = track_soft
        self.counter = counter
        self.u_hat = np.zeros((1, spec.N), dtype=np.int8)
        self.pm = np.zeros(1)
        self.lam = -np.inf
        self.eta = None
        self._taps = {}
        for nd in spec.node_dyn:
            for i, taps in zip(nd.positions, nd.taps):
                self._taps[int(i)] = taps

    def is_leaf(self, stage, position):
        return stage == 0

    def _frozen_values(self, i):
        taps = self._taps.get(i)
        P = self.pm.size
        if taps is None or taps.size == 0:
            return np.zeros(P, dtype=np.int8)
        if self.counter is not None:
            self.counter.add("bit_ops", P * taps.size)
        return np.bitwise_xor.reduce(self.u_hat[:, taps], axis=1).astype(np.int8)

    def handle_leaf(self, stage, i, alpha):
        llr = alpha[:, 0]
        if self.spec.is_frozen[i]:
            vals = self._frozen_values(i)
            self.pm = pm_update_bit(self.pm, llr, vals, self.mode, self.counter)
            self.u_hat[:, i] = vals
            return vals.reshape(-1, 1), None
        P = self.pm.size
        # candidate order: parent-major, bit 0 first
        cand_pm = np.empty(2 * P)
        cand_pm[0::2] = pm_update_bit(self.pm, llr, 0, self.mode, self.counter)
        cand_pm[1::2] = pm_update_bit(self.pm, llr, 1, self.mode, self.counter)
        keep, drop = select_paths(cand_pm, self.L, self.counter)
        if self.track and drop.size:
            shed = box_plus_reduce(-cand_pm[drop], self.mode, self.counter)
            self.lam = box_plus(self.lam, shed - self.spec.frozen_after[i] * LN2,
                                self.mode, self.counter)
        parents = keep // 2
        bits = (keep % 2).astype(np.int8)
        self.u_hat = self.u_hat[parents]
        self.u_hat[:, i] = bits
        self.pm = cand_pm[keep]
        self.eta = parents
        return bits.reshape(-1, 1), parents


def scl_decode(llrs, spec, L, mode="exact", track_soft=False, counter=None):
    """Successive cancellation list decoding.

    Parameters
    ----------
    llrs : array_like, shape (N,)
        Channel LLRs.
    spec : PolarCodeSpec
    L : int
        List size (>= 1).
    mode : {"exact", "hwf"}
    track_soft : bool
        Accumulate the discarded-path mass ``lambda_T`` (ln domain,
        -inf when nothing was discarded).

    Returns
    -------
    (PathList, lambda_T)
    """
    check_mode(mode)
    if L < 1:
        raise ValueError(f"list size must be >= 1, got {L}")
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape != (spec.N,):
        raise ValueError(f"expected {spec.N} LLRs, got shape {llrs.shape}")
    sink = _SclSink(spec, L, mode, track_soft, counter)
    beta, _ = _traverse(sink, spec.n, 0, llrs.reshape(1, -1), mode, counter)
    return PathList(u_hat=sink.u_hat, codewords=beta.astype(np.int8),
                    pms=sink.pm, eta=sink.eta), sink.lam
