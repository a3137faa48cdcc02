"""Node-based fast SCL decoding over the frozen-prefix segmentation.

Each node is decoded in one shot on the path list.  Low-rate nodes
(<= 3 info bits) enumerate all sub-codewords; high-rate nodes (<= 3
frozen bits) start from per-path hard decisions, repair parity classes,
and run least-reliable-first bit-flip rounds.  Dynamic frozen values are
folded into the LLR signs up front so every node decoder can assume an
all-zero frozen prefix.
"""

from dataclasses import dataclass

import numpy as np

from .code_model import NodeKind, encode
from .logdomain import check_mode, softplus
from .scl_core import PathList, _traverse, pm_update_codeword, select_paths

_CODEWORD_TABLES = {}


def _codeword_table(length, k_info):
    """All 2^k sub-codewords of the frozen-prefix (length, k) subcode,
    ordered by the info pattern read MSB-first."""
    key = (length, k_info)
    tab = _CODEWORD_TABLES.get(key)
    if tab is None:
        pats = np.zeros((1 << k_info, length), dtype=np.int8)
        for j in range(1 << k_info):
            for t in range(k_info):
                pats[j, length - k_info + t] = (j >> (k_info - 1 - t)) & 1
        tab = encode(pats)
        tab.setflags(write=False)
        _CODEWORD_TABLES[key] = tab
    return tab


@dataclass
class FrozenMask:
    """Per-path frozen-prefix values and their encoded image."""

    u_frozen: np.ndarray  # (P, N_s) node-relative u with info positions zero
    s_frozen: np.ndarray  # (P, N_s) encode(u_frozen)


@dataclass
class NodeDecodeOutcome:
    """Survivors and the discarded set of the most recent selection (all
    candidates ever formed, for exhaustive nodes).  Survivors are in
    ascending metric order whenever a selection actually occurred; if
    every candidate fit in the list they stay in enumeration order."""

    eta: np.ndarray  # survivor -> parent path index
    s_info: np.ndarray  # (P', N_s) sub-codewords under the all-zero-frozen view
    pms: np.ndarray
    disc_eta: np.ndarray
    disc_s: np.ndarray
    disc_pms: np.ndarray


def _no_discards(length):
    return (np.empty(0, dtype=np.int64), np.empty((0, length), dtype=np.int8),
            np.empty(0))


def apply_dynamic_frozen(u_hat, node, spec, node_llrs, counter=None):
    """Resolve the node's frozen-prefix values per path and flip LLR signs.

    Returns (FrozenMask, alpha_tilde) where alpha_tilde[j] =
    (1 - 2 s_F[j]) * alpha[j]; decoding alpha_tilde with an all-zero
    frozen prefix and XORing s_F back afterwards is metric-exact.
    """
    P = node_llrs.shape[0]
    idx = spec.fic_nodes.index(node)
    nd = spec.node_dyn[idx]
    cap = nd.positions.size
    if cap == 0:
        zeros = np.zeros((P, node.length), dtype=np.int8)
        return FrozenMask(zeros, zeros), node_llrs
    vals = np.zeros((P, cap), dtype=np.int8)
    for t, taps in enumerate(nd.taps):
        if taps.size:
            if counter is not None:
                counter.add("bit_ops", P * taps.size)
            vals[:, t] = np.bitwise_xor.reduce(u_hat[:, taps], axis=1)
    u_frozen = np.zeros((P, node.length), dtype=np.int8)
    u_frozen[:, :cap] = vals
    if nd.table is not None:
        weights = 1 << np.arange(cap - 1, -1, -1)
        s_frozen = nd.table[vals @ weights]
    else:
        s_frozen = encode(u_frozen)
    if counter is not None:
        counter.add("hd_sign", P * node.length)
    alpha_t = np.where(s_frozen == 1, -node_llrs, node_llrs)
    return FrozenMask(u_frozen, s_frozen), alpha_t


def decode_rate0(pms, node, alpha_t, mode="exact", counter=None):
    """All-frozen span: single metric update per path, nothing discarded."""
    P = pms.size
    new_pm = pm_update_codeword(pms, alpha_t, 0, mode, counter)
    return NodeDecodeOutcome(np.arange(P), np.zeros((P, node.length), dtype=np.int8),
                             new_pm, *_no_discards(node.length))


def decode_exhaustive(pms, node, alpha_t, L, mode="exact", counter=None):
    """Enumerate all 2^{K_s} sub-codewords per path and keep the best L.

    Candidate order is parent-major with the all-zero pattern first, so
    metric ties resolve to the lower parent and the 0 bit.
    """
    P, Ns = alpha_t.shape
    table = _codeword_table(Ns, node.n_info)
    sp0 = softplus(-alpha_t, mode, counter)
    sp1 = softplus(alpha_t, mode, counter)
    cand_pm = (pms[:, None] + sp0 @ (1 - table.astype(np.float64)).T
               + sp1 @ table.astype(np.float64).T).ravel()
    if counter is not None:
        counter.add("add_sub", cand_pm.size * Ns)
    keep, drop = select_paths(cand_pm, L, counter)
    eta, pat = keep // table.shape[0], keep % table.shape[0]
    return NodeDecodeOutcome(eta, table[pat].copy(), cand_pm[keep],
                             drop // table.shape[0], table[drop % table.shape[0]].copy(),
                             cand_pm[drop])


_N_PARITY_CLASSES = {NodeKind.RATE1: 0, NodeKind.SPC: 1,
                     NodeKind.TYPE_III: 2, NodeKind.TYPE_IV: 4}


def decode_highrate(pms, node, alpha_t, L, mode="exact", counter=None):
    """Hard-decision start, parity repair, then flip-and-select rounds.

    Positions are grouped into N_q interleaved parity classes (0, 1, 2, 4
    for Rate1/SPC/TypeIII/TypeIV).  Each class keeps even parity through
    its least-reliable position, which absorbs every later flip in the
    class and is excluded from the flip schedule; TypeIV tries the
    all-even and all-odd hypotheses and keeps the best L before flipping.
    The discarded set reports only the most recent selection's losers.
    """
    P, Ns = alpha_t.shape
    n_q = _N_PARITY_CLASSES[node.kind]
    absa = np.abs(alpha_t)
    hd = (alpha_t < 0).astype(np.int8)
    if counter is not None:
        counter.add("hd_sign", P * Ns)
        counter.add("add_sub", P * Ns)
    base = pms + softplus(-absa, mode, counter).sum(1)

    if n_q:
        cls = np.arange(Ns) % n_q
        exc_pos = np.empty((P, n_q), dtype=np.int64)
        w_exc = np.empty((P, n_q))
        parity = np.empty((P, n_q), dtype=np.int8)
        for c in range(n_q):
            members = np.flatnonzero(cls == c)
            sub = absa[:, members]
            if counter is not None:
                counter.add("compare", P * max(members.size - 1, 0))
                counter.add("bit_ops", P * max(members.size - 1, 0))
            exc_pos[:, c] = members[np.argmin(sub, axis=1)]
            w_exc[:, c] = sub.min(axis=1)
            parity[:, c] = np.bitwise_xor.reduce(hd[:, members], axis=1)
        free_mask = np.ones((P, Ns), dtype=bool)
        np.put_along_axis(free_mask, exc_pos, False, axis=1)
    else:
        free_mask = np.ones((P, Ns), dtype=bool)

    # flip schedule: non-excluded positions, least reliable first
    order = np.argsort(np.where(free_mask, absa, np.inf), axis=1, kind="stable")
    order = order[:, :Ns - n_q]
    if counter is not None and Ns - n_q > 0:
        counter.sort("llr", Ns)

    rows = np.arange(P)
    if node.kind is NodeKind.TYPE_IV:
        # two parity hypotheses per parent, interleaved parent-major
        cur_eta = np.repeat(rows, 2)
        hyp = np.tile(np.array([0, 1], dtype=np.int8), P)
        fix = parity[cur_eta] != hyp[:, None]
        cur_pm = base[cur_eta] + np.where(fix, w_exc[cur_eta], 0.0).sum(1)
        if counter is not None:
            counter.add("add_sub", cur_pm.size * (n_q + 1))
        cur_s = hd[cur_eta].copy()
        flips = np.zeros_like(cur_s)
        np.put_along_axis(flips, exc_pos[cur_eta], fix.astype(np.int8), axis=1)
        cur_s ^= flips
        cur_state = fix.astype(np.int8)
        keep, drop = select_paths(cur_pm, L, counter)
        disc = (cur_eta[drop], cur_s[drop], cur_pm[drop])
        cur_eta, cur_pm, cur_s, cur_state = (cur_eta[keep], cur_pm[keep],
                                             cur_s[keep], cur_state[keep])
    else:
        cur_eta = rows.copy()
        cur_pm = base.copy()
        cur_s = hd.copy()
        if n_q:
            cur_state = (parity != 0).astype(np.int8)
            cur_pm = cur_pm + np.where(cur_state == 1, w_exc, 0.0).sum(1)
            if counter is not None:
                counter.add("add_sub", P * n_q)
            flips = np.zeros_like(cur_s)
            np.put_along_axis(flips, exc_pos, cur_state, axis=1)
            cur_s ^= flips
        else:
            cur_state = np.zeros((P, 0), dtype=np.int8)
        disc = _no_discards(Ns)

    for r in range(min(L - 1, Ns - n_q)):
        Q = cur_pm.size
        fp = order[cur_eta, r]
        delta = absa[cur_eta, fp]
        if n_q:
            fc = fp % n_q
            delta = delta + np.where(cur_state[np.arange(Q), fc] == 1, -1.0, 1.0) \
                * w_exc[cur_eta, fc]
        if counter is not None:
            counter.add("add_sub", 2 * Q)
        # candidate order: keep child before flip child, parent-major
        cand_pm = np.empty(2 * Q)
        cand_pm[0::2] = cur_pm
        cand_pm[1::2] = cur_pm + delta
        keep, drop = select_paths(cand_pm, L, counter)
        src = keep // 2
        flip_sel = (keep % 2).astype(bool)
        new_s = cur_s[src]
        new_state = cur_state[src]
        new_eta = cur_eta[src]
        if flip_sel.any():
            w = np.flatnonzero(flip_sel)
            new_s[w, fp[src[w]]] ^= 1
            if n_q:
                fcw = fp[src[w]] % n_q
                new_s[w, exc_pos[new_eta[w], fcw]] ^= 1
                new_state[w, fcw] ^= 1
        if drop.size:
            dsrc = drop // 2
            d_s = cur_s[dsrc].copy()
            dw = np.flatnonzero((drop % 2).astype(bool))
            if dw.size:
                d_s[dw, fp[dsrc[dw]]] ^= 1
                if n_q:
                    fcd = fp[dsrc[dw]] % n_q
                    d_s[dw, exc_pos[cur_eta[dsrc[dw]], fcd]] ^= 1
            disc = (cur_eta[dsrc], d_s, cand_pm[drop])
        cur_eta, cur_pm, cur_s, cur_state = new_eta, cand_pm[keep], new_s, new_state

    return NodeDecodeOutcome(cur_eta, cur_s, cur_pm, *disc)


def dispatch_node(pms, node, alpha_t, L, mode="exact", counter=None):
    if node.kind is NodeKind.RATE0:
        return decode_rate0(pms, node, alpha_t, mode, counter)
    if node.kind in (NodeKind.REP, NodeKind.TYPE_I, NodeKind.TYPE_II):
        return decode_exhaustive(pms, node, alpha_t, L, mode, counter)
    return decode_highrate(pms, node, alpha_t, L, mode, counter)


class _FsclSink:
    """Terminates the span recursion at the segmentation's nodes."""

    def __init__(self, spec, L, mode, counter, soft_hook=None):
        self.spec = spec
        self.L = L
        self.mode = mode
        self.counter = counter
        self.soft_hook = soft_hook
        self.next = 0
        self.u_hat = np.zeros((1, spec.N), dtype=np.int8)
        self.pm = np.zeros(1)
        self.eta = None

    def is_leaf(self, stage, position):
        nd = self.spec.fic_nodes[self.next]
        return nd.stage == stage and nd.position == position

    def handle_leaf(self, stage, position, alpha):
        node = self.spec.fic_nodes[self.next]
        idx = self.next
        self.next += 1
        fmask, alpha_t = apply_dynamic_frozen(self.u_hat, node, self.spec, alpha,
                                              self.counter)
        pms_before = self.pm
        outcome = dispatch_node(pms_before, node, alpha_t, self.L, self.mode,
                                self.counter)
        if self.soft_hook is not None:
            self.soft_hook(node, idx, alpha_t, outcome, pms_before)
        s = outcome.s_info ^ fmask.s_frozen[outcome.eta]
        if self.counter is not None:
            self.counter.add("bit_ops",
                             s.size * (1 + (node.length.bit_length() - 1) // 2))
        u_seg = encode(s)
        self.u_hat = self.u_hat[outcome.eta]
        self.u_hat[:, node.start:node.end] = u_seg
        self.pm = outcome.pms
        self.eta = outcome.eta
        if node.kind is NodeKind.RATE0:
            return s, None
        return s, outcome.eta


def fscl_decode(llrs, spec, L, mode="exact", counter=None, soft_hook=None):
    """Node-based SCL: one list update per segmentation node.

    Low-rate nodes enumerate their subcode; high-rate nodes explore
    metric-ordered bit flips around the hard decision and rank complete
    node candidates.  The flip ranking can keep a different survivor set
    than per-bit selection when the exact-metric correction terms
    disagree, so survivors are close to, but not a replay of,
    scl_decode.  Returns a PathList ordered by the final selection.
    """
    check_mode(mode)
    if L < 1:
        raise ValueError(f"list size must be >= 1, got {L}")
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape != (spec.N,):
        raise ValueError(f"expected {spec.N} LLRs, got shape {llrs.shape}")
    sink = _FsclSink(spec, L, mode, counter, soft_hook)
    beta, _ = _traverse(sink, spec.n, 0, llrs.reshape(1, -1), mode, counter)
    return PathList(u_hat=sink.u_hat, codewords=beta.astype(np.int8),
                    pms=sink.pm, eta=sink.eta)
