"""Deterministic decode-latency models and operation counting.

Latency is accounted in abstract time steps against a pipelined
schedule: one step performs a wavefront of parallel LLR updates, one
candidate round of a node decoder, or one level of a metric fold.
Totals depend only on the code structure, the list size, and the
parallelism budget, never on channel data, so reports are pure
functions of their arguments.

Two regimes are modeled.  With unlimited resources every wavefront
fits into one step and a node costs

    T_l + T_s,   T_s = max(T_h, T_p, T_o' - T_l)

where T_l counts the f/g stages descended from the junction with the
previous node, T_h the candidate rounds of the hard decode, T_p the
frozen-pattern pre-descent, and T_o' the aggregate-mass fold of the
previous node that may spill into the current descent.  The list-wide
APP assembly appends 1 + ceil(log2 L) closing steps.

With a budget of N_par parallel operations, a wavefront of m
operations costs ceil(m / B) steps.  LLR descents batch at the full
budget; the mass folds run beside hard work and get half.  While the
final descent edge streams its batches the per-candidate metric
accumulation proceeds in lockstep, so only the closing selection
cycles of T_h stay exposed.

Step counts for a span are keyed on the smaller side of the span: a
span with K_s information bits is enumerated from whichever of K_s and
N_s - K_s is smaller, ties resolving to the information side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fscl import fscl_decode
from .soft_output import so_fscl_decode, so_scl_decode

DECODER_TAGS = ("so_scl", "so_fscl", "fscl")

# canonical counter kinds, in report order
OP_KINDS = ("add_sub", "mul_div", "compare", "hd_sign", "bit_ops",
            "softplus", "softplus_hwf", "lnexpm1")


def _ceil_div(a, b):
    return -(-a // b)


def _ceil_log2(x):
    # ceil(log2 x) for integer x >= 1, without float round-off
    return max(0, int(x - 1).bit_length())


class OpCounter:
    """Mutable tally of arithmetic primitives.

    Sorts are recorded as size histograms only; the comparisons inside
    a sorting network are deliberately not folded into ``compare``.
    """

    def __init__(self):
        self.counts = {}
        self.pm_sorts = {}
        self.llr_sorts = {}

    def add(self, kind, n=1):
        if n:
            self.counts[kind] = self.counts.get(kind, 0) + int(n)

    def sort(self, which, size):
        hist = self.pm_sorts if which == "pm" else self.llr_sorts
        size = int(size)
        hist[size] = hist.get(size, 0) + 1

    def as_dict(self):
        out = {kind: self.counts.get(kind, 0) for kind in OP_KINDS}
        for size in sorted(self.pm_sorts):
            out[f"pm_sort_{size}"] = self.pm_sorts[size]
        for size in sorted(self.llr_sorts):
            out[f"llr_sort_{size}"] = self.llr_sorts[size]
        return out


@dataclass
class OpCountReport:
    decoder: str
    mode: str
    counters: dict
    pm_sorts: dict = field(default_factory=dict)
    llr_sorts: dict = field(default_factory=dict)

    def count(self, kind):
        return self.counters.get(kind, 0)

    def as_items(self):
        items = [("decoder", self.decoder), ("mode", self.mode)]
        items += [(kind, self.counters.get(kind, 0)) for kind in OP_KINDS]
        items += [(f"pm_sort_{s}", self.pm_sorts[s])
                  for s in sorted(self.pm_sorts)]
        items += [(f"llr_sort_{s}", self.llr_sorts[s])
                  for s in sorted(self.llr_sorts)]
        return items


@dataclass
class LatencyReport:
    decoder: str
    total_steps: int
    # (node, T_l, T_h, T_p, T_o, T_s) per decode unit; the unit is an
    # FIC node for fscl/so_fscl and a leaf index for so_scl
    per_node: list
    final_app_steps: int
    L: int = 0
    n_par: int | None = None

    def as_items(self):
        return [("decoder", self.decoder), ("L", self.L),
                ("n_par", self.n_par if self.n_par is not None else 0),
                ("total_steps", self.total_steps),
                ("final_app_steps", self.final_app_steps),
                ("nodes", len(self.per_node))]


def _min_side(ns, ks):
    """(side, m): enumerate from the smaller side of the span."""
    f = ns - ks
    if ks <= f:
        return "lo", ks
    return "hi", f


def _t_hard(ns, ks, L):
    side, m = _min_side(ns, ks)
    if side == "lo":
        return m + 1
    # frozen-side rounds saturate at the list size; the offset grows
    # with the frozen count (0/1/2 frozen keep ns+1/ns/ns-1 candidate
    # positions, 3 frozen drop to ns-3)
    return min(L, ns + 1 - {0: 0, 1: 1, 2: 2, 3: 4}[m])


def _t_par(ns, ks):
    """Frozen-pattern pre-descent depth (f-only, down to the core)."""
    side, m = _min_side(ns, ks)
    if side != "hi" or m == 0:
        return 0
    core = {1: 2, 2: 2, 3: 4}[m]
    return _ceil_log2(ns // core) + 1


def _fold_terms(ns, ks, L):
    """Number of inputs to the node's aggregate-mass fold."""
    side, m = _min_side(ns, ks)
    if side == "lo":
        return 0 if m == 0 else (2 ** m - 1) * L + 1
    return 2 * L


def _fold_steps(terms, budget):
    """Steps for a pairwise fold; each level batches at the budget."""
    steps = 0
    t = terms
    while t > 1:
        t = _ceil_div(t, 2)
        steps += 1 if budget is None else _ceil_div(t, budget)
    return steps


def _walk(spec):
    """Yield (node, edge_widths): child widths descended to reach each
    node from its junction with the previous one."""
    n = spec.n
    prev = None
    for nd in spec.fic_nodes:
        depth = n - nd.stage
        path = nd.position
        if prev is None:
            lca = 0
        else:
            pd, pp = prev
            lca = 0
            lim = min(pd, depth)
            while lca < lim and (pp >> (pd - lca - 1)) == \
                    (path >> (depth - lca - 1)):
                lca += 1
        yield nd, [spec.N >> d for d in range(lca + 1, depth + 1)]
        prev = (depth, path)


def _node_report(spec, L, decoder, n_par):
    soft = decoder == "so_fscl"
    budget_soft = None if n_par is None else max(1, n_par // 2)
    rows = []
    total = 0
    prev_to = 0
    for nd, ew in _walk(spec):
        if n_par is None:
            tl = len(ew)
            stream = 0
        else:
            tl = sum(_ceil_div(L * w, n_par) for w in ew)
            stream = _ceil_div(L * ew[-1], n_par) - 1 if ew else 0
        th = max(1, _t_hard(nd.length, nd.n_info, L) - stream)
        if soft:
            tp = _t_par(nd.length, nd.n_info)
            to = _fold_steps(_fold_terms(nd.length, nd.n_info, L),
                             budget_soft)
            ts = max(th, tp, prev_to - tl)
        else:
            tp = to = 0
            ts = th
        rows.append((nd, tl, th, tp, to, ts))
        total += tl + ts
        prev_to = to
    # the last fold cannot hide under further descents
    final = prev_to + 1 + _ceil_log2(L) if soft else 0
    return LatencyReport(decoder, total + final, rows, final, L, n_par)


def _bit_report(spec, L, n_par):
    """Bit-level schedule: full-tree walk, one pipelined step per
    information bit, plus sorter stalls when both bits of a sibling
    pair carry information and the merge exceeds the pipeline depth."""
    n = spec.n
    stall = max(0, _ceil_log2(2 * L) - 3)
    info = ~spec.is_frozen
    rows = []
    total = 0
    for i in range(spec.N):
        lca = 0 if i == 0 else n - ((i - 1) ^ i).bit_length()
        ew = [spec.N >> d for d in range(lca + 1, n + 1)]
        tl = len(ew) if n_par is None else \
            sum(_ceil_div(L * w, n_par) for w in ew)
        th = 0
        if info[i]:
            th = 1
            if i % 2 == 1 and info[i - 1]:
                th += stall
        rows.append((i, tl, th, 0, 0, th))
        total += tl + th
    final = 1 + 2 * _ceil_log2(L)
    return LatencyReport("so_scl", total + final, rows, final, L, n_par)


def latency_unlimited(spec, L, decoder):
    """Time steps with every wavefront completing in one step."""
    if decoder not in DECODER_TAGS:
        raise ValueError(f"unknown decoder tag: {decoder!r}")
    if decoder == "so_scl":
        return _bit_report(spec, L, None)
    return _node_report(spec, L, decoder, None)


def latency_constrained(spec, L, decoder, n_par):
    """Time steps with at most n_par parallel operations per step.

    As n_par grows the totals converge to latency_unlimited.  In
    constrained reports T_h is the exposed candidate-round count after
    overlap with the streamed final edge, so T_s >= T_h still holds
    row by row.
    """
    if decoder not in DECODER_TAGS:
        raise ValueError(f"unknown decoder tag: {decoder!r}")
    if n_par < 1:
        raise ValueError("n_par must be >= 1")
    if decoder == "so_scl":
        return _bit_report(spec, L, int(n_par))
    return _node_report(spec, L, decoder, int(n_par))


def op_count_run(llrs, spec, L, decoder="so_fscl", mode="exact"):
    """Decode once with counting hooks on every arithmetic primitive."""
    if decoder not in DECODER_TAGS:
        raise ValueError(f"unknown decoder tag: {decoder!r}")
    counter = OpCounter()
    llrs = np.asarray(llrs, dtype=float)
    if decoder == "fscl":
        fscl_decode(llrs, spec, L, mode=mode, counter=counter)
    elif decoder == "so_fscl":
        so_fscl_decode(llrs, spec, L, mode=mode, counter=counter)
    else:
        so_scl_decode(llrs, spec, L, mode=mode, counter=counter)
    return OpCountReport(decoder, mode, dict(counter.counts),
                         dict(counter.pm_sorts), dict(counter.llr_sorts))


def format_report(report):
    """key=value lines, one per field."""
    return "\n".join(f"{k}={v}" for k, v in report.as_items())


def reports_csv(reports):
    """One CSV row per report; columns are the union of item keys."""
    if not reports:
        return ""
    keys = []
    for rep in reports:
        for k, _ in rep.as_items():
            if k not in keys:
                keys.append(k)
    lines = [",".join(keys)]
    for rep in reports:
        d = dict(rep.as_items())
        lines.append(",".join(str(d.get(k, 0)) for k in keys))
    return "\n".join(lines) + "\n"
