"""Code construction: frozen sets, constrained-prefix segmentation, encoding.

A code is described by its length N = 2^n, the information set, and an
optional dynamic-frozen configuration.  Decoding operates on a node
segmentation of {0..N-1}: maximal aligned spans whose frozen positions
form a prefix and whose rate is within reach of the node decoders
(min{K_s, N_s - K_s} <= 3).  Spans that violate either condition are
subdivided, so the segmentation always covers the code.
"""

from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

import numpy as np

from .logdomain import check_mode  # noqa: F401  (re-exported for callers)


class NodeKind(Enum):
    RATE0 = "rate0"
    REP = "rep"
    TYPE_I = "type1"
    TYPE_II = "type2"
    TYPE_IV = "type4"
    TYPE_III = "type3"
    SPC = "spc"
    RATE1 = "rate1"


# kinds decoded by exhaustive sub-codeword enumeration
LOW_RATE_KINDS = (NodeKind.REP, NodeKind.TYPE_I, NodeKind.TYPE_II)
# kinds decoded by parity-constrained bit flipping
HIGH_RATE_KINDS = (NodeKind.TYPE_IV, NodeKind.TYPE_III, NodeKind.SPC, NodeKind.RATE1)


@dataclass(frozen=True)
class FicNode:
    """One segment of the code: an aligned span with a frozen prefix.

    ``stage`` is the tree level (span length = 2**stage), ``position``
    the 0-based index of the span among its stage siblings, ``start``
    the 0-based index of the first covered bit.
    """

    stage: int
    position: int
    start: int
    length: int
    n_info: int
    kind: NodeKind

    @property
    def n_frozen(self):
        return self.length - self.n_info

    @property
    def end(self):
        """0-based index one past the last covered bit."""
        return self.start + self.length


@dataclass
class DynFrozenCfg:
    """How frozen-bit values are generated.

    mode "static_zero" pins every frozen bit to 0.  Mode "convolutional"
    sets frozen u[i] to the XOR of earlier information bits selected by a
    sliding window of the generator polynomial ``g``: with g of length m,
    position j (at distance d = i - j, 1 <= d <= m - 1) participates when
    g[d] = 1.  The leading coefficient g[0] never participates; pass the
    polynomial in its conventional form, e.g. (1, 0, 1, 1, 0, 1, 1).

    ``f_d`` caps how many frozen positions per node are dynamic: only the
    first f_d frozen bits of each node get convolutional values, the rest
    stay 0.  None means unbounded.
    """

    mode: str = "static_zero"
    g: tuple = ()
    f_d: int | None = 3

    def __post_init__(self):
        if self.mode not in ("static_zero", "convolutional"):
            raise ValueError(f"unknown dyn mode {self.mode!r}")
        if self.mode == "convolutional":
            if len(self.g) < 2 or any(b not in (0, 1) for b in self.g):
                raise ValueError("convolutional mode needs a binary g of length >= 2")
        if self.f_d is not None and self.f_d < 0:
            raise ValueError("f_d must be >= 0 or None")


@dataclass
class _NodeDyn:
    """Per-node dynamic-frozen working data (empty for static codes)."""

    positions: np.ndarray  # absolute indices of the dynamic frozen bits
    taps: list  # per dynamic bit: absolute info indices XORed together
    table: np.ndarray | None  # (2^d, N_s) precomputed s_F patterns


@dataclass
class PolarCodeSpec:
    N: int
    K: int
    info_set: np.ndarray
    frozen_set: np.ndarray
    dyn: DynFrozenCfg
    fic_nodes: tuple
    is_frozen: np.ndarray = field(repr=False, default=None)
    frozen_after: np.ndarray = field(repr=False, default=None)
    node_dyn: list = field(repr=False, default=None)

    @property
    def n(self):
        return self.N.bit_length() - 1

    @property
    def rate(self):
        return self.K / self.N


def _check_power_of_two(M, what="length"):
    if M < 1 or (M & (M - 1)) != 0:
        raise ValueError(f"{what} must be a power of two, got {M}")


def encode(u):
    """Polar transform c = u G over GF(2), applied along the last axis.

    G is the n-fold Kronecker power of [[1, 0], [1, 1]] without bit
    reversal; the transform is its own inverse.  Accepts a bit vector or
    a batch of rows.

    Parameters
    ----------
    u : array_like of {0, 1}, shape (..., M) with M a power of two.

    Returns
    -------
    ndarray of int8, same shape.
    """
    u = np.asarray(u)
    M = u.shape[-1]
    _check_power_of_two(M)
    c = u.astype(np.int8).copy()
    half = 1
    while half < M:
        step = 2 * half
        for off in range(0, M, step):
            c[..., off:off + half] ^= c[..., off + half:off + step]
        half = step
    return c


def _classify(length, n_info):
    if n_info == 0:
        return NodeKind.RATE0
    if n_info == length:
        return NodeKind.RATE1
    if n_info <= 3:
        # overlapping short-node labels (e.g. length 4, 3 info) resolve to
        # the exhaustive low-rate kind
        return (NodeKind.REP, NodeKind.TYPE_I, NodeKind.TYPE_II)[n_info - 1]
    n_frozen = length - n_info
    if n_frozen == 1:
        return NodeKind.SPC
    if n_frozen == 2:
        return NodeKind.TYPE_III
    if n_frozen == 3:
        return NodeKind.TYPE_IV
    raise ValueError(f"span ({length},{n_info}) is not decodable as a single node")


def segment_fic(frozen_set, N):
    """Split {0..N-1} into maximal decodable frozen-prefix nodes.

    A span qualifies when its frozen positions are a prefix of the span
    and min{K_s, N_s - K_s} <= 3; otherwise it is halved and both sides
    are segmented recursively.  Length-1 spans always qualify, so the
    recursion terminates for every frozen pattern.

    Returns the nodes ordered left to right; their spans partition the
    code.
    """
    _check_power_of_two(N)
    frozen = np.zeros(N, dtype=bool)
    fs = np.asarray(sorted(frozen_set), dtype=np.int64)
    if fs.size and (fs[0] < 0 or fs[-1] >= N):
        raise ValueError("frozen indices out of range")
    frozen[fs] = True
    nodes = []

    def visit(stage, position):
        length = 1 << stage
        start = position * length
        mask = frozen[start:start + length]
        n_frozen = int(mask.sum())
        n_info = length - n_frozen
        prefix_ok = bool(mask[:n_frozen].all())
        if prefix_ok and min(n_info, n_frozen) <= 3:
            nodes.append(FicNode(stage, position, start, length, n_info,
                                 _classify(length, n_info)))
            return
        visit(stage - 1, 2 * position)
        visit(stage - 1, 2 * position + 1)

    visit(N.bit_length() - 1, 0)
    return nodes


def _window_taps(i, info_mask, g):
    """Absolute info positions feeding dynamic frozen bit i (0-based)."""
    taps = []
    m = len(g)
    for d in range(1, m):
        j = i - d
        if j < 0:
            break
        if g[d] == 1 and info_mask[j]:
            taps.append(j)
    return np.asarray(sorted(taps), dtype=np.int64)


def _build_node_dyn(nodes, info_mask, dyn):
    per_node = []
    for node in nodes:
        if dyn.mode != "convolutional":
            per_node.append(_NodeDyn(np.empty(0, np.int64), [], None))
            continue
        cap = node.n_frozen if dyn.f_d is None else min(dyn.f_d, node.n_frozen)
        pos = np.arange(node.start, node.start + cap, dtype=np.int64)
        taps = [_window_taps(int(i), info_mask, dyn.g) for i in pos]
        table = None
        if dyn.f_d is not None and cap > 0:
            # dynamic bits are the first `cap` relative positions
            pat = np.zeros((1 << cap, node.length), dtype=np.int8)
            for idx in range(1 << cap):
                for t in range(cap):
                    pat[idx, t] = (idx >> (cap - 1 - t)) & 1
            table = encode(pat)
        per_node.append(_NodeDyn(pos, taps, table))
    return per_node


def _spec_from_frozen(N, frozen0, dyn):
    frozen0 = np.asarray(sorted(frozen0), dtype=np.int64)
    is_frozen = np.zeros(N, dtype=bool)
    is_frozen[frozen0] = True
    info0 = np.flatnonzero(~is_frozen)
    nodes = tuple(segment_fic(frozen0, N))
    # frozen_after[i] = number of frozen positions strictly after i
    frozen_after = np.cumsum(is_frozen[::-1])[::-1].astype(np.int64)
    frozen_after = np.concatenate([frozen_after[1:], [0]])
    spec = PolarCodeSpec(
        N=N, K=int(info0.size), info_set=info0, frozen_set=frozen0,
        dyn=dyn, fic_nodes=nodes, is_frozen=is_frozen,
        frozen_after=frozen_after,
        node_dyn=_build_node_dyn(nodes, ~is_frozen, dyn),
    )
    return spec


def build_code(N, K, reliability_order=None, dyn=None):
    """Construct a code spec from a reliability order.

    Parameters
    ----------
    N, K : int
        Block length (power of two) and information length.
    reliability_order : array_like, optional
        Permutation of 0..N-1 ordered least to most reliable; the last K
        entries become the information set.  Defaults to the bundled 5G
        sequence (valid for N <= 1024).
    dyn : DynFrozenCfg, optional
        Frozen-bit value model; defaults to all-zero frozen bits.
    """
    _check_power_of_two(N, "N")
    if not 0 <= K <= N:
        raise ValueError(f"need 0 <= K <= N, got K={K}, N={N}")
    if reliability_order is None:
        reliability_order = default_reliability_sequence(N)
    order = np.asarray(reliability_order, dtype=np.int64)
    if order.shape != (N,) or not np.array_equal(np.sort(order), np.arange(N)):
        raise ValueError("reliability_order must be a permutation of 0..N-1")
    if dyn is None:
        dyn = DynFrozenCfg()
    return _spec_from_frozen(N, order[:N - K], dyn)


def dynamic_frozen_value(u_prefix, i, spec):
    """Value of frozen bit i given the already-decided prefix u[0..i-1].

    Static bits and bits beyond the per-node dynamic cap return 0; a
    convolutional bit XORs the windowed earlier information bits.
    """
    if not spec.is_frozen[i]:
        raise ValueError(f"position {i} is not frozen")
    u_prefix = np.asarray(u_prefix)
    if u_prefix.shape[-1] < i:
        raise ValueError(f"prefix of length >= {i} required")
    for node, nd in zip(spec.fic_nodes, spec.node_dyn):
        if node.start <= i < node.end:
            sel = np.flatnonzero(nd.positions == i)
            if sel.size == 0:
                return 0
            taps = nd.taps[int(sel[0])]
            if taps.size == 0:
                return 0
            return int(np.bitwise_xor.reduce(u_prefix[..., taps], axis=-1))
    raise AssertionError("segmentation does not cover position")


def encode_info(info_bits, spec):
    """Map K information bits to the transmitted codeword.

    Frozen positions are filled per the spec's dynamic model; since
    dynamic windows only reference information positions, the fill is a
    single pass.
    """
    info_bits = np.asarray(info_bits, dtype=np.int8)
    if info_bits.shape != (spec.K,):
        raise ValueError(f"expected {spec.K} info bits, got shape {info_bits.shape}")
    u = np.zeros(spec.N, dtype=np.int8)
    u[spec.info_set] = info_bits
    for nd in spec.node_dyn:
        for i, taps in zip(nd.positions, nd.taps):
            if taps.size:
                u[i] = np.bitwise_xor.reduce(u[taps])
    return encode(u)


def is_valid_codeword(c, spec):
    """Check that c maps back to a u respecting every frozen constraint."""
    u = encode(c)
    if spec.dyn.mode != "convolutional":
        return not u[spec.frozen_set].any()
    expect = np.zeros(spec.N, dtype=np.int8)
    for nd in spec.node_dyn:
        for i, taps in zip(nd.positions, nd.taps):
            if taps.size:
                expect[i] = np.bitwise_xor.reduce(u[taps])
    return bool((u[spec.frozen_set] == expect[spec.frozen_set]).all())


# ---------------------------------------------------------------------------
# file formats


def load_reliability_sequence(path, N=None):
    """Read a reliability file: one 1-based index per line, least to most
    reliable.  With N given, returns the induced order for length N
    (entries <= N, 0-based)."""
    vals = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                vals.append(int(line))
    seq = np.asarray(vals, dtype=np.int64) - 1
    M = seq.size
    if M == 0 or not np.array_equal(np.sort(seq), np.arange(M)):
        raise ValueError(f"{path}: not a permutation of 1..{M}")
    if N is None:
        return seq
    _check_power_of_two(N, "N")
    if N > M:
        raise ValueError(f"sequence covers length {M}, requested {N}")
    return seq[seq < N]


def default_reliability_sequence(N):
    """The bundled 5G sequence restricted to length N (N <= 1024)."""
    ref = resources.files("polarkit.data").joinpath("reliability_5g_n1024.txt")
    with resources.as_file(ref) as path:
        return load_reliability_sequence(path, N)


def spec_to_text(spec):
    lines = [
        "polarkit-code v1",
        f"n: {spec.N}",
        f"k: {spec.K}",
        f"dyn_mode: {spec.dyn.mode}",
        f"g: {''.join(str(b) for b in spec.dyn.g)}",
        f"f_d: {'unbounded' if spec.dyn.f_d is None else spec.dyn.f_d}",
        "frozen: " + " ".join(str(int(i) + 1) for i in spec.frozen_set),
    ]
    return "\n".join(lines) + "\n"


def spec_from_text(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "polarkit-code v1":
        raise ValueError("not a polarkit code file")
    kv = {}
    for ln in lines[1:]:
        key, _, val = ln.partition(":")
        kv[key.strip()] = val.strip()
    N = int(kv["n"])
    g = tuple(int(b) for b in kv.get("g", ""))
    f_d_raw = kv.get("f_d", "unbounded")
    f_d = None if f_d_raw == "unbounded" else int(f_d_raw)
    dyn = DynFrozenCfg(mode=kv.get("dyn_mode", "static_zero"), g=g, f_d=f_d)
    frozen = [int(t) - 1 for t in kv.get("frozen", "").split()]
    spec = _spec_from_frozen(N, frozen, dyn)
    if spec.K != int(kv["k"]):
        raise ValueError("k does not match frozen set size")
    return spec


def save_spec(spec, path):
    with open(path, "w") as f:
        f.write(spec_to_text(spec))


def load_spec(path):
    with open(path) as f:
        return spec_from_text(f.read())
