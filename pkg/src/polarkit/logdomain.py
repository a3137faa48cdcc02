"""Log-domain arithmetic shared by the decoders.

All soft quantities live in the log domain: a path with metric PM has
probability e^-PM, and the accumulator ``lambda_t`` carries ln of a
probability sum with -inf as the empty-sum sentinel.

Two arithmetic modes exist.  ``"exact"`` evaluates softplus exactly;
``"hwf"`` substitutes a hardware-friendly piecewise-linear approximation
for every softplus evaluation (and only for softplus -- the surrounding
adds, compares and sign flips are unchanged).
"""

import numpy as np

LLR_MAX = 60.0

LN2 = float(np.log(2.0))

_MODES = ("exact", "hwf")


def check_mode(mode):
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")


def softplus(x, mode="exact", counter=None):
    """ln(1 + e^x), elementwise, in the requested arithmetic mode.

    The hwf variant is max{0, x/4 + ln2} for x <= 0 and
    max{x, 3x/4 + ln2} for x > 0.  It preserves the exact identity
    softplus(x) - softplus(-x) = x, which keeps bit-flip metric deltas
    exact even in hwf mode.
    """
    check_mode(mode)
    x = np.asarray(x, dtype=np.float64)
    if counter is not None:
        counter.add("softplus" if mode == "exact" else "softplus_hwf", x.size)
        if mode == "hwf":
            # one scale, one add of ln2, one max per evaluation
            counter.add("mul_div", x.size)
            counter.add("add_sub", x.size)
            counter.add("compare", x.size)
    if mode == "exact":
        return np.logaddexp(x, 0.0)
    neg = np.maximum(0.0, 0.25 * x + LN2)
    pos = np.maximum(x, 0.75 * x + LN2)
    return np.where(x <= 0.0, neg, pos)


def box_plus(a, b, mode="exact", counter=None):
    """ln(e^a + e^b) with -inf as the additive identity."""
    check_mode(mode)
    if counter is not None:
        counter.add("add_sub", np.size(np.broadcast(np.asarray(a), np.asarray(b))))
    if mode == "exact":
        return np.logaddexp(a, b)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    with np.errstate(invalid="ignore"):  # -inf minus -inf below
        out = hi + softplus(lo - hi, mode="hwf", counter=counter)
    # empty-sum operand passes the other side through untouched
    out = np.where(np.isneginf(a), b, np.where(np.isneginf(b), a, out))
    if out.ndim == 0:
        return float(out)
    return out


def box_plus_reduce(values, mode="exact", counter=None):
    """Fold ln-domain terms: ln sum of e^v over ``values`` (-inf if empty).

    Exact mode uses a pairwise logaddexp reduction; hwf mode folds left to
    right so the evaluation order (and therefore the approximation error)
    is deterministic.
    """
    check_mode(mode)
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        return -np.inf
    if counter is not None:
        counter.add("add_sub", max(v.size - 1, 0))
    if mode == "exact":
        return float(np.logaddexp.reduce(v))
    acc = float(v.flat[0])
    for x in v.flat[1:]:
        acc = float(box_plus(acc, float(x), mode="hwf", counter=counter))
    return acc


def box_minus(a, b, mode="exact", counter=None):
    """ln(e^a - e^b) for a >= b; box_minus(x, x) = -inf.

    Raises ValueError when a < b: a probability difference cannot be
    negative.  Callers that can face benign floating-point violations
    (the high-rate lambda update) must guard before calling.
    """
    check_mode(mode)
    if mode == "hwf":
        # Eq-level design: the hwf pipeline replaces every ln(e^x - 1)
        # with a sum-form estimate, so this primitive must not be reached.
        raise ValueError("box_minus is not defined in hwf mode")
    a = float(a)
    b = float(b)
    if np.isneginf(b):
        return a
    if a < b:
        raise ValueError(f"box_minus requires a >= b, got a={a!r} b={b!r}")
    if a == b:
        return -np.inf
    if counter is not None:
        counter.add("add_sub", 1)
        counter.add("lnexpm1", 1)
    return b + float(np.log(np.expm1(a - b)))
