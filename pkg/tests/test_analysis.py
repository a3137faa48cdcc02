import numpy as np
import pytest

from conftest import noisy_llrs
from polarkit.analysis import (OpCounter, format_report, latency_constrained,
                               latency_unlimited, op_count_run, reports_csv)
from polarkit.code_model import build_code

# decode time steps with unbounded parallelism; rows are (N, K) and the
# inner triples are L = 2, 4, 8
UNLIMITED = {
    (256, 85): {"so_scl": (598, 600, 636), "so_fscl": (83, 97, 116),
                "fscl": (74, 90, 106)},
    (512, 256): {"so_scl": (1281, 1283, 1399), "so_fscl": (173, 201, 248),
                 "fscl": (155, 193, 240)},
    (1024, 512): {"so_scl": (2561, 2563, 2794), "so_fscl": (292, 338, 415),
                  "fscl": (260, 326, 405)},
}

# L = 4 with an operations-per-step budget; inner triples are
# N_par = 8, 32, 128 (frozen outputs of the budget model)
CONSTRAINED_SO_FSCL = {
    (256, 85): (488, 172, 106),
    (512, 256): (1279, 422, 233),
    (1024, 512): (2777, 861, 430),
}


@pytest.mark.parametrize("nk", sorted(UNLIMITED))
@pytest.mark.parametrize("decoder", ["so_scl", "so_fscl", "fscl"])
def test_unlimited_latency_table(nk, decoder):
    spec = build_code(*nk)
    for L, expect in zip((2, 4, 8), UNLIMITED[nk][decoder]):
        assert latency_unlimited(spec, L, decoder).total_steps == expect


@pytest.mark.parametrize("nk", sorted(CONSTRAINED_SO_FSCL))
def test_constrained_latency_table(nk):
    spec = build_code(*nk)
    for n_par, expect in zip((8, 32, 128), CONSTRAINED_SO_FSCL[nk]):
        got = latency_constrained(spec, 4, "so_fscl", n_par).total_steps
        assert got == expect


def test_constrained_bitwise_decoder_reference_point():
    spec = build_code(512, 256)
    assert latency_constrained(spec, 4, "so_scl", 32).total_steps == 1541


@pytest.mark.parametrize("decoder", ["so_scl", "so_fscl", "fscl"])
def test_constrained_converges_to_unlimited(decoder):
    spec = build_code(256, 85)
    for L in (2, 4):
        free = latency_unlimited(spec, L, decoder).total_steps
        assert latency_constrained(spec, L, decoder, 1 << 20).total_steps \
            == free


@pytest.mark.parametrize("decoder", ["so_scl", "so_fscl", "fscl"])
def test_latency_non_increasing_in_budget(decoder):
    spec = build_code(256, 85)
    prev = None
    for n_par in (4, 8, 16, 32, 64, 128, 256, 1024):
        steps = latency_constrained(spec, 4, decoder, n_par).total_steps
        if prev is not None:
            assert steps <= prev
        prev = steps
    assert prev >= latency_unlimited(spec, 4, decoder).total_steps


def test_latency_non_decreasing_in_list_size():
    spec = build_code(512, 256)
    for decoder in ("so_scl", "so_fscl", "fscl"):
        steps = [latency_unlimited(spec, L, decoder).total_steps
                 for L in (1, 2, 4, 8)]
        assert steps == sorted(steps)


def test_soft_costs_more_than_hard():
    for nk in sorted(UNLIMITED):
        spec = build_code(*nk)
        for L in (2, 4, 8):
            hard = latency_unlimited(spec, L, "fscl").total_steps
            soft = latency_unlimited(spec, L, "so_fscl").total_steps
            assert soft > hard


def test_per_node_rows_sum_to_total():
    spec = build_code(256, 85)
    rep = latency_unlimited(spec, 4, "so_fscl")
    assert len(rep.per_node) == len(spec.fic_nodes)
    # rows are (node, T_l, T_h, T_p, T_o, T_s): LLR descent plus the
    # exposed pipeline step, then the final APP fold on top
    body = sum(row[1] + row[-1] for row in rep.per_node)
    assert body + rep.final_app_steps == rep.total_steps


def test_latency_validation():
    spec = build_code(64, 32)
    with pytest.raises(ValueError):
        latency_unlimited(spec, 4, "turbo")
    with pytest.raises(ValueError):
        latency_constrained(spec, 4, "fscl", 0)


def test_op_counter_mechanics():
    c = OpCounter()
    c.add("add_sub", 3)
    c.add("add_sub", 2)
    c.add("compare", 0)  # zero-count adds are dropped
    c.sort("pm", 8)
    c.sort("pm", 8)
    c.sort("llr", 16)
    d = c.as_dict()
    assert d["add_sub"] == 5
    assert d["compare"] == 0
    assert d["pm_sort_8"] == 2
    assert d["llr_sort_16"] == 1


def test_op_count_run_exact_vs_hwf_kinds():
    spec = build_code(64, 32)
    rng = np.random.default_rng(0)
    _, llrs = noisy_llrs(spec, rng)
    exact = op_count_run(llrs, spec, 4, "so_fscl", mode="exact")
    hwf = op_count_run(llrs, spec, 4, "so_fscl", mode="hwf")
    assert exact.count("softplus") > 0 and exact.count("softplus_hwf") == 0
    assert hwf.count("softplus_hwf") > 0 and hwf.count("softplus") == 0
    # the approximation adds a compare and a scale per evaluation
    assert hwf.count("mul_div") >= exact.count("mul_div")


def test_soft_output_only_adds_operations():
    spec = build_code(64, 32)
    rng = np.random.default_rng(1)
    _, llrs = noisy_llrs(spec, rng)
    hard = op_count_run(llrs, spec, 4, "fscl")
    soft = op_count_run(llrs, spec, 4, "so_fscl")
    for kind in ("add_sub", "compare", "softplus"):
        assert soft.count(kind) >= hard.count(kind)
    assert soft.count("add_sub") > hard.count("add_sub")


def test_bitwise_decoder_costs_more_adds():
    # node decoding must reduce additions at equal (N, K, L)
    spec = build_code(512, 256)
    rng = np.random.default_rng(2)
    _, llrs = noisy_llrs(spec, rng)
    node = op_count_run(llrs, spec, 4, "so_fscl")
    bit = op_count_run(llrs, spec, 4, "so_scl")
    assert node.count("add_sub") < bit.count("add_sub")
    assert node.count("compare") < bit.count("compare")


def test_report_serialization():
    spec = build_code(64, 32)
    rep = latency_unlimited(spec, 2, "so_fscl")
    text = format_report(rep)
    assert "total_steps=" in text and "decoder=so_fscl" in text
    rng = np.random.default_rng(3)
    _, llrs = noisy_llrs(spec, rng)
    ops = op_count_run(llrs, spec, 2, "so_fscl")
    csv = reports_csv([ops, ops])
    lines = csv.splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("decoder,mode,add_sub")
    assert reports_csv([]) == ""
