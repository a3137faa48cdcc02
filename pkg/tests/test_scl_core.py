import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import multiset, noisy_llrs, random_spec, ref_scl_replay
from polarkit.analysis import OpCounter
from polarkit.code_model import build_code, encode
from polarkit.scl_core import (combine_beta, f_func, g_func, pm_update_bit,
                               pm_update_codeword, scl_decode, select_paths)

finite_llr = st.floats(-30.0, 30.0)


def test_f_func_known_value():
    # ln((1 + e^2) / (2 e))
    assert f_func(1.0, 1.0) == pytest.approx(0.4337808304830272, abs=1e-12)
    assert f_func(1.0, -1.0) == pytest.approx(-0.4337808304830272, abs=1e-12)


@given(st.floats(-18.0, 18.0), st.floats(-18.0, 18.0))
@settings(max_examples=100)
def test_f_func_matches_tanh_rule(a, b):
    # exact check-node combine: 2 atanh(tanh(a/2) tanh(b/2)); the tanh
    # reference itself saturates past ~+-20, so stay below that
    t = np.tanh(a / 2.0) * np.tanh(b / 2.0)
    expect = 2.0 * np.arctanh(np.clip(t, -1 + 1e-16, 1 - 1e-16))
    assert f_func(a, b) == pytest.approx(expect, abs=1e-6)


def test_g_func_sign_convention():
    assert g_func(2.0, 3.0, 0) == 5.0
    assert g_func(2.0, 3.0, 1) == 1.0
    out = g_func(np.array([1.0, 1.0]), np.array([0.5, 0.5]),
                 np.array([0, 1]))
    assert np.allclose(out, [1.5, -0.5])


def test_combine_beta():
    left = np.array([[1, 0]], dtype=np.int8)
    right = np.array([[1, 1]], dtype=np.int8)
    assert np.array_equal(combine_beta(left, right), [[0, 1, 1, 1]])


def test_pm_update_bit_known_value():
    # wrong-side decision pays softplus(|llr|)
    assert pm_update_bit(0.0, 2.0, 1) == pytest.approx(
        np.log1p(np.exp(2.0)), abs=1e-12)
    assert pm_update_bit(1.0, 2.0, 0) == pytest.approx(
        1.0 + np.log1p(np.exp(-2.0)), abs=1e-12)


@given(st.lists(finite_llr, min_size=1, max_size=8), st.data())
@settings(max_examples=50)
def test_pm_update_codeword_equals_bitwise_total(llrs, data):
    llrs = np.array(llrs)
    s = np.array(data.draw(st.lists(st.integers(0, 1), min_size=llrs.size,
                                    max_size=llrs.size)))
    pm = 0.3
    for llr, bit in zip(llrs, s):
        pm = pm_update_bit(pm, llr, bit)
    assert pm_update_codeword(0.3, llrs, s) == pytest.approx(pm, abs=1e-10)


def test_select_paths_keeps_smallest_and_breaks_ties_early():
    kept, dropped = select_paths(np.array([3.0, 1.0, 2.0, 1.0]), 2)
    assert kept.tolist() == [1, 3]
    assert sorted(dropped.tolist()) == [0, 2]
    kept, dropped = select_paths(np.array([1.0, 2.0]), 4)
    assert kept.tolist() == [0, 1] and dropped.size == 0


def test_scl_rejects_bad_arguments():
    spec = build_code(8, 4)
    llrs = np.zeros(8)
    with pytest.raises(ValueError):
        scl_decode(llrs, spec, 0)
    with pytest.raises(ValueError):
        scl_decode(llrs, spec, 2, mode="fast")
    with pytest.raises(ValueError):
        scl_decode(np.zeros(7), spec, 2)


def test_noiseless_decode_recovers_codeword():
    spec = build_code(32, 16)
    rng = np.random.default_rng(0)
    u = np.zeros(32, dtype=np.int8)
    u[spec.info_set] = rng.integers(0, 2, 16)
    c = encode(u)
    llrs = 20.0 * (1.0 - 2.0 * c)
    paths, _ = scl_decode(llrs, spec, 4)
    best = paths.paths[paths.best_index()]
    assert np.array_equal(best.codeword, c)
    assert np.array_equal(best.u_hat, u)
    assert best.pm == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("N,K,L", [(16, 8, 1), (16, 8, 2), (16, 8, 4),
                                   (16, 5, 4), (16, 12, 8)])
def test_scl_matches_prefix_mass_replay(N, K, L):
    rng = np.random.default_rng(10 * N + K + L)
    for _ in range(6):
        spec = random_spec(N, K, rng)
        _, llrs = noisy_llrs(spec, rng)
        paths, _ = scl_decode(llrs, spec, L)
        rows = np.stack([p.u_hat for p in paths.paths])
        pms = np.array([p.pm for p in paths.paths])
        ref_rows, ref_pms, _ = ref_scl_replay(llrs, spec, L)
        assert multiset(rows, pms) == multiset(ref_rows, ref_pms)


def test_dynamic_scl_matches_replay():
    from polarkit.code_model import DynFrozenCfg
    dyn = DynFrozenCfg(mode="convolutional", g=(1, 0, 1, 1, 0, 1, 1),
                       f_d=None)
    spec = build_code(16, 8, dyn=dyn)
    rng = np.random.default_rng(3)
    for _ in range(6):
        _, llrs = noisy_llrs(spec, rng)
        paths, _ = scl_decode(llrs, spec, 4)
        rows = np.stack([p.u_hat for p in paths.paths])
        pms = np.array([p.pm for p in paths.paths])
        ref_rows, ref_pms, _ = ref_scl_replay(llrs, spec, 4)
        assert multiset(rows, pms) == multiset(ref_rows, ref_pms)


def test_codewords_match_encoded_paths():
    spec = build_code(32, 20)
    rng = np.random.default_rng(4)
    _, llrs = noisy_llrs(spec, rng)
    paths, _ = scl_decode(llrs, spec, 8)
    for p in paths.paths:
        assert np.array_equal(p.codeword, encode(p.u_hat))


def test_tracked_lambda_matches_replay():
    spec = build_code(16, 8)
    rng = np.random.default_rng(5)
    for _ in range(8):
        _, llrs = noisy_llrs(spec, rng)
        _, lam = scl_decode(llrs, spec, 2, track_soft=True)
        _, _, lam_ref = ref_scl_replay(llrs, spec, 2)
        if np.isinf(lam_ref):
            assert np.isinf(lam)
        else:
            assert lam == pytest.approx(lam_ref, abs=1e-9)


def test_lambda_is_minus_inf_when_nothing_discarded():
    spec = build_code(16, 3)
    rng = np.random.default_rng(6)
    _, llrs = noisy_llrs(spec, rng)
    _, lam = scl_decode(llrs, spec, 8, track_soft=True)
    assert lam == -np.inf


def test_f_func_counter_convention():
    counter = OpCounter()
    f_func(np.zeros(7), np.ones(7), counter=counter)
    got = counter.as_dict()
    # 4 adds + 1 compare + 2 softplus-internal adds counted separately
    assert got["add_sub"] == 4 * 7
    assert got["compare"] == 7
    assert got["softplus"] == 2 * 7
    assert got["hd_sign"] == 3 * 7


def test_select_paths_records_sort_size():
    counter = OpCounter()
    select_paths(np.arange(8.0), 4, counter=counter)
    assert counter.as_dict()["pm_sort_8"] == 1
