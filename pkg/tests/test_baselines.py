import math

import numpy as np
import pytest

from ecgmee import (
    BaselineConfig,
    approximate_entropy,
    fuzzy_entropy,
    permutation_entropy,
    sample_entropy,
)
from ecgmee.errors import NonpositiveTolerance, SequenceTooShort, UndefinedEntropy
from oracles import naive_ae, naive_fe, naive_pe, naive_se, random_sequences

CFG = BaselineConfig()  # order 4, step 1, m 2, r 0.2 sd, n 2


def test_pe_increasing_sequence_is_zero():
    cfg = BaselineConfig(pe_order_n=3)
    assert permutation_entropy([0, 1, 2, 3, 4], cfg) == 0.0


def test_pe_constant_sequence_is_zero():
    cfg = BaselineConfig(pe_order_n=3)
    assert permutation_entropy([1, 1, 1, 1], cfg) == 0.0


def test_pe_hand_value():
    # [1,3,2,4], n=2: patterns up, down, up
    cfg = BaselineConfig(pe_order_n=2)
    expected = -(2 / 3 * math.log(2 / 3) + 1 / 3 * math.log(1 / 3))
    assert permutation_entropy([1, 3, 2, 4], cfg) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.63651, abs=1e-5)


def test_pe_too_short():
    with pytest.raises(SequenceTooShort):
        permutation_entropy([1, 2], BaselineConfig(pe_order_n=3))


def test_pe_monotone_transform_invariance():
    rng = np.random.default_rng(1)
    x = rng.normal(size=200)
    cfg = BaselineConfig(pe_order_n=3)
    base = permutation_entropy(x, cfg)
    assert permutation_entropy(np.exp(x), cfg) == pytest.approx(base, abs=1e-12)
    assert permutation_entropy(3 * x + 11, cfg) == pytest.approx(base, abs=1e-12)


def test_pe_step_spacing():
    rng = np.random.default_rng(4)
    x = rng.normal(size=120)
    cfg = BaselineConfig(pe_order_n=3, pe_step=2)
    assert permutation_entropy(x, cfg) == pytest.approx(naive_pe(x, 3, 2), abs=1e-12)


def test_ae_constant_is_zero():
    assert approximate_entropy([2.0] * 50, CFG) == 0.0


def test_ae_matches_oracle_on_alternation():
    x = np.array([1.0, 2.0] * 32)
    r = 0.2 * x.std()
    assert approximate_entropy(x, CFG) == pytest.approx(naive_ae(x, 2, r), abs=1e-12)


def test_ae_too_short():
    with pytest.raises(SequenceTooShort):
        approximate_entropy([1.0, 2.0, 3.0], CFG)  # length m + 1


def test_se_constant_is_zero():
    assert sample_entropy([3.3] * 40, CFG) == 0.0


def test_se_undefined_when_no_m1_matches():
    # m-level matches exist ([0,0] pair) but no (m+1)-level pair is within r
    x = [0.0, 0.0, 0.0, 1.0, 5.0, 9.0]
    with pytest.raises(UndefinedEntropy):
        sample_entropy(x, CFG, r=0.05)


def test_se_matches_oracle_on_periodic():
    t = np.arange(64)
    x = np.sin(2 * np.pi * t / 16)
    r = 0.2 * x.std()
    assert sample_entropy(x, CFG) == pytest.approx(naive_se(x, 2, r), abs=1e-12)


def test_fe_constant_with_external_r():
    assert fuzzy_entropy([5.0] * 30, CFG, r=0.2) == pytest.approx(0.0, abs=1e-15)


def test_fe_nonpositive_tolerance():
    with pytest.raises(NonpositiveTolerance):
        fuzzy_entropy([5.0] * 30, CFG)  # sd = 0 -> r = 0


def test_fe_always_finite_on_noise():
    rng = np.random.default_rng(2)
    for _ in range(20):
        value = fuzzy_entropy(rng.normal(size=48), CFG)
        assert math.isfinite(value)


def test_fe_matches_oracle_on_periodic():
    t = np.arange(64)
    x = np.sin(2 * np.pi * t / 16) + 0.01 * np.cos(2 * np.pi * t / 5)
    r = 0.2 * x.std()
    assert fuzzy_entropy(x, CFG) == pytest.approx(naive_fe(x, 2, 2, r), abs=1e-12)


def test_fe_continuity_in_input():
    rng = np.random.default_rng(3)
    x = rng.normal(size=64)
    r = 0.2 * float(x.std())
    eps = 1e-6
    bumped = x.copy()
    bumped[10] += eps
    delta = abs(fuzzy_entropy(bumped, CFG, r=r) - fuzzy_entropy(x, CFG, r=r))
    assert delta <= 1e3 * eps


def test_offset_invariance_all_metrics():
    rng = np.random.default_rng(5)
    x = rng.normal(size=80).cumsum()  # walk: SE match counts stay positive
    shifted = x + 37.5
    assert permutation_entropy(shifted, CFG) == pytest.approx(
        permutation_entropy(x, CFG), abs=1e-10)
    assert approximate_entropy(shifted, CFG) == pytest.approx(
        approximate_entropy(x, CFG), abs=1e-10)
    assert sample_entropy(shifted, CFG) == pytest.approx(
        sample_entropy(x, CFG), abs=1e-10)
    assert fuzzy_entropy(shifted, CFG) == pytest.approx(
        fuzzy_entropy(x, CFG), abs=1e-10)


def test_determinism():
    rng = np.random.default_rng(6)
    x = rng.normal(size=96).cumsum()
    for fn in (permutation_entropy, approximate_entropy, sample_entropy, fuzzy_entropy):
        assert fn(x, CFG) == fn(x, CFG)


def test_oracle_agreement_sample():
    # quick slice of the full 200-sequence acceptance sweep
    for seq in random_sequences(24, 96, seed=7):
        r = 0.2 * float(np.asarray(seq).std())
        assert permutation_entropy(seq, CFG) == pytest.approx(
            naive_pe(seq, 4, 1), abs=1e-10)
        assert approximate_entropy(seq, CFG) == pytest.approx(
            naive_ae(seq, 2, r), abs=1e-10)
        assert fuzzy_entropy(seq, CFG) == pytest.approx(
            naive_fe(seq, 2, 2, r), abs=1e-10)
        expected_se = naive_se(seq, 2, r)
        if expected_se is None:
            with pytest.raises(UndefinedEntropy):
                sample_entropy(seq, CFG)
        else:
            assert sample_entropy(seq, CFG) == pytest.approx(expected_se, abs=1e-10)
