import json

import numpy as np
import pytest
from hypothesis import example, given, settings, strategies as st

from polarcoord.channels import (ChannelSpec, TargetSpec, bsc_crossover, capacity, cascade,
                                 is_degraded, joint_channel, lemma1_divergences, load_channel,
                                 make_bec, make_bsc, marginal_x, parse_preset, sample_output,
                                 sample_outputs)
from polarcoord.errors import ChannelError, ConfigError
from polarcoord.infotheory import binary_entropy, mutual_information

probs = st.floats(0.0, 0.5, allow_nan=False)
erasures = st.floats(0.0, 1.0, allow_nan=False)


def test_bsc_rows_and_endpoints():
    ch = make_bsc(0.15)
    assert np.allclose(ch.transition, [[0.85, 0.15], [0.15, 0.85]])
    assert ch.perm == (1, 0)
    assert capacity(make_bsc(0.0)) == pytest.approx(1.0, abs=1e-15)
    assert capacity(make_bsc(0.5)) == pytest.approx(0.0, abs=1e-15)


def test_bec_rows_and_endpoints():
    ch = make_bec(0.4)
    assert np.allclose(ch.transition, [[0.6, 0.4, 0.0], [0.0, 0.4, 0.6]])
    assert ch.outputs == (0, "?", 1) and ch.perm == (2, 1, 0)
    assert make_bec(0.0).transition[:, 1].tolist() == [0.0, 0.0]
    assert capacity(make_bec(1.0)) == pytest.approx(0.0, abs=1e-15)
    assert capacity(make_bec(0.4)) == pytest.approx(0.6, abs=1e-12)


@pytest.mark.parametrize("bad", [-0.1, 0.51, 2.0])
def test_bsc_range(bad):
    with pytest.raises(ChannelError):
        make_bsc(bad)


def test_bec_range():
    with pytest.raises(ChannelError):
        make_bec(1.2)


def test_row_sum_and_perm_validation():
    with pytest.raises(ChannelError):
        ChannelSpec((0, 1), [[0.5, 0.4], [0.5, 0.5]])
    with pytest.raises(ChannelError):
        ChannelSpec((0, 1, 2), [[0.5, 0.3, 0.2], [0.2, 0.3, 0.5]], perm=(1, 2, 0))
    with pytest.raises(ChannelError):
        ChannelSpec((0, 1), [[0.9, 0.1], [0.2, 0.8]], perm=(1, 0))


def test_transition_is_read_only():
    ch = make_bsc(0.1)
    with pytest.raises(ValueError):
        ch.transition[0, 0] = 0.5


def test_cascade_bsc_bec_matrix():
    ch = cascade(make_bsc(0.15), make_bec(0.4))
    assert np.allclose(ch.transition, [[0.51, 0.4, 0.09], [0.09, 0.4, 0.51]], atol=1e-15)
    assert ch.perm == (2, 1, 0)
    ident = cascade(make_bsc(0.0), make_bec(0.0))
    assert np.allclose(ident.transition, [[1, 0, 0], [0, 0, 1]])


def test_cascade_alphabet_mismatch():
    with pytest.raises(ChannelError):
        cascade(make_bec(0.2), make_bsc(0.1))


@given(p=probs, eps=erasures)
def test_cascade_closed_form(p, eps):
    ch = cascade(make_bsc(p), make_bec(eps))
    want = [[(1 - p) * (1 - eps), eps, p * (1 - eps)], [p * (1 - eps), eps, (1 - p) * (1 - eps)]]
    assert np.allclose(ch.transition, want, atol=1e-12)


@given(a=probs, b=probs, eps=erasures)
@example(a=0.0, b=0.0, eps=5e-324)   # output mass underflows to zero
@settings(max_examples=60)
def test_data_processing(a, b, eps):
    first = make_bsc(a)
    for second in (make_bsc(b), make_bec(eps)):
        c = cascade(first, second)
        assert np.allclose(c.transition.sum(axis=1), 1.0, atol=1e-12)
        assert capacity(c) <= min(capacity(first), capacity(second)) + 1e-10


def test_joint_channel_entries():
    ch = joint_channel(make_bsc(0.1), make_bsc(0.2))
    assert ch.transition[0, 0] == pytest.approx(0.72, abs=1e-15)
    noiseless = joint_channel(make_bsc(0.0), make_bsc(0.0))
    assert noiseless.transition[0].tolist() == [1.0, 0.0, 0.0, 0.0]
    assert noiseless.transition[1].tolist() == [0.0, 0.0, 0.0, 1.0]


def test_joint_capacity_is_mutual_information():
    wx, wy = make_bsc(0.1), cascade(make_bsc(0.05), make_bec(0.3))
    j = joint_channel(wx, wy)
    assert capacity(j) == pytest.approx(mutual_information([0.5, 0.5], j.transition), abs=1e-14)
    assert np.array_equal(marginal_x(j, 2), wx.transition) or \
        np.allclose(marginal_x(j, 2), wx.transition, atol=1e-15)


def test_joint_requires_symmetry():
    asym = ChannelSpec((0, 1), [[0.9, 0.1], [0.3, 0.7]])
    with pytest.raises(ChannelError):
        joint_channel(make_bsc(0.1), asym)


def test_capacity_examples():
    assert capacity(make_bsc(0.11)) == pytest.approx(0.500084, abs=5e-7)
    assert capacity(make_bsc(0.11)) == pytest.approx(1 - binary_entropy(0.11), abs=1e-14)


def test_capacity_rejects_asymmetric():
    with pytest.raises(ChannelError):
        capacity(ChannelSpec((0, 1), [[0.9, 0.1], [0.3, 0.7]]))


@pytest.mark.parametrize("ch", [make_bsc(0.11), make_bec(0.4), cascade(make_bsc(0.15), make_bec(0.4)),
                                joint_channel(make_bsc(0.1), make_bsc(0.2))])
def test_lemma1_identity(ch):
    d0, d1 = lemma1_divergences(ch)
    c = capacity(ch)
    assert abs(c - d0) < 1e-10 and abs(c - d1) < 1e-10


def test_is_degraded_examples():
    assert is_degraded(make_bsc(0.2), make_bsc(0.1))
    assert not is_degraded(make_bsc(0.1), make_bsc(0.2))
    wx, wy = make_bsc(0.1), cascade(make_bsc(0.2), make_bec(0.3))
    assert is_degraded(wx, joint_channel(wx, wy))
    assert is_degraded(make_bec(0.5), make_bec(0.2))


def test_sampling(rng):
    assert all(sample_output(make_bsc(0.0), 0, rng) == 0 for _ in range(50))
    y = sample_outputs(make_bsc(0.5), np.zeros(10 ** 6, dtype=np.int64), rng)
    assert abs(np.mean(y == 0) - 0.5) < 0.002
    a = sample_outputs(make_bec(0.3), np.arange(1000) % 2, np.random.default_rng(5))
    b = sample_outputs(make_bec(0.3), np.arange(1000) % 2, np.random.default_rng(5))
    assert np.array_equal(a, b)
    with pytest.raises(ChannelError):
        sample_output(make_bsc(0.1), 2, rng)


def test_bec_sampling_never_crosses(rng):
    y = sample_outputs(make_bec(0.3), np.zeros(20000, dtype=np.int64), rng)
    assert not np.any(y == 2)


def test_presets_and_json(tmp_path):
    assert bsc_crossover(parse_preset("bsc:0.2")) == pytest.approx(0.2)
    assert parse_preset("bec:0.4").n_outputs == 3
    assert np.allclose(parse_preset("bsc-bec:0.15,0.4").transition[0], [0.51, 0.4, 0.09])
    for bad in ("bsc", "awgn:1", "bsc:x", "bsc-bec:0.1"):
        with pytest.raises(ConfigError):
            parse_preset(bad)
    ch = cascade(make_bsc(0.15), make_bec(0.4))
    path = tmp_path / "ch.json"
    path.write_text(json.dumps(ch.to_dict()))
    back = load_channel(path)
    assert back.outputs == ch.outputs and back.perm == ch.perm
    assert np.array_equal(back.transition, ch.transition)
    with pytest.raises(ConfigError):
        load_channel(tmp_path / "missing.json")


def test_target_spec():
    t = TargetSpec(make_bsc(0.2))
    assert np.allclose(t.joint(), [[0.4, 0.1], [0.1, 0.4]])
    with pytest.raises(ConfigError):
        TargetSpec(make_bsc(0.2), (0.3, 0.7))
