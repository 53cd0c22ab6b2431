import numpy as np
import pytest

from tactpwm.devices import SubthresholdParams, VariationModel
from tactpwm.errors import ConfigError, DomainError, WeightFileError
from tactpwm.network import (LayerSpec, NetworkSpec, binarize_weights, build_layer, build_network,
                             forward_layer, forward_network, load_weights, save_weights)
from tactpwm.neuron import NeuronConfig
from tactpwm.signal import PwmSignal, TimingFrame

NS, FF = 1e-9, 1e-15


def _float_reference(mats, gains, x):
    y = np.asarray(x, dtype=float)
    for w, g in zip(mats, gains):
        y = g * np.maximum(np.asarray(w, dtype=float) @ y, 0.0)
    return y


def test_chip_sized_layer(cfg, rng):
    spec = LayerSpec(rng.choice([-1, 1], (10, 100)), cfg)
    layer = build_layer(spec)
    assert layer.n_bsus == 1000 and spec.n_neurons == 10
    assert layer.bsu(3, 7).weight == spec.weights[3, 7]


def test_minimal_layer(cfg):
    layer = build_layer(LayerSpec(np.array([[1]]), cfg))
    assert layer.n_bsus == 1


def test_same_seed_same_realization(cfg, rng):
    spec = LayerSpec(rng.choice([-1, 1], (4, 6)), cfg)
    a = build_layer(spec, VariationModel(0.01, 0, 9))
    b = build_layer(spec, VariationModel(0.01, 0, 9))
    np.testing.assert_array_equal(a.mult_plus, b.mult_plus)
    np.testing.assert_array_equal(a.mult_minus, b.mult_minus)


def test_layer_spec_rejects_bad_weights(cfg):
    with pytest.raises(ConfigError):
        LayerSpec(np.array([[1, 0]]), cfg)
    with pytest.raises(ConfigError):
        LayerSpec(np.array([1, -1]), cfg)


def test_zero_inputs_propagate(cfg, ideal, rng):
    layer = build_layer(LayerSpec(rng.choice([-1, 1], (5, 8)), cfg, ideal))
    assert [s.width for s in forward_layer(layer, [PwmSignal(0.0)] * 8)] == [0.0] * 5


def test_one_hot_identical_rows(cfg, ideal, rng):
    w = rng.choice([-1, 1], (6, 8))
    w[:, 3] = 1
    layer = build_layer(LayerSpec(w, cfg, ideal))
    x = [PwmSignal(0.0)] * 8
    x[3] = PwmSignal(200 * NS)
    widths = [s.width for s in forward_layer(layer, x)]
    assert widths[0] > 0 and len(set(widths)) == 1


def test_random_layer_matches_per_neuron_reference(cfg, ideal, rng):
    w = rng.choice([-1, 1], (10, 100))
    layer = build_layer(LayerSpec(w, cfg, ideal))
    x = rng.uniform(0, 1, 100)
    out = forward_layer(layer, [PwmSignal(v * cfg.frame.t_in) for v in x])
    g = LayerSpec(w, cfg, ideal).gain
    expected = _float_reference([w], [g], x) * cfg.frame.t_out
    np.testing.assert_allclose([s.width for s in out], expected, rtol=1e-9, atol=1e-20)


def test_forward_layer_errors(cfg):
    layer = build_layer(LayerSpec(np.ones((2, 3), dtype=int), cfg))
    with pytest.raises(DomainError):
        forward_layer(layer, [PwmSignal(0.0)] * 2)
    with pytest.raises(DomainError):
        forward_layer(layer, [PwmSignal(400 * NS)] * 3)


def test_single_weight_network_is_proportional(cfg, ideal):
    net = NetworkSpec((LayerSpec(np.array([[1]]), cfg, ideal),))
    g = net.layers[0].gain
    for x in (0.0, 0.25, 0.5, 1.0):
        assert forward_network(net, [x])[0] == pytest.approx(g * x, rel=1e-12, abs=0)


def test_two_layer_network_matches_reference(frame, rng):
    cfg1 = NeuronConfig(600 * FF, 50 * FF, 0.2, 1.0, frame)
    p1 = SubthresholdParams(ideal_off=True)
    p2 = SubthresholdParams(i0=5e-11, ideal_off=True)
    w1, w2 = rng.choice([-1, 1], (3, 4)), rng.choice([-1, 1], (2, 3))
    net = NetworkSpec((LayerSpec(w1, cfg1, p1), LayerSpec(w2, cfg1, p2)))
    gains = [l.gain for l in net.layers]
    for _ in range(50):
        x = rng.uniform(0, 1, 4)
        np.testing.assert_allclose(forward_network(net, x), _float_reference([w1, w2], gains, x),
                                   rtol=1e-6, atol=1e-12)


def test_network_zero_input(cfg, rng):
    net = NetworkSpec((LayerSpec(rng.choice([-1, 1], (3, 4)), cfg, SubthresholdParams(ideal_off=True)),))
    assert forward_network(net, [0.0] * 4) == [0.0] * 3


def test_network_spec_checks(cfg):
    other = NeuronConfig(cfg.c_d, cfg.c_n, cfg.v_theta, cfg.v_dd, TimingFrame(500 * NS, 300 * NS))
    with pytest.raises(ConfigError):
        NetworkSpec((LayerSpec(np.ones((3, 4)), cfg), LayerSpec(np.ones((2, 3)), other)))
    with pytest.raises(ConfigError):
        NetworkSpec((LayerSpec(np.ones((3, 4)), cfg), LayerSpec(np.ones((2, 5)), cfg)))
    with pytest.raises(ConfigError):
        NetworkSpec(())


def test_forward_network_length_check(cfg):
    net = NetworkSpec((LayerSpec(np.ones((1, 2)), cfg),))
    with pytest.raises(DomainError):
        forward_network(net, [0.1])


def test_saturation_rate_reported(frame, ideal):
    cfg = NeuronConfig(0.0, 1 * FF, 0.2, 1.0, frame)
    layers = build_network(NetworkSpec((LayerSpec(np.ones((4, 50)), cfg, ideal),)))
    forward_network(layers, [1.0] * 50)
    assert layers[0].saturation_rate == 1.0


def test_binarize():
    np.testing.assert_array_equal(binarize_weights([[0.3, -0.7]]), [[1, -1]])
    np.testing.assert_array_equal(binarize_weights(np.zeros((2, 3))), np.ones((2, 3)))
    with pytest.raises(DomainError):
        binarize_weights([[np.nan]])


def test_binarize_random_matches_elementwise(rng):
    m = rng.normal(size=(20, 30))
    b = binarize_weights(m)
    for i in range(20):
        for j in range(30):
            assert b[i, j] == (1 if m[i, j] >= 0 else -1)


def test_weight_file_round_trip(tmp_path, rng):
    w = rng.choice([-1, 1], (10, 100)).astype(np.int8)
    save_weights(w, tmp_path / "w.txt")
    np.testing.assert_array_equal(load_weights(tmp_path / "w.txt"), w)


def test_weight_file_comments(tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("# header next\n2 2\n+1 -1\n# mid comment\n\n-1 +1\n")
    np.testing.assert_array_equal(load_weights(p), [[1, -1], [-1, 1]])


def test_weight_file_rejects_bad_token(tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("1 3\n+1 2 -1\n")
    with pytest.raises(WeightFileError) as err:
        load_weights(p)
    assert (err.value.line, err.value.column) == (2, 4)


def test_weight_file_row_count_mismatch(tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("10 100\n" + ("+1 " * 100 + "\n") * 9)
    with pytest.raises(WeightFileError, match="10 rows"):
        load_weights(p)


@pytest.mark.parametrize("text", ["", "3\n", "a b\n", "1 2\n+1\n"])
def test_weight_file_malformed(tmp_path, text):
    p = tmp_path / "w.txt"
    p.write_text(text)
    with pytest.raises(WeightFileError):
        load_weights(p)
