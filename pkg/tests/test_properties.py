"""Randomized invariants; each runs at least 1000 generated cases."""

import os
import tempfile

import numpy as np
from hypothesis import given, settings, strategies as st

from tactpwm.devices import SubthresholdParams
from tactpwm.energy import EnergyParams, mac_energy, vpc_energy
from tactpwm.network import (LayerSpec, build_layer, forward_layer, load_weights, save_weights)
from tactpwm.neuron import NeuronConfig, simulate_arrays
from tactpwm.signal import PwmSignal, TimingFrame, decode_width, encode_value

NS, FF = 1e-9, 1e-15
N_CASES = 1000
FRAME = TimingFrame(300 * NS, 300 * NS)
CFG = NeuronConfig(600 * FF, 50 * FF, 0.2, 1.0, FRAME)
SMALL_CFG = NeuronConfig(0.0, 20 * FF, 0.2, 1.0, FRAME)  # saturates easily
IDEAL = SubthresholdParams(ideal_off=True)
LEAKY = SubthresholdParams()

seeds = st.integers(0, 2**32 - 1)
sizes = st.integers(1, 100)
prop = settings(max_examples=N_CASES, deadline=None)


def draw(seed, n, width_max=FRAME.t_in):
    rng = np.random.default_rng(seed)
    return rng.choice([-1, 1], n), rng.uniform(0, width_max, n), rng


# keep x * t_in a normal float; subnormal widths lose relative precision
unit_values = st.just(0.0) | st.floats(1e-200, 1)


@prop
@given(unit_values, st.floats(1e-9, 1e-3))
def test_encode_decode_round_trip(x, t_in):
    f = TimingFrame(t_in, t_in)
    back = decode_width(encode_value(x, f), f, "input")
    assert abs(back - x) <= 1e-15 * x


@prop
@given(st.floats(0, 1), st.floats(0, 1))
def test_encode_monotone(a, b):
    if a < b:
        assert encode_value(a, FRAME).width < encode_value(b, FRAME).width


@prop
@given(seeds, sizes)
def test_linearity_under_doubling(seed, n):
    weights, widths, _ = draw(seed, n, FRAME.t_in / 2)
    one = simulate_arrays(widths, weights, CFG, IDEAL)
    two = simulate_arrays(2 * widths, weights, CFG, IDEAL)
    assert not two.saturated
    np.testing.assert_allclose([two.w_plus, two.w_minus], [2 * one.w_plus, 2 * one.w_minus],
                               rtol=1e-12, atol=1e-24)


@prop
@given(seeds, sizes)
def test_rail_swap_symmetry(seed, n):
    weights, widths, _ = draw(seed, n)
    a = simulate_arrays(widths, weights, CFG, LEAKY)
    b = simulate_arrays(widths, -weights, CFG, LEAKY)
    assert (a.w_plus, a.w_minus) == (b.w_minus, b.w_plus)


@prop
@given(seeds, st.integers(1, 12), st.integers(1, 30))
def test_permutation_equivariance(seed, n_neurons, n_inputs):
    rng = np.random.default_rng(seed)
    w = rng.choice([-1, 1], (n_neurons, n_inputs))
    perm = rng.permutation(n_neurons)
    x = [PwmSignal(v) for v in rng.uniform(0, FRAME.t_in, n_inputs)]
    layer = build_layer(LayerSpec(w, CFG, LEAKY))
    layer.mult_plus = rng.lognormal(0, 0.3, w.shape)
    layer.mult_minus = rng.lognormal(0, 0.3, w.shape)
    permuted = build_layer(LayerSpec(w[perm], CFG, LEAKY))
    permuted.mult_plus, permuted.mult_minus = layer.mult_plus[perm], layer.mult_minus[perm]
    base = [s.width for s in forward_layer(layer, x)]
    assert [s.width for s in forward_layer(permuted, x)] == [base[j] for j in perm]


@prop
@given(seeds, sizes, st.floats(0, 1))
def test_saturation_clamp_monotone(seed, n, bump):
    weights, widths, rng = draw(seed, n)
    k = int(rng.integers(n))
    before = simulate_arrays(widths, weights, SMALL_CFG, IDEAL)
    widths2 = widths.copy()
    widths2[k] = widths[k] + bump * (FRAME.t_in - widths[k])
    after = simulate_arrays(widths2, weights, SMALL_CFG, IDEAL)
    rail = 0 if weights[k] == 1 else 1
    w_before = (before.w_plus, before.w_minus)
    w_after = (after.w_plus, after.w_minus)
    assert w_after[rail] >= w_before[rail]
    assert w_after[1 - rail] == w_before[1 - rail]
    assert 0 <= after.w_relu <= FRAME.t_out
    if weights[k] == 1:
        assert after.w_relu >= before.w_relu
    else:
        assert after.w_relu <= before.w_relu


@prop
@given(seeds, st.integers(1, 20), st.integers(1, 40))
def test_weight_file_round_trip(seed, rows, cols):
    w = np.random.default_rng(seed).choice([-1, 1], (rows, cols)).astype(np.int8)
    fd, path = tempfile.mkstemp(suffix=".txt")
    os.close(fd)
    try:
        save_weights(w, path)
        np.testing.assert_array_equal(load_weights(path), w)
    finally:
        os.unlink(path)


@prop
@given(seeds, sizes)
def test_outputs_stay_within_output_frame(seed, n):
    weights, widths, _ = draw(seed, n)
    out = simulate_arrays(widths, weights, SMALL_CFG, LEAKY)
    for w in (out.w_plus, out.w_minus, out.w_relu):
        assert 0 <= w <= FRAME.t_out


@prop
@given(st.floats(0, 0.5), st.floats(0, 0.5), st.integers(0, 100), st.integers(0, 100))
def test_energy_monotone_in_activity(v1, v2, n1, n2):
    p = EnergyParams()
    lo_v, hi_v = sorted((v1, v2))
    lo_n, hi_n = sorted((n1, n2))
    assert mac_energy(CFG, lo_v, lo_n, p) <= mac_energy(CFG, hi_v, hi_n, p)
    assert vpc_energy(CFG, lo_v, p) <= vpc_energy(CFG, hi_v, p)
