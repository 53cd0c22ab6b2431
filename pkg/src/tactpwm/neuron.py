"""Closed-form dual-rail neuron: charge, voltage-to-pulse conversion, ReLU.

Phase order per evaluation: reset both dendrites to 0 V, integrate the input
pulses over ``t_in``, isolate the comparator node, then ramp it over
``t_out``.  The comparator is a static threshold, so the output pulse is
``(v_mac / v_theta) * t_out`` wide until the node would exceed ``v_theta``,
at which point the rail saturates at ``t_out``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .devices import BinarySynapseUnit, SubthresholdParams, rail_currents
from .errors import ConfigError, DomainError
from .signal import PwmSignal, TimingFrame


@dataclass(frozen=True)
class NeuronConfig:
    """Electrical parameters of one dual-rail neuron (both rails identical).

    ``settle_v`` enables the resistor-diode charging correction: the node
    approaches ``settle_v`` exponentially instead of charging linearly.
    """

    c_d: float
    c_n: float
    v_theta: float
    v_dd: float
    frame: TimingFrame
    settle_v: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.c_d) and self.c_d >= 0):
            raise ConfigError(f"c_d must be >= 0, got {self.c_d!r}")
        if not (math.isfinite(self.c_n) and self.c_n > 0):
            raise ConfigError(f"c_n must be > 0, got {self.c_n!r}")
        if not (0 < self.v_theta <= self.v_dd):
            raise ConfigError(f"need 0 < v_theta <= v_dd, got {self.v_theta!r}, {self.v_dd!r}")
        if self.settle_v is not None and not self.settle_v > 0:
            raise ConfigError(f"settle_v must be > 0 when set, got {self.settle_v!r}")

    @property
    def c_total(self) -> float:
        return self.c_d + self.c_n

    @property
    def full_scale_charge(self) -> float:
        """Largest charge the VPC converts without saturating."""
        return self.c_total * self.v_theta


@dataclass(frozen=True)
class RailState:
    charge: float
    v_mac: float
    saturated: bool


@dataclass(frozen=True)
class NeuronOutput:
    w_plus: float
    w_minus: float
    w_relu: float
    rails: tuple[RailState, RailState]
    n_active: tuple[int, int] = (0, 0)

    @property
    def saturated(self) -> bool:
        return self.rails[0].saturated or self.rails[1].saturated

    @property
    def unreliable(self) -> bool:
        """Both rails clipped, so the difference carries no information."""
        return self.rails[0].saturated and self.rails[1].saturated


def accumulate_charge(contributions: Iterable[tuple[float, float]]) -> float:
    """Total charge ``sum(width * current)`` with compensated summation."""
    terms = []
    for width, current in contributions:
        if width < 0 or current < 0:
            raise DomainError(f"width and current must be >= 0, got ({width!r}, {current!r})")
        terms.append(width * current)
    return math.fsum(terms)


def mac_voltage(q: float, cfg: NeuronConfig) -> float:
    if q < 0:
        raise DomainError(f"charge must be >= 0, got {q!r}")
    return q / cfg.c_total


def settle(v_linear: float, settle_v: float | None) -> float:
    """Node voltage for resistor-diode charging that would reach ``v_linear`` ideally."""
    if settle_v is None:
        return v_linear
    return settle_v * -math.expm1(-v_linear / settle_v)


def vpc_ramp_current(cfg: NeuronConfig) -> float:
    """Ramp current that lifts ``c_n`` from 0 V to ``v_theta`` in exactly ``t_out``."""
    return cfg.c_n * cfg.v_theta / cfg.frame.t_out


def vpc_output_width(v_mac: float, cfg: NeuronConfig) -> tuple[float, bool]:
    if v_mac < 0:
        raise DomainError(f"v_mac must be >= 0, got {v_mac!r}")
    t_out = cfg.frame.t_out
    if v_mac > cfg.v_theta:
        return t_out, True
    return min(v_mac / cfg.v_theta * t_out, t_out), False


def relu_combine(w_plus: float, w_minus: float) -> float:
    if w_plus < 0 or w_minus < 0:
        raise DomainError("pulse widths must be >= 0")
    return max(w_plus - w_minus, 0.0)


def _rail(widths, on_currents, off_currents, t_in, cfg) -> RailState:
    q = math.fsum(np.concatenate([widths * on_currents, (t_in - widths) * off_currents]))
    v = settle(mac_voltage(max(q, 0.0), cfg), cfg.settle_v)
    return RailState(charge=q, v_mac=v, saturated=v > cfg.v_theta)


def simulate_arrays(widths, weights, cfg: NeuronConfig, params: SubthresholdParams,
                    mult_plus=1.0, mult_minus=1.0) -> NeuronOutput:
    """Array form of :func:`simulate_neuron`; ``widths`` in seconds, ``weights`` in {+1, -1}."""
    widths = np.asarray(widths, dtype=float)
    weights = np.asarray(weights)
    if widths.shape != weights.shape:
        raise DomainError(f"got {widths.size} inputs for {weights.size} synapses")
    t_in = cfg.frame.t_in
    if widths.size and (widths.min() < 0 or widths.max() > t_in):
        raise DomainError(f"input widths must lie in [0, t_in={t_in:.6g} s]")
    on_plus, on_minus = rail_currents(weights, True, params, mult_plus, mult_minus)
    off_plus, off_minus = rail_currents(weights, False, params, mult_plus, mult_minus)
    plus = _rail(widths, on_plus, off_plus, t_in, cfg)
    minus = _rail(widths, on_minus, off_minus, t_in, cfg)
    w_plus, _ = vpc_output_width(plus.v_mac, cfg)
    w_minus, _ = vpc_output_width(minus.v_mac, cfg)
    active = widths > 0
    return NeuronOutput(
        w_plus=w_plus,
        w_minus=w_minus,
        w_relu=relu_combine(w_plus, w_minus),
        rails=(plus, minus),
        n_active=(int(np.count_nonzero(active & (weights == 1))),
                  int(np.count_nonzero(active & (weights == -1)))),
    )


def simulate_neuron(inputs: Sequence[PwmSignal], synapses: Sequence[BinarySynapseUnit],
                    cfg: NeuronConfig, variation=None) -> NeuronOutput:
    """Run one dual-rail neuron over a vector of input pulses.

    ``variation`` is an optional ``(N, 2)`` array of (plus, minus) current
    multipliers, e.g. from :func:`~tactpwm.devices.sample_variation`; when
    omitted the multipliers stored on each synapse are used.  All synapses
    must share one :class:`SubthresholdParams`.
    """
    if len(inputs) != len(synapses):
        raise DomainError(f"got {len(inputs)} inputs for {len(synapses)} synapses")
    if not synapses:
        zero = RailState(0.0, 0.0, False)
        return NeuronOutput(0.0, 0.0, 0.0, (zero, zero))
    params = synapses[0].params
    if any(s.params != params for s in synapses):
        raise DomainError("all synapses of a neuron must share device parameters")
    if variation is None:
        mult = np.array([(s.variation_plus, s.variation_minus) for s in synapses])
    else:
        mult = np.asarray(variation, dtype=float)
        if mult.shape != (len(synapses), 2):
            raise DomainError(f"variation must have shape ({len(synapses)}, 2)")
    widths = np.array([s.width for s in inputs])
    weights = np.array([s.weight for s in synapses])
    return simulate_arrays(widths, weights, cfg, params, mult[:, 0], mult[:, 1])


def full_scale_gain(cfg: NeuronConfig, params: SubthresholdParams) -> float:
    """Normalized output per unit of normalized weighted input, ``I_on*t_in / (C*v_theta)``.

    Ideal devices and no saturation give ``w_relu / t_out = gain * max(sum w_i x_i, 0)``.
    """
    return params.on_current * cfg.frame.t_in / cfg.full_scale_charge
