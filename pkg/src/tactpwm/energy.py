"""Per-evaluation energy and throughput accounting.

Energy of one neuron evaluation, per rail:

    e_mac = c_d * v_mac * v_dd + n_active * e_switch_mac
    e_vpc = c_n * (v_mac + v_theta) * v_dd + e_switch_vpc + p_cmp * (t_in + t_out)

Operations are counted two per synapse (multiply and add).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import ConfigError, DomainError
from .network import NetworkSpec, build_network, forward_network
from .neuron import NeuronConfig

DEFAULT_C_GATE = 0.5e-15


@dataclass(frozen=True)
class EnergyParams:
    """Switching energies of the input and ramp current sources, and comparator static power."""

    e_switch_mac: float = DEFAULT_C_GATE * 1.0**2
    e_switch_vpc: float = DEFAULT_C_GATE * 1.0**2
    p_cmp: float = 0.35e-6

    def __post_init__(self):
        for name in ("e_switch_mac", "e_switch_vpc", "p_cmp"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigError(f"{name} must be finite and >= 0, got {v!r}")

    @classmethod
    def from_gate_capacitance(cls, c_gate: float, v_dd: float, p_cmp: float) -> EnergyParams:
        e = c_gate * v_dd**2
        return cls(e_switch_mac=e, e_switch_vpc=e, p_cmp=p_cmp)


@dataclass(frozen=True)
class EnergyReport:
    e_mac: float
    e_vpc: float
    e_total: float
    ops: int
    ops_per_sec: float
    power: float
    efficiency: float

    def as_dict(self) -> dict:
        return asdict(self)


def charge_energy(c: float, v_c: float, v_dd: float) -> float:
    """Supply energy drawn to charge ``c`` to ``v_c`` from a ``v_dd`` source."""
    return c * v_c * v_dd


def mac_energy(cfg: NeuronConfig, v_mac: float, n_active_inputs: int, p: EnergyParams) -> float:
    if n_active_inputs < 0:
        raise DomainError(f"n_active_inputs must be >= 0, got {n_active_inputs}")
    return charge_energy(cfg.c_d, v_mac, cfg.v_dd) + n_active_inputs * p.e_switch_mac


def vpc_energy(cfg: NeuronConfig, v_mac: float, p: EnergyParams) -> float:
    frame = cfg.frame
    return (charge_energy(cfg.c_n, v_mac + cfg.v_theta, cfg.v_dd)
            + p.e_switch_vpc
            + p.p_cmp * (frame.t_in + frame.t_out))


def throughput_ops(n_synapses: int, ops_per_synapse: int, n_neurons: int, freq: float) -> float:
    return n_synapses * ops_per_synapse * n_neurons * freq


def efficiency(ops_per_sec: float, power: float) -> float:
    """Operations per second per watt (equivalently operations per joule)."""
    if not power > 0:
        raise DomainError(f"power must be > 0, got {power!r}")
    return ops_per_sec / power


def make_report(e_mac: float, e_vpc: float, ops: int, freq: float) -> EnergyReport:
    e_total = e_mac + e_vpc
    power = e_total * freq
    ops_per_sec = ops * freq
    return EnergyReport(
        e_mac=e_mac,
        e_vpc=e_vpc,
        e_total=e_total,
        ops=ops,
        ops_per_sec=ops_per_sec,
        power=power,
        efficiency=efficiency(ops_per_sec, power) if power > 0 else math.inf,
    )


def neuron_energy(cfg: NeuronConfig, out, p: EnergyParams) -> tuple[float, float]:
    """(e_mac, e_vpc) of one dual-rail evaluation from a ``NeuronOutput``."""
    e_mac = e_vpc = 0.0
    for rail, n_active in zip(out.rails, out.n_active):
        e_mac += mac_energy(cfg, rail.v_mac, n_active, p)
        e_vpc += vpc_energy(cfg, rail.v_mac, p)
    return e_mac, e_vpc


def inference_energy_report(net, x, p: EnergyParams, freq: float | None = None) -> EnergyReport:
    """Energy of one forward pass of ``net`` on input ``x``.

    ``freq`` is the evaluation rate used for power and throughput.  It
    defaults to back-to-back frames, ``1 / sum(t_in + t_out)`` over layers;
    measured chips usually run slower because of reset and readout overhead.
    """
    layers = build_network(net) if isinstance(net, NetworkSpec) else list(net)
    _, trace = forward_network(layers, x, return_trace=True)
    e_mac = e_vpc = 0.0
    ops = 0
    for layer, outs in zip(layers, trace):
        cfg = layer.spec.neuron_cfg
        for out in outs:
            m, v = neuron_energy(cfg, out, p)
            e_mac += m
            e_vpc += v
        ops += 2 * layer.spec.n_inputs * layer.spec.n_neurons
    if freq is None:
        freq = 1.0 / sum(l.spec.neuron_cfg.frame.t_in + l.spec.neuron_cfg.frame.t_out
                         for l in layers)
    return make_report(e_mac, e_vpc, ops, freq)
