"""BinaryConnect layers built from BSU arrays and dual-rail neurons."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .devices import BinarySynapseUnit, SubthresholdParams, VariationModel, sample_variation
from .errors import ConfigError, DomainError, WeightFileError
from .neuron import NeuronConfig, NeuronOutput, full_scale_gain, simulate_arrays
from .signal import PwmSignal, decode_width, encode_value


@dataclass(frozen=True)
class LayerSpec:
    weights: np.ndarray  # (n_neurons, n_inputs) of +1/-1
    neuron_cfg: NeuronConfig
    device_params: SubthresholdParams = field(default_factory=SubthresholdParams)

    def __post_init__(self):
        w = np.asarray(self.weights)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise ConfigError(f"weights must be a non-empty 2-D matrix, got shape {w.shape}")
        if not np.all((w == 1) | (w == -1)):
            raise ConfigError("weight entries must be +1 or -1")
        object.__setattr__(self, "weights", w.astype(np.int8))

    @property
    def n_neurons(self) -> int:
        return self.weights.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.weights.shape[1]

    @property
    def gain(self) -> float:
        return full_scale_gain(self.neuron_cfg, self.device_params)


@dataclass(frozen=True)
class NetworkSpec:
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ConfigError("a network needs at least one layer")
        for k, (a, b) in enumerate(zip(layers, layers[1:])):
            if a.n_neurons != b.n_inputs:
                raise ConfigError(f"layer {k} has {a.n_neurons} neurons but layer {k + 1} "
                                  f"expects {b.n_inputs} inputs")
            if not math.isclose(a.neuron_cfg.frame.t_out, b.neuron_cfg.frame.t_in, rel_tol=1e-12):
                raise ConfigError(f"layer {k} t_out differs from layer {k + 1} t_in")
        object.__setattr__(self, "layers", layers)


@dataclass
class Layer:
    """An instantiated layer: the spec plus one mismatch realization per BSU."""

    spec: LayerSpec
    mult_plus: np.ndarray
    mult_minus: np.ndarray
    saturation_count: int = 0
    evaluations: int = 0

    @property
    def n_bsus(self) -> int:
        return self.spec.weights.size

    def bsu(self, neuron: int, inp: int) -> BinarySynapseUnit:
        return BinarySynapseUnit(
            weight=int(self.spec.weights[neuron, inp]),
            params=self.spec.device_params,
            variation_plus=float(self.mult_plus[neuron, inp]),
            variation_minus=float(self.mult_minus[neuron, inp]),
        )

    @property
    def saturation_rate(self) -> float:
        """Fraction of neuron evaluations so far with at least one clipped rail."""
        return self.saturation_count / self.evaluations if self.evaluations else 0.0


def build_layer(spec: LayerSpec, variation: VariationModel | None = None) -> Layer:
    shape = spec.weights.shape
    if variation is None:
        mult = np.ones(shape + (2,))
    else:
        flat = sample_variation(variation, spec.weights.size, spec.device_params.slope_norm)
        mult = flat.reshape(shape + (2,))
    return Layer(spec, mult[..., 0].copy(), mult[..., 1].copy())


def _widths(layer: Layer, inputs: Sequence[PwmSignal]) -> np.ndarray:
    if len(inputs) != layer.spec.n_inputs:
        raise DomainError(f"layer expects {layer.spec.n_inputs} inputs, got {len(inputs)}")
    t_in = layer.spec.neuron_cfg.frame.t_in
    for s in inputs:
        s.check_within(t_in)
    return np.array([s.width for s in inputs], dtype=float)


def forward_layer_detailed(layer: Layer, inputs: Sequence[PwmSignal]) -> list[NeuronOutput]:
    widths = _widths(layer, inputs)
    spec = layer.spec
    outs = [
        simulate_arrays(widths, spec.weights[j], spec.neuron_cfg, spec.device_params,
                        layer.mult_plus[j], layer.mult_minus[j])
        for j in range(spec.n_neurons)
    ]
    layer.evaluations += len(outs)
    layer.saturation_count += sum(o.saturated for o in outs)
    return outs


def forward_layer(layer: Layer, inputs: Sequence[PwmSignal]) -> list[PwmSignal]:
    return [PwmSignal(o.w_relu) for o in forward_layer_detailed(layer, inputs)]


def build_network(net: NetworkSpec, variation: VariationModel | None = None) -> list[Layer]:
    layers = []
    for k, spec in enumerate(net.layers):
        v = None
        if variation is not None:
            v = VariationModel(variation.sigma_vth, variation.jitter_sigma, variation.seed + k)
        layers.append(build_layer(spec, v))
    return layers


def forward_network(net: NetworkSpec | Sequence[Layer], x: Sequence[float],
                    return_trace: bool = False):
    """Encode ``x`` (values in [0, 1]), run every layer, decode the last outputs.

    Accepts either a spec (ideal devices) or layers from :func:`build_network`.
    With ``return_trace`` the per-layer :class:`NeuronOutput` lists are returned too.
    """
    layers = build_network(net) if isinstance(net, NetworkSpec) else list(net)
    first = layers[0].spec
    if len(x) != first.n_inputs:
        raise DomainError(f"network expects {first.n_inputs} inputs, got {len(x)}")
    for k, (a, b) in enumerate(zip(layers, layers[1:])):
        if not math.isclose(a.spec.neuron_cfg.frame.t_out, b.spec.neuron_cfg.frame.t_in,
                            rel_tol=1e-12):
            raise ConfigError(f"layer {k} t_out differs from layer {k + 1} t_in")
    signals = [encode_value(float(v), first.neuron_cfg.frame) for v in x]
    trace = []
    for layer in layers:
        outs = forward_layer_detailed(layer, signals)
        trace.append(outs)
        signals = [PwmSignal(o.w_relu) for o in outs]
    last = layers[-1].spec.neuron_cfg.frame
    y = [decode_width(s, last, "output") for s in signals]
    return (y, trace) if return_trace else y


def binarize_weights(real_matrix) -> np.ndarray:
    """Deterministic BinaryConnect binarization: sign, with 0 mapped to +1."""
    m = np.asarray(real_matrix, dtype=float)
    if not np.all(np.isfinite(m)):
        raise DomainError("weights must be finite to binarize")
    return np.where(m >= 0, 1, -1).astype(np.int8)


def save_weights(matrix, path) -> None:
    m = np.asarray(matrix)
    if m.ndim != 2 or not np.all((m == 1) | (m == -1)):
        raise DomainError("only 2-D +1/-1 matrices can be saved")
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    lines += [" ".join("+1" if v == 1 else "-1" for v in row) for row in m]
    Path(path).write_text("\n".join(lines) + "\n")


def load_weights(path) -> np.ndarray:
    """Parse a weight file: header ``rows cols`` then rows of ``+1``/``-1`` tokens."""
    header = None
    rows: list[list[int]] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = _tokens_with_columns(raw)
            if header is None:
                if len(tokens) != 2:
                    raise WeightFileError("header must be 'rows cols'", lineno, 1)
                try:
                    header = tuple(int(t) for t, _ in tokens)
                except ValueError:
                    raise WeightFileError("header dimensions must be integers", lineno, 1) from None
                if min(header) < 1:
                    raise WeightFileError("header dimensions must be >= 1", lineno, 1)
                continue
            row = []
            for tok, col in tokens:
                if tok in ("+1", "1"):
                    row.append(1)
                elif tok == "-1":
                    row.append(-1)
                else:
                    raise WeightFileError(f"invalid weight {tok!r}; expected +1 or -1", lineno, col)
            if len(row) != header[1]:
                raise WeightFileError(f"expected {header[1]} entries, found {len(row)}", lineno, 1)
            rows.append(row)
    if header is None:
        raise WeightFileError("missing 'rows cols' header")
    if len(rows) != header[0]:
        raise WeightFileError(f"header declares {header[0]} rows but {len(rows)} present")
    return np.array(rows, dtype=np.int8)


def _tokens_with_columns(line: str) -> list[tuple[str, int]]:
    out, col, n = [], 0, len(line)
    while col < n:
        if line[col].isspace():
            col += 1
            continue
        start = col
        while col < n and not line[col].isspace():
            col += 1
        out.append((line[start:col], start + 1))
    return out
