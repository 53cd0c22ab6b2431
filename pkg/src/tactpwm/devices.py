"""Switched current sources, binary synapse units and device mismatch.

A binary synapse unit (BSU) is an SRAM cell whose two storage nodes bias the
sources of a pair of pMOS transistors.  Those transistors run in subthreshold
and feed the plus/minus dendrite rails:

    I = i0 * exp((V_P - V_A) / slope_norm)

with V_P in {v_dd, 0} set by the stored weight and V_A the axon voltage
(``v_w`` while the input pulse is high, ``v_dd`` otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DomainError

DEFAULT_SLOPE_NORM = 0.036  # n * U_T with n = 1.4 at 300 K


@dataclass(frozen=True)
class SwitchedCurrentSource:
    nominal_current: float

    def __post_init__(self):
        if not math.isfinite(self.nominal_current) or self.nominal_current < 0:
            raise ConfigError(f"nominal_current must be >= 0, got {self.nominal_current!r}")

    def charge(self, width: float) -> float:
        return self.nominal_current * width


@dataclass(frozen=True)
class SubthresholdParams:
    """Subthreshold pMOS bias point shared by every BSU of an array.

    ``slope_norm = 1.0`` reproduces the textbook ``exp(V_P - V_A)`` literally.
    ``ideal_off`` zeroes every current except the selected rail's on-current,
    which turns the array into an exact weighted-sum oracle.
    """

    i0: float = 1e-12
    v_dd: float = 1.0
    v_w: float = 0.7
    slope_norm: float = DEFAULT_SLOPE_NORM
    ideal_off: bool = False

    def __post_init__(self):
        if not self.i0 > 0 or not math.isfinite(self.i0):
            raise ConfigError(f"i0 must be > 0, got {self.i0!r}")
        if not self.slope_norm > 0 or not math.isfinite(self.slope_norm):
            raise ConfigError(f"slope_norm must be > 0, got {self.slope_norm!r}")
        if not (0 <= self.v_w <= self.v_dd):
            raise ConfigError(f"need 0 <= v_w <= v_dd, got v_w={self.v_w!r}, v_dd={self.v_dd!r}")

    def drain_current(self, v_p: float, v_a: float) -> float:
        return self.i0 * math.exp((v_p - v_a) / self.slope_norm)

    @property
    def on_current(self) -> float:
        """Selected-rail current while the input pulse is high."""
        return self.drain_current(self.v_dd, self.v_w)

    @property
    def leak_current(self) -> float:
        """Selected-rail current while the input is low (gate at v_dd)."""
        return 0.0 if self.ideal_off else self.drain_current(self.v_dd, self.v_dd)

    @property
    def unselected_on_current(self) -> float:
        return 0.0 if self.ideal_off else self.drain_current(0.0, self.v_w)

    @property
    def unselected_leak_current(self) -> float:
        return 0.0 if self.ideal_off else self.drain_current(0.0, self.v_dd)


@dataclass(frozen=True)
class BinarySynapseUnit:
    weight: int
    params: SubthresholdParams
    variation_plus: float = 1.0
    variation_minus: float = 1.0

    def __post_init__(self):
        if self.weight not in (1, -1):
            raise DomainError(f"weight must be +1 or -1, got {self.weight!r}")
        if not (self.variation_plus > 0 and self.variation_minus > 0):
            raise DomainError("variation multipliers must be > 0")

    @property
    def source_voltages(self) -> tuple[float, float]:
        """(V_P+, V_P-) held by the SRAM flip-flop."""
        v_dd = self.params.v_dd
        return (v_dd, 0.0) if self.weight == 1 else (0.0, v_dd)


@dataclass(frozen=True)
class VariationModel:
    """Threshold-voltage mismatch and output-edge jitter, both Gaussian."""

    sigma_vth: float = 0.0
    jitter_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.sigma_vth >= 0:
            raise ConfigError(f"sigma_vth must be >= 0, got {self.sigma_vth!r}")
        if not self.jitter_sigma >= 0:
            raise ConfigError(f"jitter_sigma must be >= 0, got {self.jitter_sigma!r}")


def bsu_currents(bsu: BinarySynapseUnit, input_on: bool) -> tuple[float, float]:
    """Drain currents (i_plus, i_minus) the unit sources into its two rails."""
    p = bsu.params
    i_plus, i_minus = rail_currents(
        np.array([bsu.weight]), np.array([bool(input_on)]), p,
        np.array([bsu.variation_plus]), np.array([bsu.variation_minus]),
    )
    return float(i_plus[0]), float(i_minus[0])


def rail_currents(weights, input_on, params: SubthresholdParams, mult_plus=1.0, mult_minus=1.0):
    """Vectorized :func:`bsu_currents` over arrays of units.

    Mismatch multipliers scale every current through their transistor, on or
    off, since a threshold shift moves the whole subthreshold characteristic.
    """
    weights = np.asarray(weights)
    on = np.asarray(input_on, dtype=bool)
    plus_selected = weights == 1
    selected = np.where(on, params.on_current, params.leak_current)
    unselected = np.where(on, params.unselected_on_current, params.unselected_leak_current)
    i_plus = np.where(plus_selected, selected, unselected) * mult_plus
    i_minus = np.where(plus_selected, unselected, selected) * mult_minus
    return i_plus, i_minus


def program_weight(bsu: BinarySynapseUnit, w: int) -> BinarySynapseUnit:
    if w not in (1, -1):
        raise DomainError(f"weight must be +1 or -1, got {w!r}")
    return replace(bsu, weight=int(w))


def sample_variation(model: VariationModel, n_units: int, slope_norm: float = DEFAULT_SLOPE_NORM,
                     rng: np.random.Generator | None = None) -> np.ndarray:
    """Lognormal current multipliers, shape ``(n_units, 2)``: columns are (plus, minus).

    Each transistor gets an independent threshold shift ``d ~ N(0, sigma_vth)``
    and its current is scaled by ``exp(d / slope_norm)``.  Without ``rng`` the
    draw is seeded from ``model.seed``.
    """
    if n_units < 1:
        raise DomainError(f"n_units must be >= 1, got {n_units}")
    if model.sigma_vth == 0:
        return np.ones((n_units, 2))
    if rng is None:
        rng = np.random.default_rng(model.seed)
    shifts = rng.normal(0.0, model.sigma_vth, size=(n_units, 2))
    return np.exp(shifts / slope_norm)
