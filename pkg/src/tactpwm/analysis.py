"""Monte Carlo error experiments, jitter averaging and input/output sweeps.

Every trial (or sweep point) ``k`` draws from its own stream
``SeedSequence(seed, spawn_key=(k,))``, so results do not depend on how many
trials run or in which order.  The mismatch realization is drawn once per
experiment from the variation seed: trials model repeated measurements of
one fabricated neuron with fresh weights and inputs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .devices import SubthresholdParams, VariationModel, sample_variation
from .errors import ConfigError, DomainError
from .neuron import NeuronConfig, NeuronOutput, full_scale_gain, simulate_arrays

TRIAL_COLUMNS = ("trial", "oracle_sum", "oracle_norm", "simulated_norm", "error_pct", "saturated")
SWEEP_COLUMNS = ("input_width_s", "mean_output_s", "std_output_s")


@dataclass(frozen=True)
class TrialConfig:
    n_trials: int
    n_inputs: int
    variation: VariationModel = field(default_factory=VariationModel)
    averaging_runs: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.n_trials < 1:
            raise ConfigError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.n_inputs < 1:
            raise ConfigError(f"n_inputs must be >= 1, got {self.n_inputs}")
        if self.averaging_runs < 1:
            raise ConfigError(f"averaging_runs must be >= 1, got {self.averaging_runs}")


@dataclass(frozen=True)
class NeuronSetup:
    """Electrical configuration of the neuron under test.

    ``multipliers`` pins a mismatch realization of shape ``(n_inputs, 2)``;
    ``None`` draws one from the experiment's variation model.
    """

    cfg: NeuronConfig
    params: SubthresholdParams
    multipliers: np.ndarray | None = None

    @property
    def gain(self) -> float:
        return full_scale_gain(self.cfg, self.params)

    def realize(self, n_inputs: int, variation: VariationModel | None) -> np.ndarray:
        if self.multipliers is not None:
            m = np.asarray(self.multipliers, dtype=float)
            if m.shape != (n_inputs, 2):
                raise DomainError(f"multipliers must have shape ({n_inputs}, 2), got {m.shape}")
            return m
        if variation is None:
            return np.ones((n_inputs, 2))
        return sample_variation(variation, n_inputs, self.params.slope_norm)

    def simulate(self, widths, weights, mult) -> NeuronOutput:
        return simulate_arrays(widths, weights, self.cfg, self.params, mult[:, 0], mult[:, 1])


@dataclass(frozen=True)
class ErrorStats:
    mean_abs_error_pct: float
    max_abs_error_pct: float
    std_ns: float
    per_trial: list = field(default_factory=list, repr=False)
    rows: list = field(default_factory=list, repr=False)

    def summary(self) -> dict:
        return {
            "mean_abs_error_pct": self.mean_abs_error_pct,
            "max_abs_error_pct": self.max_abs_error_pct,
            "std_ns": self.std_ns,
            "n_trials": len(self.per_trial),
        }


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def oracle_weighted_sum(weights: Sequence[int], widths: Sequence[float], t_in: float) -> float:
    """``sum(w_i * W_i / t_in)``; the products are exact, the sum correctly rounded."""
    if len(weights) != len(widths):
        raise DomainError(f"got {len(weights)} weights for {len(widths)} widths")
    for w in widths:
        if w < 0 or w > t_in:
            raise DomainError(f"width {w!r} outside [0, t_in]")
    return math.fsum(float(w) * float(W) for w, W in zip(weights, widths)) / t_in


def apply_jitter(width: float, model: VariationModel, rng: np.random.Generator) -> float:
    if width < 0:
        raise DomainError(f"width must be >= 0, got {width!r}")
    if model.jitter_sigma == 0:
        return width
    return max(width + rng.normal(0.0, model.jitter_sigma), 0.0)


def jittered_samples(width: float, model: VariationModel, runs: int,
                     rng: np.random.Generator) -> np.ndarray:
    if runs < 1:
        raise DomainError(f"runs must be >= 1, got {runs}")
    if model.jitter_sigma == 0:
        return np.full(runs, float(width))
    return np.maximum(width + rng.normal(0.0, model.jitter_sigma, size=runs), 0.0)


def average_jittered(width: float, model: VariationModel, runs: int,
                     rng: np.random.Generator) -> float:
    """Mean of ``runs`` independently jittered measurements of the same output pulse."""
    if model.jitter_sigma == 0:
        return float(width)
    return float(jittered_samples(width, model, runs, rng).mean())


def run_error_experiment(cfg: TrialConfig, setup: NeuronSetup) -> ErrorStats:
    """Random +/-1 weights and uniform input widths versus the ReLU'd oracle.

    Errors are percent of full-scale output.  The oracle is mapped through
    the nominal gain and clipped to full scale, as the hardware is.  Jitter
    only moves edges of a pulse that exists; an absent output stays absent.
    """
    n = cfg.n_inputs
    t_in, t_out = setup.cfg.frame.t_in, setup.cfg.frame.t_out
    gain = setup.gain
    mult = setup.realize(n, cfg.variation)
    errors = np.empty(cfg.n_trials)
    deviations = np.empty(cfg.n_trials)
    per_trial, rows = [], []
    for k in range(cfg.n_trials):
        rng = trial_rng(cfg.seed, k)
        weights = rng.integers(0, 2, size=n) * 2 - 1
        widths = rng.uniform(0.0, t_in, size=n)
        out = setup.simulate(widths, weights, mult)
        width = out.w_relu
        if width > 0:
            width = average_jittered(width, cfg.variation, cfg.averaging_runs, rng)
        oracle = oracle_weighted_sum(weights, widths, t_in)
        ref = min(gain * max(oracle, 0.0), 1.0)
        sim = width / t_out
        errors[k] = 100.0 * abs(sim - ref)
        deviations[k] = (sim - ref) * t_out
        per_trial.append((ref, sim))
        rows.append((k, oracle, ref, sim, errors[k], int(out.saturated)))
    return ErrorStats(
        mean_abs_error_pct=float(errors.mean()),
        max_abs_error_pct=float(errors.max()),
        std_ns=float(deviations.std() * 1e9),
        per_trial=per_trial,
        rows=rows,
    )


def sweep_input_output(setup: NeuronSetup, n_points: int, weights, base_widths=None, index: int = 0,
                       variation: VariationModel | None = None, runs: int = 1, seed: int = 0):
    """Sweep input ``index`` over [0, t_in] with the other inputs held at ``base_widths``.

    Returns ``(input_width, mean_output, std_output)`` per point, where the
    statistics are over ``runs`` jittered repetitions of the ReLU output.
    """
    if n_points < 2:
        raise DomainError(f"n_points must be >= 2, got {n_points}")
    weights = np.asarray(weights)
    n = weights.size
    if not 0 <= index < n:
        raise DomainError(f"index {index} out of range for {n} inputs")
    widths = np.zeros(n) if base_widths is None else np.array(base_widths, dtype=float)
    mult = setup.realize(n, variation)
    jitter = variation if variation is not None else VariationModel()
    points = []
    for k, w_in in enumerate(np.linspace(0.0, setup.cfg.frame.t_in, n_points)):
        widths[index] = w_in
        out = setup.simulate(widths, weights, mult)
        samples = jittered_samples(out.w_relu, jitter, runs, trial_rng(seed, k))
        std = float(samples.std(ddof=1)) if runs > 1 else 0.0
        points.append((float(w_in), float(samples.mean()), std))
    return points


def write_trials_csv(stats: ErrorStats, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRIAL_COLUMNS)
        for k, oracle, ref, sim, err, sat in stats.rows:
            writer.writerow((k, repr(oracle), repr(ref), repr(sim), repr(float(err)), sat))


def write_sweep_csv(points, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in points:
            writer.writerow([repr(v) for v in row])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]
