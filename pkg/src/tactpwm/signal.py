"""PWM signal representation and value <-> pulse-width conversion.

Analog values travel as the on-time of a single, left-aligned pulse inside a
timing frame.  Widths are continuous durations in seconds; an optional tick
models finite timing resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class TimingFrame:
    """Input period ``t_in`` and output period ``t_out`` (seconds).

    ``tick`` is an optional timing resolution applied when encoding values;
    ``None`` keeps widths continuous.
    """

    t_in: float
    t_out: float
    tick: float | None = None

    def __post_init__(self):
        validate_frame(self)

    def period(self, against: str) -> float:
        if against == "input":
            return self.t_in
        if against == "output":
            return self.t_out
        raise DomainError(f"unknown period selector {against!r}; use 'input' or 'output'")


@dataclass(frozen=True)
class PwmSignal:
    """A pulse of ``width`` seconds. Width 0 means the input stays low."""

    width: float

    def __post_init__(self):
        if not math.isfinite(self.width) or self.width < 0:
            raise DomainError(f"pulse width must be finite and >= 0, got {self.width!r}")

    def check_within(self, period: float) -> PwmSignal:
        if self.width > period:
            raise DomainError(f"pulse width {self.width:.6g} s exceeds period {period:.6g} s")
        return self


def validate_frame(frame: TimingFrame) -> None:
    """Raise ConfigError unless both periods (and tick, if set) are finite and positive."""
    for name in ("t_in", "t_out"):
        value = getattr(frame, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
            raise ConfigError(f"{name} must be finite and > 0, got {value!r}")
    if frame.tick is not None and (not math.isfinite(frame.tick) or frame.tick <= 0):
        raise ConfigError(f"tick must be finite and > 0 when set, got {frame.tick!r}")


def quantize_width(width: float, tick: float | None, period: float) -> float:
    """Round ``width`` to the nearest multiple of ``tick``, never past ``period``."""
    if tick is None:
        return width
    return min(round(width / tick) * tick, period)


def encode_value(x: float, frame: TimingFrame) -> PwmSignal:
    """Map ``x`` in [0, 1] to a pulse of width ``x * t_in``."""
    if not math.isfinite(x) or x < 0 or x > 1:
        raise DomainError(f"value must lie in [0, 1], got {x!r}")
    return PwmSignal(quantize_width(x * frame.t_in, frame.tick, frame.t_in))


def decode_width(s: PwmSignal, frame: TimingFrame, against: str = "input") -> float:
    """Fraction of the selected period covered by the pulse."""
    period = frame.period(against)
    s.check_within(period)
    return s.width / period
