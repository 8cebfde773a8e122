"""Gaussian pump pulse in the rotating frame."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class PulseParams:
    """Gaussian envelope ``A exp(-(t - center)^2 / width^2) / (sqrt(2 pi) width)``.

    ``detuning`` is the residual carrier frequency omega_ex - omega_L in
    rad/ps; zero means a resonant pulse with a real drive.
    """

    amplitude: float = 10.0
    width: float = 10.0
    center: float | None = None
    detuning: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.width) and self.width > 0):
            raise InvalidParameterError("PulseParams.width", f"must be > 0, got {self.width}")
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise InvalidParameterError("PulseParams.amplitude", f"must be >= 0, got {self.amplitude}")
        if self.center is None:
            object.__setattr__(self, "center", 3.0 * self.width)
        if not math.isfinite(self.center):
            raise InvalidParameterError("PulseParams.center", "must be finite")
        if not math.isfinite(self.detuning):
            raise InvalidParameterError("PulseParams.detuning", "must be finite")

    @classmethod
    def from_area(cls, area: float, width: float, center: float | None = None, detuning: float = 0.0):
        """Build from the envelope area, which equals amplitude / sqrt(2)."""
        return cls(amplitude=area * math.sqrt(2.0), width=width, center=center, detuning=detuning)

    @property
    def area(self) -> float:
        return self.amplitude / math.sqrt(2.0)

    @property
    def peak(self) -> float:
        return self.amplitude / (_SQRT_2PI * self.width)


def envelope(p: PulseParams, t):
    t = np.asarray(t, dtype=float)
    out = p.amplitude * np.exp(-(((t - p.center) / p.width) ** 2)) / (_SQRT_2PI * p.width)
    return float(out) if out.ndim == 0 else out


def alpha(p: PulseParams, t):
    """Complex drive f(t) exp(i detuning t)."""
    t = np.asarray(t, dtype=float)
    out = envelope(p, t) * np.exp(1j * p.detuning * t)
    return complex(out) if np.ndim(out) == 0 else out
