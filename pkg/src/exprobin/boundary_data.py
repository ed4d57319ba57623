"""Named boundary functions usable in configs: constants, cosines, bumps and
sample tables. Each one is a vectorized callable of the angle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, theta):
        return np.full(np.shape(theta), float(self.value))


@dataclass(frozen=True)
class Cosine:
    amplitude: float = 1.0
    frequency: int = 1
    phase: float = 0.0
    offset: float = 0.0

    def __call__(self, theta):
        t = np.asarray(theta, dtype=float)
        return self.offset + self.amplitude * np.cos(self.frequency * t + self.phase)


@dataclass(frozen=True)
class GaussianBump:
    amplitude: float = 1.0
    center: float = 0.0
    width: float = 0.25
    offset: float = 0.0

    def __call__(self, theta):
        t = np.asarray(theta, dtype=float)
        # periodic distance to the centre
        d = np.angle(np.exp(1j * (t - self.center)))
        return self.offset + self.amplitude * np.exp(-0.5 * (d / self.width) ** 2)


@dataclass(frozen=True)
class SampleTable:
    """Values at ``2 pi j / M``, ``j = 0..M-1``, linearly interpolated with wrap-around."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValueError("a sample table needs at least two values")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __call__(self, theta):
        t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        v = np.asarray(self.values)
        M = len(v)
        xp = np.arange(M + 1) * (TWO_PI / M)
        return np.interp(t, xp, np.append(v, v[0]))


@dataclass(frozen=True)
class Scaled:
    """``factor * base(theta)``; used for coefficients set relative to the threshold."""

    base: object
    factor: float

    def __call__(self, theta):
        return self.factor * self.base(theta)
