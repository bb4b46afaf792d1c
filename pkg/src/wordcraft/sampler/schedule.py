"""Sampling schedule: uniform time grid from t=1 (noise) down to t=0 (data),
integrated with the Euler method."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_STEPS = 32


@dataclass(frozen=True)
class Schedule:
    steps: int = DEFAULT_STEPS
    times: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("schedule needs at least one step")
        times = self.times
        if times is None:
            times = np.linspace(1.0, 0.0, self.steps + 1)
        times = np.asarray(times, dtype=np.float64)
        if times.shape != (self.steps + 1,):
            raise ValueError(f"times must have {self.steps + 1} entries")
        if times[0] != 1.0 or times[-1] != 0.0:
            raise ValueError("time grid must start at 1 and end at 0")
        if not (np.diff(times) < 0).all():
            raise ValueError("time grid must be strictly decreasing")
        object.__setattr__(self, "times", times)

    def dt32(self, i):
        """Step increment t_{i+1} - t_i as float32 (negative)."""
        return np.float32(self.times[i + 1] - self.times[i])

    def to_list(self):
        return [float(t) for t in self.times]
