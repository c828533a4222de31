from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Trajectory:
    """Uniformly stepped base states ``(x, y, theta)`` starting at decision step ``start_step``."""

    start_step: int
    states: np.ndarray

    def __post_init__(self):
        self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
        if self.states.shape[0] == 0 or self.states.shape[1] != 3:
            raise ValueError("trajectory needs at least one (x, y, theta) state")

    @property
    def duration(self) -> int:
        return self.states.shape[0] - 1

    def state_at(self, k: int) -> np.ndarray:
        """State ``k`` steps after the start, held at the final state."""
        k = min(max(int(k), 0), self.duration)
        return self.states[k]

    def suffix(self, k: int) -> "Trajectory":
        k = min(max(int(k), 0), self.duration)
        return Trajectory(self.start_step + k, self.states[k:])

    def max_step_length(self) -> float:
        if self.duration == 0:
            return 0.0
        return float(np.max(np.hypot(*np.diff(self.states[:, :2], axis=0).T)))

    def to_list(self) -> list:
        return [[round(float(v), 6) for v in s] for s in self.states]


def wrap_angle(a):
    """Wrap to [-pi, pi)."""
    return (np.asarray(a) + np.pi) % (2 * np.pi) - np.pi
