from __future__ import annotations

import math
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class RobotModel:
    """Holonomic base with a pan/tilt head camera.

    Lengths are world units; ``speed`` is cells per decision step and
    ``slew_rate`` radians per decision step per joint.
    """

    radius: float = 5.0
    height: float = 12.0
    speed: float = 1.0
    pan_limits: tuple[float, float] = (-math.pi / 2, math.pi / 2)
    tilt_limits: tuple[float, float] = (-math.pi / 2, math.pi / 6)
    slew_rate: float = math.pi / 8
    camera_height: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "pan_limits", tuple(float(v) for v in self.pan_limits))
        object.__setattr__(self, "tilt_limits", tuple(float(v) for v in self.tilt_limits))
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if not self.slew_rate > 0:
            raise ValueError("slew_rate must be positive")
        if not self.speed > 0:
            raise ValueError("speed must be positive")
        if not self.pan_limits[0] < self.pan_limits[1]:
            raise ValueError("degenerate pan limits")
        if not self.tilt_limits[0] < self.tilt_limits[1]:
            raise ValueError("degenerate tilt limits")

    def pan_ok(self, pan: float) -> bool:
        lo, hi = self.pan_limits
        return lo - 1e-9 <= pan <= hi + 1e-9

    def tilt_ok(self, tilt: float) -> bool:
        lo, hi = self.tilt_limits
        return lo - 1e-9 <= tilt <= hi + 1e-9

    def clamp_head(self, pan: float, tilt: float) -> tuple[float, float]:
        return (min(max(pan, self.pan_limits[0]), self.pan_limits[1]),
                min(max(tilt, self.tilt_limits[0]), self.tilt_limits[1]))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pan_limits"] = list(self.pan_limits)
        d["tilt_limits"] = list(self.tilt_limits)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RobotModel":
        return cls(**d)
