"""The run configuration document: every tunable of an episode in one JSON object."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

from ..gaze import ControllerParams, GazeParams
from ..planner import PlanConfig
from ..robot import RobotModel
from ..sensing import FovParams

CONFIG_SCHEMA = "gazebench.config/1"


@dataclass(frozen=True)
class EpisodeConfig:
    budget_factor: float = 4.0  # step budget as a multiple of the oracle path length
    min_budget: int = 50
    goal_tolerance: float = 1.0  # cells
    heading_tolerance: float = math.pi / 8
    look_at_goal_first: bool = False
    record_path: bool = False


@dataclass(frozen=True)
class RunConfig:
    robot: RobotModel = field(default_factory=RobotModel)
    fov: FovParams = field(default_factory=FovParams)
    gaze: GazeParams = field(default_factory=GazeParams)
    plan: PlanConfig = field(default_factory=PlanConfig)
    controllers: ControllerParams = field(default_factory=ControllerParams)
    episode: EpisodeConfig = field(default_factory=EpisodeConfig)

    def to_dict(self) -> dict:
        return {
            "schema": CONFIG_SCHEMA,
            "robot": self.robot.to_dict(),
            "fov": self.fov.to_dict(),
            "gaze": self.gaze.to_dict(),
            "plan": self.plan.to_dict(),
            "controllers": self.controllers.to_dict(),
            "episode": asdict(self.episode),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        base = cls()
        return base.merged(d)

    def merged(self, overrides: dict) -> "RunConfig":
        """Copy with any subset of sections/fields replaced."""
        unknown = set(overrides) - {"schema", "robot", "fov", "gaze", "plan", "controllers", "episode"}
        if unknown:
            raise ValueError(f"unknown config sections: {sorted(unknown)}")
        out = self
        if "robot" in overrides:
            out = replace(out, robot=RobotModel.from_dict({**self.robot.to_dict(), **overrides["robot"]}))
        if "fov" in overrides:
            out = replace(out, fov=_update(self.fov, overrides["fov"]))
        if "gaze" in overrides:
            out = replace(out, gaze=_update(self.gaze, overrides["gaze"]))
        if "plan" in overrides:
            out = replace(out, plan=_update(self.plan, overrides["plan"]))
        if "controllers" in overrides:
            merged = {**self.controllers.to_dict(), **overrides["controllers"]}
            if "primitives" in overrides["controllers"]:
                merged["primitives"] = {**self.controllers.primitives.to_dict(), **overrides["controllers"]["primitives"]}
            out = replace(out, controllers=ControllerParams.from_dict(merged))
        if "episode" in overrides:
            out = replace(out, episode=_update(self.episode, overrides["episode"]))
        return out

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _update(obj, values: dict):
    names = {f.name for f in fields(obj)}
    bad = set(values) - names
    if bad:
        raise ValueError(f"unknown fields for {type(obj).__name__}: {sorted(bad)}")
    return replace(obj, **values)
