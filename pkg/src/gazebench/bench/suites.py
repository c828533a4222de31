"""Canonical benchmark suites and their on-disk layout.

A generated suite directory holds ``suite.json`` (name, seed, run config,
task list) and one ``envs/<env_id>.json`` per environment.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from ..gaze import ControllerParams, GazeParams, PrimitiveGrid
from ..planner import PlanConfig
from ..robot import RobotModel
from ..sensing import FovParams
from ..voxel import GridSpec
from ..world import EnvParams, Environment, ScriptedObstacle, TaskSpec, generate_environment, generate_task
from .config import EpisodeConfig, RunConfig

SUITE_SCHEMA = "gazebench.suite/1"


@dataclass
class Suite:
    name: str
    seed: int
    config: RunConfig
    envs: dict[str, Environment]
    tasks: list[TaskSpec]
    meta: dict = field(default_factory=dict)

    def save(self, out) -> Path:
        out = Path(out)
        (out / "envs").mkdir(parents=True, exist_ok=True)
        for env_id, env in self.envs.items():
            env.save(out / "envs" / f"{env_id}.json")
        doc = {
            "schema": SUITE_SCHEMA,
            "name": self.name,
            "seed": self.seed,
            "meta": self.meta,
            "config": self.config.to_dict(),
            "tasks": [t.to_dict() for t in self.tasks],
        }
        (out / "suite.json").write_text(json.dumps(doc, indent=1))
        return out

    @classmethod
    def load(cls, path) -> "Suite":
        path = Path(path)
        doc = json.loads((path / "suite.json").read_text())
        if doc.get("schema") != SUITE_SCHEMA:
            raise ValueError(f"unsupported suite schema {doc.get('schema')!r}")
        tasks = [TaskSpec.from_dict(t) for t in doc["tasks"]]
        envs = {eid: Environment.load(path / "envs" / f"{eid}.json") for eid in sorted({t.env_id for t in tasks})}
        return cls(doc["name"], doc["seed"], RunConfig.from_dict(doc["config"]), envs, tasks, doc.get("meta", {}))


# --- 2d-small ----------------------------------------------------------------

def config_2d_small() -> RunConfig:
    # the 1000-cell workspace of the reference setup scaled down by 5
    robot = RobotModel(radius=2.0, height=1.0, speed=1.0, pan_limits=(-math.pi / 2, math.pi / 2),
                       tilt_limits=(-math.pi / 2, math.pi / 6), slew_rate=math.pi / 4, camera_height=0.0)
    return RunConfig(
        robot=robot,
        fov=FovParams(max_range=40.0),
        gaze=GazeParams(),
        plan=PlanConfig(replan_interval=5, inflation_radius=3.0, footprint_radius=2.0, base_speed=1.0),
        controllers=ControllerParams(primitives=PrimitiveGrid(pan_step=math.pi / 16, tilt_count=1)),
        episode=EpisodeConfig(),
    )


def build_2d_small(seed: int = 0, n_envs: int = 30, tasks_per_env: int = 5, config: RunConfig | None = None) -> Suite:
    cfg = config or config_2d_small()
    params = EnvParams(dims=(200, 200, 1), n_obstacles=5, size_range=(2, 6), resolution=1.0, perimeter=1)
    envs, tasks = {}, []
    for e in range(n_envs):
        env_seed = seed * 100_003 + e
        env_id = f"env_{e:03d}"
        env = generate_environment(env_seed, params)
        envs[env_id] = env
        for k in range(tasks_per_env):
            task_seed = env_seed * 1_000 + k
            tasks.append(generate_task(env, task_seed, cfg.robot, cfg.plan, min_distance=80.0,
                                       task_id=f"{env_id}_t{k}", env_id=env_id))
    return Suite("2d-small", seed, cfg, envs, tasks, {"n_envs": n_envs, "tasks_per_env": tasks_per_env})


# --- 3d-lite-dynamic ---------------------------------------------------------

@dataclass(frozen=True)
class CrossingScenario:
    """One box crossing the straight start-goal corridor; lengths in cells."""

    dims: tuple[int, int, int] = (64, 64, 16)
    resolution: float = 0.1
    start_x: float = 8.0
    goal_x: float = 56.0
    lane_y: float = 32.0
    box_size: tuple[int, int, int] = (6, 6, 10)
    cross_x: float = 30.0
    box_speed: float = 0.25  # cells per step
    # step at which the box centre reaches the corridor axis
    arrival_step: int = 22
    arrival_jitter: int = 3
    from_side: str = "random"  # "low" | "high" | "random"


def config_3d_lite() -> RunConfig:
    robot = RobotModel(radius=0.25, height=1.2, speed=1.0, pan_limits=(-3.84, 1.75),
                       tilt_limits=(-math.pi / 2, math.pi / 6), slew_rate=math.pi / 8, camera_height=1.0)
    return RunConfig(
        robot=robot,
        fov=FovParams(max_range=4.0),
        gaze=GazeParams(tau_c=3),
        plan=PlanConfig(replan_interval=5, inflation_radius=5.5, footprint_radius=2.5, base_speed=1.0),
        controllers=ControllerParams(
            panning_range=(-math.pi / 2, math.pi / 2),
            primitives=PrimitiveGrid(pan_count=16, tilt_count=9),
        ),
        episode=EpisodeConfig(look_at_goal_first=True),
    )


def crossing_environment(sc: CrossingScenario, seed: int) -> tuple[Environment, TaskSpec]:
    rng = np.random.default_rng(seed)
    spec = GridSpec(sc.dims, sc.resolution)
    res = sc.resolution
    side = sc.from_side if sc.from_side != "random" else ("low" if rng.random() < 0.5 else "high")
    arrival = sc.arrival_step + int(rng.integers(-sc.arrival_jitter, sc.arrival_jitter + 1))
    sx, sy, sz = sc.box_size
    x0 = sc.cross_x - sx / 2
    y_mid = sc.lane_y - sy / 2
    y_low, y_high = 1.0, sc.dims[1] - 1.0 - sy
    travel = (y_mid - y_low) / sc.box_speed
    if side == "low":
        y_from, y_to = y_low, y_high
    else:
        y_from, y_to = y_high, y_low
    t0 = arrival - travel
    total = abs(y_to - y_from) / sc.box_speed
    wps = [(int(round(t0)), (x0, y_from, 0.0)), (int(round(t0 + total)), (x0, y_to, 0.0))]
    if wps[0][0] < 0:
        # clip the script so it starts at step 0 partway along its path
        a = -wps[0][0] / (wps[1][0] - wps[0][0])
        wps[0] = (0, (x0, y_from + a * (y_to - y_from), 0.0))
    box = ScriptedObstacle((sx, sy, sz), wps)
    env = Environment(spec, 1, [], [box], seed=seed)
    theta_s = float(rng.uniform(-math.pi, math.pi))
    theta_g = float(rng.uniform(-math.pi, math.pi))
    start = ((sc.start_x + 0.5) * res, (sc.lane_y + 0.5) * res, theta_s)
    goal = ((sc.goal_x + 0.5) * res, (sc.lane_y + 0.5) * res, theta_g)
    task = TaskSpec(f"dyn_s{seed}", f"dyn_env_s{seed}", seed, start, goal)
    return env, task


def build_3d_lite_dynamic(seed: int = 0, n_seeds: int = 10, scenario: CrossingScenario | None = None,
                          config: RunConfig | None = None) -> Suite:
    sc = scenario or CrossingScenario()
    cfg = config or config_3d_lite()
    envs, tasks = {}, []
    for k in range(n_seeds):
        env, task = crossing_environment(sc, seed * 1_000 + k)
        envs[task.env_id] = env
        tasks.append(task)
    return Suite("3d-lite-dynamic", seed, cfg, envs, tasks, {"n_seeds": n_seeds, "scenario": sc.__dict__})


SUITES: dict[str, Callable[..., Suite]] = {
    "2d-small": build_2d_small,
    "3d-lite-dynamic": build_3d_lite_dynamic,
}
SUITE_CONFIGS: dict[str, Callable[[], RunConfig]] = {
    "2d-small": config_2d_small,
    "3d-lite-dynamic": config_3d_lite,
}


def build_suite(name: str, seed: int = 0, **kw) -> Suite:
    try:
        builder = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return builder(seed, **kw)
