"""Closed-loop episode: sense, replan, choose gaze, move, check."""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from ..gaze import ControllerKind, EpisodeView, controller_step, slew
from ..planner import NoPath, blocked_map, path_blocked, plan, replan_due
from ..sensing import camera_pose, observe
from ..trajectory import wrap_angle
from ..voxel import ObservationTimeMap, OccupancyGrid, advance_clock, coverage, write_pgm
from ..world import Environment, TaskSpec, check_collision, footprint_cells, truth_at
from .config import RunConfig

RESULT_SCHEMA = "gazebench.results/1"
LATENCY_FIELDS = ("decision_latencies",)


@dataclass
class EpisodeResult:
    task_id: str
    env_id: str
    controller: str
    seed: int | None
    collision_free: bool
    reached_goal: bool
    coverage: float
    occupancy_staleness: list[int]
    steps_taken: int
    decision_latencies: list[float]
    config_digest: str
    termination: str = ""
    path: list | None = None

    @property
    def success(self) -> bool:
        return self.collision_free and self.reached_goal

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["path"] is None:
            del d["path"]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EpisodeResult":
        return cls(**{k: d.get(k) for k in cls.__dataclass_fields__ if k in d or k == "path"})


@dataclass
class StepRecord:
    """Per-step snapshot handed to ``on_step`` callbacks (tests, frames)."""

    step: int
    base: np.ndarray
    head: tuple[float, float]
    belief: OccupancyGrid
    times: ObservationTimeMap
    observed: np.ndarray
    coverage: float
    new_cells: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    staleness: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))


def oracle_steps(env: Environment, task: TaskSpec, cfg: RunConfig) -> int:
    """Length in steps of the full-knowledge plan at step 0."""
    try:
        return plan(truth_at(env, 0), task.start, task.goal, cfg.plan, cfg.robot).duration
    except NoPath:
        return 0


def _at_goal(base, goal, cfg: RunConfig, res: float) -> bool:
    d = math.hypot(base[0] - goal[0], base[1] - goal[1])
    dth = abs(float(wrap_angle(base[2] - goal[2])))
    return d <= cfg.episode.goal_tolerance * res + 1e-9 and dth <= cfg.episode.heading_tolerance + 1e-9


def run_episode(task: TaskSpec, env: Environment, kind: ControllerKind | str, cfg: RunConfig,
                frames_dir=None, on_step: Callable[[StepRecord], None] | None = None) -> EpisodeResult:
    kind = ControllerKind(kind)
    spec = env.spec
    robot, fov = cfg.robot, cfg.fov
    res = spec.resolution
    belief = OccupancyGrid(spec)
    times = ObservationTimeMap(spec, cfg.gaze.t_clip)
    observed = np.zeros(spec.dims, dtype=bool)
    base = np.array(task.start, dtype=float)
    goal = np.array(task.goal, dtype=float)
    head = robot.clamp_head(0.0, cfg.controllers.ground_tilt if not spec.is_2d else 0.0)
    if cfg.episode.look_at_goal_first:
        pan = float(wrap_angle(math.atan2(goal[1] - base[1], goal[0] - base[0]) - base[2]))
        head = robot.clamp_head(pan, head[1])

    budget = max(int(math.ceil(cfg.episode.budget_factor * oracle_steps(env, task, cfg))), cfg.episode.min_budget)
    traj = None
    traj_index = 0
    last_plan = None
    latencies: list[float] = []
    staleness: list[int] = []
    path = [base.tolist()] if cfg.episode.record_path else None
    prev_foot = footprint_cells(spec, base, robot)
    collision_free = True
    reached = _at_goal(base, goal, cfg, res)
    termination = "goal" if reached else "budget"
    if frames_dir is not None:
        frames_dir = Path(frames_dir)
        frames_dir.mkdir(parents=True, exist_ok=True)

    step = 0
    while not reached and step < budget:
        truth = truth_at(env, step)
        observe(truth, belief, times, observed, camera_pose(base, head[0], head[1], robot, spec), fov)
        advance_clock(times)

        blocked = None
        stale_path = False
        if traj is not None:
            blocked = blocked_map(belief, cfg.plan, robot)
            stale_path = path_blocked(traj, traj_index, blocked, spec)
        if traj is None or replan_due(step, last_plan, cfg.plan, stale_path):
            try:
                traj = plan(belief, base, goal, cfg.plan, robot, start_step=step)
            except NoPath:
                traj = None
            traj_index = 0
            last_plan = step

        view = EpisodeView(step, base, head, traj, traj_index, times, spec, robot, fov, cfg.gaze, cfg.controllers)
        t0 = time.perf_counter()
        target = controller_step(kind, view)
        latencies.append(time.perf_counter() - t0)
        head = slew(head, target, robot.slew_rate)

        if traj is not None and traj_index < traj.duration:
            traj_index += 1
            base = traj.states[traj_index].copy()
        step += 1
        if path is not None:
            path.append([round(float(v), 6) for v in base])

        if check_collision(truth_at(env, step), base, robot):
            collision_free = False
            termination = "collision"
        foot = footprint_cells(spec, base, robot)
        new = np.setdiff1d(foot, prev_foot, assume_unique=True)
        sampled = times.t.reshape(-1)[new]
        staleness.extend(int(v) for v in sampled)
        prev_foot = foot

        if frames_dir is not None:
            write_pgm(frames_dir / f"step_{step:04d}.pgm", belief)
        if on_step is not None:
            on_step(StepRecord(step, base.copy(), head, belief, times, observed, coverage(observed), new, sampled))
        if not collision_free:
            break
        if _at_goal(base, goal, cfg, res):
            reached = True
            termination = "goal"

    return EpisodeResult(
        task_id=task.task_id,
        env_id=task.env_id,
        controller=kind.value,
        seed=task.seed,
        collision_free=collision_free,
        reached_goal=reached,
        coverage=coverage(observed),
        occupancy_staleness=staleness,
        steps_taken=step,
        decision_latencies=latencies,
        config_digest=cfg.digest(),
        termination=termination,
        path=path,
    )
