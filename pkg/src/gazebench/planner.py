"""Receding-horizon grid planner on the belief map."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage

from . import kernels
from .robot import RobotModel
from .trajectory import Trajectory, wrap_angle
from .voxel import CellState, GridSpec, OccupancyGrid, OutOfBounds, world_to_voxel
from .world import body_layers


class NoPath(RuntimeError):
    pass


@dataclass(frozen=True)
class PlanConfig:
    replan_interval: int = 5
    unknown_policy: str = "free"  # "free" | "occupied"
    inflation_radius: float = 6.0  # cells
    footprint_radius: float = 5.0  # cells; floor for the fallback inflation
    base_speed: float = 1.0  # cells per step

    def __post_init__(self):
        if self.replan_interval < 1:
            raise ValueError("replan_interval must be >= 1")
        if self.unknown_policy not in ("free", "occupied"):
            raise ValueError("unknown_policy must be 'free' or 'occupied'")
        if self.inflation_radius < self.footprint_radius:
            raise ValueError("inflation radius must cover the footprint")

    @classmethod
    def for_robot(cls, robot: RobotModel, spec: GridSpec, **kw) -> "PlanConfig":
        r = robot.radius / spec.resolution
        kw.setdefault("footprint_radius", r)
        kw.setdefault("inflation_radius", r + 1.0)
        kw.setdefault("base_speed", robot.speed)
        return cls(**kw)

    def to_dict(self):
        return asdict(self)


def obstacle_columns(belief: OccupancyGrid, robot: RobotModel | None, unknown_policy: str = "free") -> np.ndarray:
    """2D mask of columns the base cannot enter, from cells below the robot's height."""
    hz = belief.spec.dims[2] if robot is None else body_layers(belief.spec, robot)
    cells = belief.cells[:, :, :hz]
    blocked = (cells == CellState.OCCUPIED).any(axis=2)
    if unknown_policy == "occupied":
        blocked |= (cells == CellState.UNKNOWN).any(axis=2)
    return blocked


def inflate(blocked: np.ndarray, radius: float) -> np.ndarray:
    """Cells whose centre is within ``radius`` cells of a blocked centre."""
    if not blocked.any():
        return np.zeros_like(blocked)
    dist = ndimage.distance_transform_edt(~blocked)
    return dist <= radius


def blocked_map(belief: OccupancyGrid, cfg: PlanConfig, robot: RobotModel | None = None, radius=None) -> np.ndarray:
    occ = obstacle_columns(belief, robot, cfg.unknown_policy)
    return inflate(occ, cfg.inflation_radius if radius is None else radius)


def _cell(spec: GridSpec, p) -> tuple[int, int]:
    i, j = world_to_voxel(spec, p[:2])
    return i, j


def densify(points: np.ndarray, step: float) -> np.ndarray:
    """Resample a polyline at uniform arc-length spacing no larger than ``step``."""
    seg = np.hypot(*np.diff(points, axis=0).T)
    total = float(seg.sum())
    if total == 0.0:
        return points[:1].copy()
    n = max(int(math.ceil(total / step - 1e-9)), 1)
    s = np.linspace(0.0, total, n + 1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    x = np.interp(s, cum, points[:, 0])
    y = np.interp(s, cum, points[:, 1])
    return np.column_stack([x, y])


def plan(belief: OccupancyGrid, start, goal, cfg: PlanConfig, robot: RobotModel | None = None,
         start_step: int = 0) -> Trajectory:
    """Shortest 8-connected path on the inflated belief, resampled to per-step states.

    If the start sits inside the inflation margin (but not on an obstacle)
    the search is retried with the bare footprint radius so the base can
    back away from a freshly seen obstacle.
    """
    spec = belief.spec
    try:
        si, sj = _cell(spec, start)
        gi, gj = _cell(spec, goal)
    except OutOfBounds as exc:
        raise NoPath(str(exc)) from exc
    occ = obstacle_columns(belief, robot, cfg.unknown_policy)
    if occ[si, sj] or occ[gi, gj]:
        raise NoPath("start or goal on an obstacle")
    path = None
    for radius in (cfg.inflation_radius, cfg.footprint_radius):
        blocked = inflate(occ, radius)
        if blocked[gi, gj]:
            continue
        blocked[si, sj] = False
        path = kernels.astar(blocked, si, sj, gi, gj)
        if len(path):
            break
        path = None
    if path is None:
        raise NoPath(f"no path from {(si, sj)} to {(gi, gj)}")

    res = spec.resolution
    centers = np.column_stack([spec.origin[0] + (path[:, 0] + 0.5) * res,
                               spec.origin[1] + (path[:, 1] + 0.5) * res])
    pts = np.vstack([np.asarray(start[:2], dtype=float)[None], centers[1:-1], np.asarray(goal[:2], dtype=float)[None]]) \
        if len(path) > 1 else np.vstack([start[:2], goal[:2]]).astype(float)
    xy = densify(pts, cfg.base_speed * res)
    dth = float(wrap_angle(goal[2] - start[2]))
    if len(xy) == 1:
        if abs(dth) < 1e-12:
            return Trajectory(start_step, [[xy[0, 0], xy[0, 1], goal[2]]])
        xy = np.vstack([xy, xy])
    frac = np.linspace(0.0, 1.0, len(xy))
    theta = wrap_angle(start[2] + dth * frac)
    theta[-1] = goal[2]
    return Trajectory(start_step, np.column_stack([xy, theta]))


def path_blocked(traj: Trajectory, index: int, blocked: np.ndarray, spec: GridSpec) -> bool:
    """Whether any state after ``index`` lies on a blocked column."""
    rest = traj.states[index + 1:]
    if len(rest) == 0:
        return False
    ij = np.floor((rest[:, :2] - np.asarray(spec.origin[:2])) / spec.resolution).astype(np.int64)
    ij[:, 0] = np.clip(ij[:, 0], 0, blocked.shape[0] - 1)
    ij[:, 1] = np.clip(ij[:, 1], 0, blocked.shape[1] - 1)
    return bool(blocked[ij[:, 0], ij[:, 1]].any())


def replan_due(step: int, last_plan_step: int | None, cfg: PlanConfig, path_is_blocked: bool = False) -> bool:
    if last_plan_step is None or path_is_blocked:
        return True
    return step - last_plan_step >= cfg.replan_interval
