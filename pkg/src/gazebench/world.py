"""Ground-truth environments, scripted dynamic obstacles, task sampling and collision checks."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .robot import RobotModel
from .voxel import CellState, GridSpec, OccupancyGrid, OutOfBounds, world_to_voxel

ENV_SCHEMA = "gazebench.environment/1"
TASK_SCHEMA = "gazebench.task/1"


class ParamsInfeasible(ValueError):
    pass


class NoFeasibleTask(RuntimeError):
    pass


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in cells: ``min`` corner index and ``size`` extents."""

    min: tuple[int, int, int]
    size: tuple[int, int, int]

    def to_dict(self):
        return {"min": list(self.min), "size": list(self.size)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(int(v) for v in d["min"]), tuple(int(v) for v in d["size"]))


def stamp_box(cells: np.ndarray, lo: Sequence[int], size: Sequence[int], value=CellState.OCCUPIED) -> None:
    """Write ``value`` into the part of the box that lies inside ``cells``."""
    sl = []
    for ax in range(3):
        a = max(int(lo[ax]), 0)
        b = min(int(lo[ax]) + int(size[ax]), cells.shape[ax])
        if b <= a:
            return
        sl.append(slice(a, b))
    cells[tuple(sl)] = value


@dataclass
class ScriptedObstacle:
    """Box moving piecewise-linearly through ``(step, min-corner)`` waypoints, in cells."""

    size: tuple[int, int, int]
    waypoints: list[tuple[int, tuple[float, float, float]]]

    def __post_init__(self):
        self.size = tuple(int(v) for v in self.size)
        self.waypoints = [(int(s), tuple(float(c) for c in p)) for s, p in self.waypoints]
        if not self.waypoints:
            raise ValueError("scripted obstacle needs at least one waypoint")
        steps = [s for s, _ in self.waypoints]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise ValueError("waypoint steps must be strictly increasing")

    def position_at(self, step: int) -> tuple[int, int, int]:
        wps = self.waypoints
        if step <= wps[0][0]:
            p = np.asarray(wps[0][1])
        elif step >= wps[-1][0]:
            p = np.asarray(wps[-1][1])
        else:
            for (s0, p0), (s1, p1) in zip(wps, wps[1:]):
                if s0 <= step <= s1:
                    a = (step - s0) / (s1 - s0)
                    p = (1 - a) * np.asarray(p0) + a * np.asarray(p1)
                    break
        return tuple(int(math.floor(c + 0.5)) for c in p)

    def to_dict(self):
        return {"size": list(self.size), "waypoints": [[s, list(p)] for s, p in self.waypoints]}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["size"]), [(s, tuple(p)) for s, p in d["waypoints"]])


@dataclass
class EnvParams:
    dims: tuple[int, ...] = (1000, 1000, 1)
    n_obstacles: int = 5
    size_range: tuple[int, int] = (10, 30)
    resolution: float = 1.0
    perimeter: int = 1
    # None: static boxes span the full grid height
    height_range: tuple[int, int] | None = None

    def to_dict(self):
        return {"dims": list(self.dims), "n_obstacles": self.n_obstacles, "size_range": list(self.size_range),
                "resolution": self.resolution, "perimeter": self.perimeter,
                "height_range": None if self.height_range is None else list(self.height_range)}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["dims"] = tuple(d["dims"])
        d["size_range"] = tuple(d["size_range"])
        if d.get("height_range") is not None:
            d["height_range"] = tuple(d["height_range"])
        return cls(**d)


@dataclass
class Environment:
    spec: GridSpec
    perimeter: int
    static_obstacles: list[Box] = field(default_factory=list)
    dynamic_obstacles: list[ScriptedObstacle] = field(default_factory=list)
    seed: int | None = None
    params: EnvParams | None = None

    def __post_init__(self):
        cells = np.full(self.spec.dims, CellState.FREE, dtype=np.uint8)
        p = self.perimeter
        if p > 0:
            cells[:p] = CellState.OCCUPIED
            cells[-p:] = CellState.OCCUPIED
            cells[:, :p] = CellState.OCCUPIED
            cells[:, -p:] = CellState.OCCUPIED
        for box in self.static_obstacles:
            stamp_box(cells, box.min, box.size)
        cells.setflags(write=False)
        self._static = cells

    @property
    def truth(self) -> OccupancyGrid:
        return OccupancyGrid(self.spec, self._static.copy())

    @property
    def is_static(self) -> bool:
        return not self.dynamic_obstacles

    def to_dict(self) -> dict:
        return {
            "schema": ENV_SCHEMA,
            "seed": self.seed,
            "params": None if self.params is None else self.params.to_dict(),
            "grid": self.spec.to_dict(),
            "perimeter": self.perimeter,
            "static_obstacles": [b.to_dict() for b in self.static_obstacles],
            "dynamic_obstacles": [d.to_dict() for d in self.dynamic_obstacles],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Environment":
        if d.get("schema") != ENV_SCHEMA:
            raise ValueError(f"unsupported environment schema {d.get('schema')!r}")
        return cls(
            spec=GridSpec.from_dict(d["grid"]),
            perimeter=int(d["perimeter"]),
            static_obstacles=[Box.from_dict(b) for b in d["static_obstacles"]],
            dynamic_obstacles=[ScriptedObstacle.from_dict(o) for o in d["dynamic_obstacles"]],
            seed=d.get("seed"),
            params=None if d.get("params") is None else EnvParams.from_dict(d["params"]),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))

    @classmethod
    def load(cls, path) -> "Environment":
        return cls.from_dict(json.loads(Path(path).read_text()))


def generate_environment(seed: int, params: EnvParams | None = None) -> Environment:
    """Random static boxes inside a walled workspace, a pure function of ``(seed, params)``."""
    params = params or EnvParams()
    spec = GridSpec(params.dims, params.resolution)
    nx, ny, nz = spec.dims
    lo, hi = (int(v) for v in params.size_range)
    p = int(params.perimeter)
    if lo < 1 or hi < lo:
        raise ParamsInfeasible(f"bad size range {params.size_range}")
    if hi > min(nx, ny) - 2 * p:
        raise ParamsInfeasible(f"obstacle size {hi} does not fit inside the perimeter")
    rng = np.random.default_rng(seed)
    boxes = []
    for _ in range(int(params.n_obstacles)):
        w = int(rng.integers(lo, hi + 1))
        d = int(rng.integers(lo, hi + 1))
        x0 = int(rng.integers(p, nx - p - w + 1))
        y0 = int(rng.integers(p, ny - p - d + 1))
        if params.height_range is None or nz == 1:
            hz = nz
        else:
            hz = int(rng.integers(params.height_range[0], params.height_range[1] + 1))
            hz = min(hz, nz)
        boxes.append(Box((x0, y0, 0), (w, d, hz)))
    return Environment(spec, p, boxes, [], seed=seed, params=params)


def truth_at(env: Environment, step: int) -> OccupancyGrid:
    if env.is_static:
        return env.truth
    cells = np.array(env._static)
    for obs in env.dynamic_obstacles:
        stamp_box(cells, obs.position_at(step), obs.size)
    return OccupancyGrid(env.spec, cells)


def _disc_cells(spec: GridSpec, x: float, y: float, radius: float):
    """Index ranges and squared distances of cell centres around ``(x, y)``."""
    res = spec.resolution
    ox, oy = spec.origin[0], spec.origin[1]
    i0 = max(int(math.floor((x - radius - ox) / res)), 0)
    i1 = min(int(math.floor((x + radius - ox) / res)), spec.dims[0] - 1)
    j0 = max(int(math.floor((y - radius - oy) / res)), 0)
    j1 = min(int(math.floor((y + radius - oy) / res)), spec.dims[1] - 1)
    cx = ox + (np.arange(i0, i1 + 1) + 0.5) * res - x
    cy = oy + (np.arange(j0, j1 + 1) + 0.5) * res - y
    d2 = cx[:, None] ** 2 + cy[None, :] ** 2
    return (i0, i1, j0, j1), d2


def body_layers(spec: GridSpec, robot: RobotModel) -> int:
    """Number of z layers whose centres lie below the robot's height."""
    if spec.is_2d:
        return 1
    centers = spec.origin[2] + (np.arange(spec.dims[2]) + 0.5) * spec.resolution
    return int(np.count_nonzero(centers < spec.origin[2] + robot.height))


def check_collision(truth: OccupancyGrid, pose: Sequence[float], robot: RobotModel) -> bool:
    """True iff an Occupied cell centre lies strictly inside the robot's disc/cylinder."""
    (i0, i1, j0, j1), d2 = _disc_cells(truth.spec, pose[0], pose[1], robot.radius)
    if i1 < i0 or j1 < j0:
        return False
    inside = d2 < robot.radius ** 2
    hz = body_layers(truth.spec, robot)
    occ = (truth.cells[i0:i1 + 1, j0:j1 + 1, :hz] == CellState.OCCUPIED).any(axis=2)
    return bool((occ & inside).any())


def footprint_cells(spec: GridSpec, pose: Sequence[float], robot: RobotModel) -> np.ndarray:
    """Flat indices the base covers: the cell under its centre plus every cell
    whose centre is strictly inside the footprint disc (all body layers in 3D)."""
    (i0, i1, j0, j1), d2 = _disc_cells(spec, pose[0], pose[1], robot.radius)
    mask = d2 < robot.radius ** 2
    ii, jj = np.nonzero(mask)
    ii = ii + i0
    jj = jj + j0
    try:
        ci, cj = world_to_voxel(spec, pose[:2])
        ii = np.append(ii, ci)
        jj = np.append(jj, cj)
    except OutOfBounds:
        pass
    hz = body_layers(spec, robot)
    cols = np.unique(ii * spec.dims[1] + jj)
    flat = (cols[:, None] * spec.dims[2] + np.arange(hz)[None, :]).ravel()
    return np.sort(flat)


@dataclass
class TaskSpec:
    task_id: str
    env_id: str
    seed: int | None
    start: tuple[float, float, float]
    goal: tuple[float, float, float]

    def to_dict(self):
        return {"schema": TASK_SCHEMA, "task_id": self.task_id, "env_id": self.env_id, "seed": self.seed,
                "start": [float(v) for v in self.start], "goal": [float(v) for v in self.goal]}

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != TASK_SCHEMA:
            raise ValueError(f"unsupported task schema {d.get('schema')!r}")
        return cls(d["task_id"], d["env_id"], d.get("seed"), tuple(d["start"]), tuple(d["goal"]))


def generate_task(env: Environment, seed: int, robot: RobotModel, plan_cfg=None, *,
                  min_distance: float = 0.0, max_rejections: int = 1000,
                  start=None, goal=None, task_id: str = "", env_id: str = "") -> TaskSpec:
    """Rejection-sample a start/goal pair the full-knowledge planner can connect.

    ``start`` / ``goal`` pin one end of the pair; the other is still sampled.
    """
    from .planner import NoPath, PlanConfig, plan

    plan_cfg = plan_cfg or PlanConfig.for_robot(robot, env.spec)
    truth = truth_at(env, 0)
    spec = env.spec
    free_cols = np.nonzero(~(truth.cells == CellState.OCCUPIED).any(axis=2).ravel())[0]
    if free_cols.size == 0:
        raise NoFeasibleTask("no free cells")
    rng = np.random.default_rng(seed)
    res = spec.resolution

    def sample():
        c = int(free_cols[rng.integers(free_cols.size)])
        i, j = divmod(c, spec.dims[1])
        theta = float(rng.uniform(-math.pi, math.pi))
        return (spec.origin[0] + (i + 0.5) * res, spec.origin[1] + (j + 0.5) * res, theta)

    for _ in range(max_rejections):
        s = tuple(start) if start is not None else sample()
        g = tuple(goal) if goal is not None else sample()
        if math.hypot(g[0] - s[0], g[1] - s[1]) < min_distance:
            continue
        if check_collision(truth, s, robot) or check_collision(truth, g, robot):
            continue
        try:
            plan(truth, s, g, plan_cfg, robot)
        except NoPath:
            continue
        return TaskSpec(task_id, env_id, seed, s, g)
    raise NoFeasibleTask(f"no feasible start/goal pair after {max_rejections} samples")
