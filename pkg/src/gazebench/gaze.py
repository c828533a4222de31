"""Greedy voxelised-reward gaze control and the heuristic baselines.

The optimised controller runs, once per decision step:

    swept_occupancy -> assign_rewards -> enumerate_primitives
        -> evaluate_primitive (per primitive) -> select_best
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np

from . import kernels
from .robot import RobotModel
from .sensing import FovParams, _grid_args, camera_pose
from .trajectory import Trajectory, wrap_angle
from .voxel import GridSpec, ObservationTimeMap
from .world import body_layers

NOT_OCCUPIED = -1
INFEASIBLE_REWARD = -math.inf


class NoTrajectory(RuntimeError):
    pass


@dataclass
class SweptOccupancyMap:
    """Earliest trajectory index covering each voxel, ``NOT_OCCUPIED`` elsewhere."""

    spec: GridSpec
    v: np.ndarray

    @property
    def occupied(self) -> np.ndarray:
        return self.v != NOT_OCCUPIED


@dataclass(frozen=True)
class GazeParams:
    c1: float = 1e6
    c2: float = 1e3
    c3: float = 1.0
    tau_s: int | None = None  # None: ceil(T / 3) of the current trajectory
    tau_c: int = 10
    t_clip: int = 100
    literal_eq2: bool = False
    weighting: str = "uniform"  # "uniform" | "inverse_distance"

    def __post_init__(self):
        if not self.c1 > self.c2 > self.c3 > 0:
            raise ValueError("reward constants must satisfy c1 > c2 > c3 > 0")
        if not 0 <= self.tau_c <= self.t_clip:
            raise ValueError("tau_c must lie in [0, t_clip]")
        if self.tau_s is not None and self.tau_s < 0:
            raise ValueError("tau_s must be non-negative")
        if self.weighting not in ("uniform", "inverse_distance"):
            raise ValueError(f"unknown weighting {self.weighting!r}")

    def priority_horizon(self, duration: int) -> int:
        if self.tau_s is not None:
            return int(self.tau_s)
        return int(math.ceil(duration / 3))

    def scaled(self, lam: float) -> "GazeParams":
        return replace(self, c1=self.c1 * lam, c2=self.c2 * lam, c3=self.c3 * lam)

    def to_dict(self):
        return asdict(self)


@dataclass
class RewardField:
    spec: GridSpec
    r: np.ndarray


@dataclass(frozen=True)
class MotionPrimitive:
    pan: float
    tilt: float
    feasible: bool = True


def swept_occupancy(traj: Trajectory, robot: RobotModel, spec: GridSpec) -> SweptOccupancyMap:
    nx, ny, nz, ox, oy, _, res = _grid_args(spec)
    v = kernels.swept(np.ascontiguousarray(traj.states), float(robot.radius), body_layers(spec, robot),
                      nx, ny, nz, ox, oy, res)
    return SweptOccupancyMap(spec, v)


def assign_rewards(swept: SweptOccupancyMap, times: ObservationTimeMap, p: GazeParams,
                   tau_s: int | None = None) -> RewardField:
    """Tiered per-voxel reward.

    Swept cells at or before the priority horizon earn ``c1`` and later swept
    cells ``c2``, in both cases only once they have gone unobserved for
    ``tau_c`` steps. Everything else earns ``max(c3 * t, 1)``. With
    ``literal_eq2`` the near tier instead pays out while ``t < tau_c``.
    """
    if swept.spec != times.spec:
        raise ValueError("swept map and clock must share one spec")
    if tau_s is None:
        horizon = int(swept.v.max()) if swept.v.size else 0
        tau_s = p.priority_horizon(max(horizon, 0))
    t = times.t
    v = swept.v
    on_path = v != NOT_OCCUPIED
    stale = t >= p.tau_c
    near = on_path & (v <= tau_s)
    far = on_path & (v > tau_s)
    r = np.maximum(p.c3 * t, 1.0)
    r[far & stale] = p.c2
    if p.literal_eq2:
        r[near & ~stale] = p.c1
    else:
        r[near & stale] = p.c1
    return RewardField(swept.spec, r)


@dataclass(frozen=True)
class PrimitiveGrid:
    """Discretisation of the head joint space.

    ``pan_span`` / ``tilt_span`` default to the robot's joint limits; a wider
    span produces primitives tagged infeasible. Setting ``pan_count`` spaces
    that many pans evenly over the span, end points included, and ignores
    ``pan_step``.
    """

    pan_step: float = math.pi / 16
    tilt_count: int = 1
    pan_span: tuple[float, float] | None = None
    tilt_span: tuple[float, float] | None = None
    pan_count: int | None = None

    def to_dict(self):
        d = asdict(self)
        for k in ("pan_span", "tilt_span"):
            if d[k] is not None:
                d[k] = list(d[k])
        return d


def enumerate_primitives(robot: RobotModel, grid: PrimitiveGrid = PrimitiveGrid()) -> list[MotionPrimitive]:
    """Full pan x tilt grid, pan-major in ascending order."""
    plo, phi = grid.pan_span or robot.pan_limits
    if grid.pan_count:
        pans = np.linspace(plo, phi, grid.pan_count)
    else:
        n_pan = int(math.floor((phi - plo) / grid.pan_step + 1e-9)) + 1
        pans = plo + grid.pan_step * np.arange(n_pan)
    if grid.tilt_count <= 1:
        tlo, thi = robot.tilt_limits
        tilts = np.array([min(max(0.0, tlo), thi)])
    else:
        tlo, thi = grid.tilt_span or robot.tilt_limits
        tilts = np.linspace(tlo, thi, grid.tilt_count)
    return [MotionPrimitive(float(p), float(t), robot.pan_ok(p) and robot.tilt_ok(t)) for p in pans for t in tilts]


def _weight_mode(p: GazeParams | None) -> bool:
    return p is not None and p.weighting == "inverse_distance"


def evaluate_primitive(prim: MotionPrimitive, field: RewardField, base: Sequence[float], fov: FovParams,
                       robot: RobotModel, params: GazeParams | None = None) -> float:
    """Summed reward inside the primitive's viewing cone; infeasible ones are not evaluated."""
    if not prim.feasible:
        return INFEASIBLE_REWARD
    return float(evaluate_primitives([prim], field, base, fov, robot, params)[0])


def evaluate_primitives(prims: Sequence[MotionPrimitive], field: RewardField, base: Sequence[float],
                        fov: FovParams, robot: RobotModel, params: GazeParams | None = None) -> np.ndarray:
    spec = field.spec
    out = np.full(len(prims), INFEASIBLE_REWARD)
    live = [i for i, p in enumerate(prims) if p.feasible]
    if not live:
        return out
    cams = np.array([camera_pose(base, prims[i].pan, prims[i].tilt, robot, spec).as_row() for i in live])
    _, _, _, ox, oy, oz, res = _grid_args(spec)
    sums = kernels.cone_sums(np.ascontiguousarray(field.r, dtype=np.float64), ox, oy, oz, res, cams,
                             fov.h_half, fov.v_half, float(fov.max_range), not spec.is_2d, _weight_mode(params))
    out[live] = sums
    return out


def _head_distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def select_best(evals: Sequence[tuple[MotionPrimitive, float]], current: tuple[float, float]) -> MotionPrimitive:
    """Highest reward; ties go to the smallest head motion, then enumeration order.

    With no feasible primitive the head holds its current pose.
    """
    if not evals:
        raise ValueError("no primitives to select from")
    best = None
    best_key = None
    for order, (prim, value) in enumerate(evals):
        if not prim.feasible or value == INFEASIBLE_REWARD:
            continue
        key = (-value, _head_distance((prim.pan, prim.tilt), current), order)
        if best_key is None or key < best_key:
            best, best_key = prim, key
    if best is None:
        return MotionPrimitive(current[0], current[1], True)
    return best


# --- controllers ------------------------------------------------------------

class ControllerKind(str, Enum):
    OPTIMISED = "optimised"
    FIXED = "fixed"
    PANNING = "panning"
    LOOKAHEAD = "lookahead"


@dataclass(frozen=True)
class ControllerParams:
    # tilt whose optical axis meets the ground at 30 degrees
    ground_tilt: float = -math.pi / 6
    # None: one full sweep of the panning range every 40 steps
    pan_rate: float | None = None
    panning_range: tuple[float, float] | None = None
    lookahead_steps: int = 10
    primitives: PrimitiveGrid = field(default_factory=PrimitiveGrid)

    def sweep_rate(self, robot: RobotModel) -> float:
        lo, hi = self.sweep_range(robot)
        return self.pan_rate if self.pan_rate is not None else (hi - lo) / 40.0

    def sweep_range(self, robot: RobotModel) -> tuple[float, float]:
        return tuple(self.panning_range) if self.panning_range is not None else robot.pan_limits

    def to_dict(self):
        d = asdict(self)
        d["primitives"] = self.primitives.to_dict()
        if d["panning_range"] is not None:
            d["panning_range"] = list(d["panning_range"])
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "primitives" in d:
            prim = dict(d["primitives"])
            for k in ("pan_span", "tilt_span"):
                if prim.get(k) is not None:
                    prim[k] = tuple(prim[k])
            d["primitives"] = PrimitiveGrid(**prim)
        if d.get("panning_range") is not None:
            d["panning_range"] = tuple(d["panning_range"])
        return cls(**d)


@dataclass
class EpisodeView:
    """Read-only snapshot of what a controller may look at."""

    step: int
    base: np.ndarray
    head: tuple[float, float]
    trajectory: Trajectory | None
    traj_index: int
    times: ObservationTimeMap
    spec: GridSpec
    robot: RobotModel
    fov: FovParams
    gaze: GazeParams
    params: ControllerParams


def triangle_wave(step: int, lo: float, hi: float, rate: float, start: float = 0.0) -> float:
    """Pan angle sweeping ``[lo, hi]`` at ``rate`` per step, starting at ``start`` heading upwards."""
    span = hi - lo
    if span <= 0:
        return lo
    u = (step * rate + (start - lo)) % (2 * span)
    return lo + (u if u <= span else 2 * span - u)


def _fixed(view: EpisodeView) -> tuple[float, float]:
    return view.robot.clamp_head(0.0, view.params.ground_tilt)


def _panning(view: EpisodeView) -> tuple[float, float]:
    lo, hi = view.params.sweep_range(view.robot)
    start = min(max(0.0, lo), hi)
    pan = triangle_wave(view.step, lo, hi, view.params.sweep_rate(view.robot), start)
    return view.robot.clamp_head(pan, view.params.ground_tilt)


def _lookahead(view: EpisodeView) -> tuple[float, float]:
    if view.trajectory is None:
        raise NoTrajectory("look-ahead needs a trajectory")
    target = view.trajectory.state_at(view.traj_index + view.params.lookahead_steps)
    dx = target[0] - view.base[0]
    dy = target[1] - view.base[1]
    dist = math.hypot(dx, dy)
    if dist < 1e-9:
        return view.head
    pan = float(wrap_angle(math.atan2(dy, dx) - view.base[2]))
    if view.spec.is_2d:
        tilt = view.head[1]
    else:
        tilt = -math.atan2(view.robot.camera_height, dist)
    return view.robot.clamp_head(pan, tilt)


def optimised_scores(view: EpisodeView) -> tuple[list[MotionPrimitive], np.ndarray]:
    if view.trajectory is None:
        raise NoTrajectory("optimised gaze needs a trajectory")
    ahead = view.trajectory.suffix(view.traj_index)
    swept = swept_occupancy(ahead, view.robot, view.spec)
    field = assign_rewards(swept, view.times, view.gaze, view.gaze.priority_horizon(ahead.duration))
    prims = enumerate_primitives(view.robot, view.params.primitives)
    return prims, evaluate_primitives(prims, field, view.base, view.fov, view.robot, view.gaze)


def _optimised(view: EpisodeView) -> tuple[float, float]:
    prims, scores = optimised_scores(view)
    best = select_best(list(zip(prims, scores)), view.head)
    return best.pan, best.tilt


_DISPATCH = {
    ControllerKind.FIXED: _fixed,
    ControllerKind.PANNING: _panning,
    ControllerKind.LOOKAHEAD: _lookahead,
    ControllerKind.OPTIMISED: _optimised,
}


def controller_step(kind: ControllerKind | str, view: EpisodeView) -> tuple[float, float]:
    """Head target for this decision step; holds the current head when no plan exists."""
    try:
        return _DISPATCH[ControllerKind(kind)](view)
    except NoTrajectory:
        return view.head


def slew(current: tuple[float, float], target: tuple[float, float], rate: float) -> tuple[float, float]:
    def move(a, b):
        d = b - a
        return b if abs(d) <= rate else a + math.copysign(rate, d)

    return move(current[0], target[0]), move(current[1], target[1])
