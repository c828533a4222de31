"""Field-of-view cones, simulated depth sensing and the cone-based clock reset."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .robot import RobotModel
from .voxel import CellState, GridSpec, ObservationTimeMap, OccupancyGrid, mark_observed


@dataclass(frozen=True)
class FovParams:
    h_half: float = math.radians(29.0)
    v_half: float = math.radians(22.5)
    max_range: float = 80.0  # world units
    ray_step: float = math.radians(0.5)

    def __post_init__(self):
        for name in ("h_half", "v_half"):
            a = getattr(self, name)
            if not 0.0 < a <= math.pi / 2 + 1e-12:
                raise ValueError(f"{name} must lie in (0, pi/2]")
        if self.max_range < 0:
            raise ValueError("max_range must be non-negative")
        if not self.ray_step > 0:
            raise ValueError("ray_step must be positive")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class CameraPose:
    position: tuple[float, float, float]
    yaw: float
    pitch: float = 0.0

    def as_row(self) -> tuple[float, float, float, float, float]:
        x, y, z = self.position
        return (x, y, z, self.yaw, self.pitch)


def camera_pose(base, pan: float, tilt: float, robot: RobotModel, spec: GridSpec) -> CameraPose:
    z = spec.origin[2] + robot.camera_height if not spec.is_2d else 0.0
    return CameraPose((float(base[0]), float(base[1]), float(z)), float(base[2]) + pan, tilt)


def _grid_args(spec: GridSpec):
    nx, ny, nz = spec.dims
    ox, oy, oz = spec.origin
    return nx, ny, nz, ox, oy, oz, spec.resolution


def fov_cone_voxels(cam: CameraPose, fov: FovParams, spec: GridSpec) -> np.ndarray:
    """Sorted flat indices of voxels whose centres fall inside the viewing cone."""
    x, y, z, yaw, pitch = cam.as_row()
    return kernels.cone_flat_indices(*_grid_args(spec), x, y, z, yaw, pitch,
                                     fov.h_half, fov.v_half, float(fov.max_range), not spec.is_2d)


@lru_cache(maxsize=32)
def ray_directions(h_half: float, v_half: float, step: float, is3d: bool) -> np.ndarray:
    """Camera-frame unit ray directions on a regular angular grid across the cone.

    3D rays are spaced by angle on the frustum axes, i.e. direction
    ``(1, tan a, tan b)`` for horizontal angle ``a`` and vertical angle ``b``.
    """
    nh = max(int(math.ceil(2 * h_half / step - 1e-9)) + 1, 2)
    a = np.linspace(-h_half, h_half, nh)
    if not is3d:
        d = np.column_stack([np.cos(a), np.sin(a), np.zeros_like(a)])
    else:
        nv = max(int(math.ceil(2 * v_half / step - 1e-9)) + 1, 2)
        b = np.linspace(-v_half, v_half, nv)
        aa, bb = np.meshgrid(a, b, indexing="ij")
        d = np.column_stack([np.ones(aa.size), np.tan(aa).ravel(), np.tan(bb).ravel()])
        d /= np.linalg.norm(d, axis=1, keepdims=True)
    d.setflags(write=False)
    return d


def observe(truth: OccupancyGrid, belief: OccupancyGrid, times: ObservationTimeMap, observed_mask: np.ndarray,
            cam: CameraPose, fov: FovParams) -> int:
    """One sensor update.

    Belief and ``observed_mask`` change only where a ray actually reaches;
    the observation clock resets over the whole cone, walls or not. Returns
    the number of cells that became Occupied in the belief.
    """
    spec = truth.spec
    if belief.spec != spec or times.spec != spec or observed_mask.shape != spec.dims:
        raise ValueError("grids must share one spec")
    before = belief.cells == CellState.OCCUPIED
    x, y, z, yaw, pitch = cam.as_row()
    is3d = not spec.is_2d
    rays = ray_directions(fov.h_half, fov.v_half, fov.ray_step, is3d)
    kernels.raycast(truth.cells, belief.cells, observed_mask, *_grid_args(spec)[3:], x, y, z, yaw, pitch,
                    fov.h_half, fov.v_half, float(fov.max_range), is3d, rays)
    mark_observed(times, fov_cone_voxels(cam, fov, spec))
    return int(np.count_nonzero((belief.cells == CellState.OCCUPIED) & ~before))
