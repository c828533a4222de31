"""Regular-lattice voxel grids, world/voxel indexing and the observation clock.

Arrays are indexed ``[ix, iy, iz]`` in C order. A 2D workspace is a grid
with ``nz == 1``; nothing else changes.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class OutOfBounds(ValueError):
    """A world point or voxel index falls outside the grid."""


class CellState(IntEnum):
    UNKNOWN = 0
    FREE = 1
    OCCUPIED = 2


@dataclass(frozen=True)
class GridSpec:
    dims: tuple[int, int, int]
    resolution: float = 1.0
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) == 2:
            dims = dims + (1,)
        if len(dims) != 3 or min(dims) < 1:
            raise ValueError(f"dims must be three positive counts, got {self.dims}")
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")
        if dims[0] * dims[1] * dims[2] >= 2**62:
            raise ValueError("grid too large to index")
        origin = tuple(float(o) for o in self.origin)
        if len(origin) == 2:
            origin = origin + (0.0,)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "resolution", float(self.resolution))
        object.__setattr__(self, "origin", origin)

    @property
    def is_2d(self) -> bool:
        return self.dims[2] == 1

    @property
    def size(self) -> int:
        nx, ny, nz = self.dims
        return nx * ny * nz

    @property
    def extent(self) -> np.ndarray:
        return np.asarray(self.dims, dtype=float) * self.resolution

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "resolution": self.resolution, "origin": list(self.origin)}

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(tuple(d["dims"]), d.get("resolution", 1.0), tuple(d.get("origin", (0.0, 0.0, 0.0))))


def world_to_voxel(spec: GridSpec, p: Sequence[float]) -> tuple[int, ...]:
    """Index of the cell containing world point ``p``.

    Accepts 2- or 3-element points; the returned index has the same length.
    """
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    origin = np.asarray(spec.origin[:n])
    dims = np.asarray(spec.dims[:n])
    rel = (p - origin) / spec.resolution
    idx = np.floor(rel).astype(np.int64)
    if np.any(rel < 0) or np.any(idx >= dims):
        raise OutOfBounds(f"point {tuple(p)} outside grid")
    return tuple(int(i) for i in idx)


def voxel_center(spec: GridSpec, idx: Sequence[int]) -> np.ndarray:
    n = len(idx)
    return np.asarray(spec.origin[:n]) + (np.asarray(idx, dtype=float) + 0.5) * spec.resolution


def cell_centers(spec: GridSpec, axis: int) -> np.ndarray:
    return spec.origin[axis] + (np.arange(spec.dims[axis]) + 0.5) * spec.resolution


class OccupancyGrid:
    """Per-voxel Unknown/Free/Occupied state."""

    def __init__(self, spec: GridSpec, cells: np.ndarray | None = None):
        self.spec = spec
        if cells is None:
            cells = np.full(spec.dims, CellState.UNKNOWN, dtype=np.uint8)
        cells = np.asarray(cells, dtype=np.uint8)
        if cells.shape != spec.dims:
            raise ValueError(f"cells shape {cells.shape} != dims {spec.dims}")
        if cells.size and cells.max() > CellState.OCCUPIED:
            raise ValueError("cell values must be Unknown, Free or Occupied")
        self.cells = cells

    @classmethod
    def free(cls, spec: GridSpec) -> "OccupancyGrid":
        return cls(spec, np.full(spec.dims, CellState.FREE, dtype=np.uint8))

    def copy(self) -> "OccupancyGrid":
        return OccupancyGrid(self.spec, self.cells.copy())

    @property
    def occupied(self) -> np.ndarray:
        return self.cells == CellState.OCCUPIED

    @property
    def unknown(self) -> np.ndarray:
        return self.cells == CellState.UNKNOWN

    def is_truth(self) -> bool:
        return not bool(self.unknown.any())

    def __eq__(self, other):
        if not isinstance(other, OccupancyGrid):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.cells, other.cells)


DEFAULT_T_CLIP = 100


class ObservationTimeMap:
    """Per-voxel decision steps since the cell was last inside the camera cone."""

    def __init__(self, spec: GridSpec, t_clip: int = DEFAULT_T_CLIP):
        if t_clip < 0:
            raise ValueError("t_clip must be non-negative")
        self.spec = spec
        self.t_clip = int(t_clip)
        # fresh cells are maximally stale so unseen space draws reward at once
        self.t = np.full(spec.dims, self.t_clip, dtype=np.int32)

    def copy(self) -> "ObservationTimeMap":
        m = ObservationTimeMap(self.spec, self.t_clip)
        m.t[...] = self.t
        return m


def advance_clock(m: ObservationTimeMap) -> None:
    np.minimum(m.t + 1, m.t_clip, out=m.t)


def _as_flat_indices(spec: GridSpec, indices) -> np.ndarray:
    """Normalise an index collection to validated flat indices.

    Accepts an (N, 3) / (N, 2) integer array, an iterable of index tuples or
    a 1-D array of flat indices (dtype int, ndim 1).
    """
    if isinstance(indices, np.ndarray) and indices.ndim == 1 and indices.dtype.kind in "iu":
        flat = indices.astype(np.int64, copy=False)
        if flat.size and (flat.min() < 0 or flat.max() >= spec.size):
            raise OutOfBounds("flat voxel index outside grid")
        return flat
    arr = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices, dtype=np.int64)
    if arr.size == 0:
        return np.empty(0, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError("expected an (N, k) array of voxel indices")
    if arr.shape[1] == 2:
        arr = np.column_stack([arr, np.zeros(len(arr), dtype=np.int64)])
    dims = np.asarray(spec.dims)
    if np.any(arr < 0) or np.any(arr >= dims):
        raise OutOfBounds("voxel index outside grid")
    return np.ravel_multi_index(arr.T, spec.dims)


def mark_observed(m: ObservationTimeMap, indices) -> None:
    flat = _as_flat_indices(m.spec, indices)
    m.t.reshape(-1)[flat] = 0


def coverage(observed: np.ndarray) -> float:
    observed = np.asarray(observed, dtype=bool)
    if observed.size == 0:
        return 0.0
    return float(np.count_nonzero(observed)) / observed.size


# --- snapshot dumps ---------------------------------------------------------

_PGM_LEVELS = {CellState.OCCUPIED: 0, CellState.UNKNOWN: 128, CellState.FREE: 255}


def occupancy_to_image(grid: OccupancyGrid) -> np.ndarray:
    """Byte image of a grid, rows running from high y to low y.

    3D grids are flattened to their vertical maximum (Occupied wins over Free
    wins over Unknown).
    """
    cells = grid.cells
    if cells.shape[2] > 1:
        occ = (cells == CellState.OCCUPIED).any(axis=2)
        free = (cells == CellState.FREE).any(axis=2)
        flat = np.where(occ, CellState.OCCUPIED, np.where(free, CellState.FREE, CellState.UNKNOWN))
    else:
        flat = cells[:, :, 0]
    lut = np.zeros(3, dtype=np.uint8)
    for state, level in _PGM_LEVELS.items():
        lut[state] = level
    img = lut[flat]  # (nx, ny)
    return np.ascontiguousarray(img.T[::-1])


def write_pgm(path, grid: OccupancyGrid) -> None:
    img = occupancy_to_image(grid)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end].decode("ascii"))
        pos = end
    if tokens[0] != "P5":
        raise ValueError("not a binary PGM")
    w, h = int(tokens[1]), int(tokens[2])
    pos += 1
    return np.frombuffer(data[pos:pos + w * h], dtype=np.uint8).reshape(h, w)


def write_voxel_bin(path, spec: GridSpec, values: np.ndarray) -> None:
    """Flat binary dump: a text header ``nx ny nz resolution [dtype]`` then row-major data.

    ``uint8`` payloads omit the dtype token; OccupancyGrid payloads use the
    PGM byte levels.
    """
    values = np.asarray(values)
    if values.shape != spec.dims:
        raise ValueError("values do not match grid dims")
    if isinstance(values, np.ndarray) and values.dtype == np.uint8:
        header = f"{spec.dims[0]} {spec.dims[1]} {spec.dims[2]} {spec.resolution!r}\n"
        payload = np.ascontiguousarray(values).tobytes()
    else:
        dt = np.dtype(values.dtype).newbyteorder("<")
        header = f"{spec.dims[0]} {spec.dims[1]} {spec.dims[2]} {spec.resolution!r} {dt.str}\n"
        payload = np.ascontiguousarray(values, dtype=dt).tobytes()
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload)


def write_occupancy_bin(path, grid: OccupancyGrid) -> None:
    lut = np.zeros(3, dtype=np.uint8)
    for state, level in _PGM_LEVELS.items():
        lut[state] = level
    write_voxel_bin(path, grid.spec, lut[grid.cells])


def read_voxel_bin(path) -> tuple[GridSpec, np.ndarray]:
    data = Path(path).read_bytes()
    nl = data.index(b"\n")
    parts = data[:nl].decode("ascii").split()
    dims = tuple(int(v) for v in parts[:3])
    res = float(parts[3])
    dt = np.dtype(parts[4]) if len(parts) > 4 else np.dtype(np.uint8)
    arr = np.frombuffer(data[nl + 1:], dtype=dt).reshape(dims)
    return GridSpec(dims, res), arr


def flat_to_index(spec: GridSpec, flat: Iterable[int]) -> np.ndarray:
    return np.column_stack(np.unravel_index(np.asarray(list(flat), dtype=np.int64), spec.dims))
