"""Brute-force reference implementations used as test oracles.

They favour obviousness over speed: every voxel of the grid is visited and
no bounding boxes or incremental updates are used.
"""
from __future__ import annotations

import math

import numpy as np

from gazebench.voxel import GridSpec

# boundary tolerance shared with the library: limits are inclusive
EPS = 1e-9


def voxel_centres(spec: GridSpec):
    nx, ny, nz = spec.dims
    ox, oy, oz = spec.origin
    r = spec.resolution
    x = ox + (np.arange(nx) + 0.5) * r
    y = oy + (np.arange(ny) + 0.5) * r
    z = oz + (np.arange(nz) + 0.5) * r
    return np.meshgrid(x, y, z, indexing="ij")


def cone_mask(spec: GridSpec, position, yaw, pitch, h_half, v_half, max_range) -> np.ndarray:
    """Boolean mask of voxels whose centre lies in the viewing cone."""
    if max_range <= 0:
        return np.zeros(spec.dims, dtype=bool)
    X, Y, Z = voxel_centres(spec)
    dx = X - position[0]
    dy = Y - position[1]
    is3d = not spec.is_2d
    dz = Z - position[2] if is3d else np.zeros_like(X)
    p = pitch if is3d else 0.0
    forward = np.array([math.cos(p) * math.cos(yaw), math.cos(p) * math.sin(yaw), math.sin(p)])
    left = np.array([-math.sin(yaw), math.cos(yaw), 0.0])
    up = np.cross(forward, left)
    xc = dx * forward[0] + dy * forward[1] + dz * forward[2]
    yc = dx * left[0] + dy * left[1] + dz * left[2]
    zc = dx * up[0] + dy * up[1] + dz * up[2]
    dist = np.sqrt(dx ** 2 + dy ** 2 + dz ** 2)
    with np.errstate(invalid="ignore", divide="ignore"):
        ok = (xc > EPS) & (dist <= max_range + EPS)
        ok &= np.arctan2(np.abs(yc), xc) <= h_half + EPS
        if is3d:
            ok &= np.arctan2(np.abs(zc), xc) <= v_half + EPS
    return ok


def cone_sum(field: np.ndarray, mask: np.ndarray) -> float:
    total = 0.0
    for value in field[mask].tolist():
        total += value
    return total


def swept(spec: GridSpec, states, radius: float, height: float | None) -> np.ndarray:
    """Earliest step whose footprint covers each voxel, or -1, by stamping every step."""
    X, Y, Z = voxel_centres(spec)
    out = np.full(spec.dims, -1, dtype=np.int64)
    if spec.is_2d or height is None:
        layer = np.ones(spec.dims, dtype=bool)
    else:
        layer = Z < spec.origin[2] + height
    for k, (x, y, *_rest) in enumerate(states):
        disc = (X - x) ** 2 + (Y - y) ** 2 < radius ** 2
        ci = math.floor((x - spec.origin[0]) / spec.resolution)
        cj = math.floor((y - spec.origin[1]) / spec.resolution)
        if 0 <= ci < spec.dims[0] and 0 <= cj < spec.dims[1]:
            disc[ci, cj, :] = True
        cover = disc & layer
        fresh = cover & (out < 0)
        out[fresh] = k
    return out
