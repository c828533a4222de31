"""Vectorised numpy twins of the numba kernels.

A* has no sensible vectorised form; it is a plain heapq search that pops
nodes in exactly the same order as the numba binary heap.
"""
import heapq
import math

import numpy as np

from ._common import ANG_EPS, FREE, OCCUPIED, POS_EPS, RANGE_EPS


def _bbox(nx, ny, nz, ox, oy, oz, res, px, py, pz, rng, is3d):
    i0 = max(int(math.floor((px - rng - ox) / res)), 0)
    i1 = min(int(math.floor((px + rng - ox) / res)), nx - 1)
    j0 = max(int(math.floor((py - rng - oy) / res)), 0)
    j1 = min(int(math.floor((py + rng - oy) / res)), ny - 1)
    if is3d:
        k0 = max(int(math.floor((pz - rng - oz) / res)), 0)
        k1 = min(int(math.floor((pz + rng - oz) / res)), nz - 1)
    else:
        k0, k1 = 0, nz - 1
    return i0, i1, j0, j1, k0, k1


def _in_cone(dx, dy, dz, yaw, pitch, h, v, rng, is3d):
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    lim = rng + RANGE_EPS
    ok = dx * dx + dy * dy + dz * dz <= lim * lim
    x1 = cy * dx + sy * dy
    yc = -sy * dx + cy * dy
    if is3d:
        xc = cp * x1 + sp * dz
        zc = -sp * x1 + cp * dz
    else:
        xc = x1
        zc = np.zeros_like(x1)
    ok &= xc > POS_EPS
    ok &= np.arctan2(np.abs(yc), xc) <= h + ANG_EPS
    if is3d:
        ok &= np.arctan2(np.abs(zc), xc) <= v + ANG_EPS
    return ok


def _bbox_offsets(box, ox, oy, oz, res, px, py, pz, is3d):
    i0, i1, j0, j1, k0, k1 = box
    dx = ox + (np.arange(i0, i1 + 1) + 0.5) * res - px
    dy = oy + (np.arange(j0, j1 + 1) + 0.5) * res - py
    if is3d:
        dz = oz + (np.arange(k0, k1 + 1) + 0.5) * res - pz
    else:
        dz = np.zeros(k1 - k0 + 1)
    return np.meshgrid(dx, dy, dz, indexing="ij")


def cone_flat_indices(nx, ny, nz, ox, oy, oz, res, px, py, pz, yaw, pitch, h, v, rng, is3d):
    if rng <= 0.0:
        return np.empty(0, dtype=np.int64)
    box = _bbox(nx, ny, nz, ox, oy, oz, res, px, py, pz, rng, is3d)
    i0, i1, j0, j1, k0, k1 = box
    if i1 < i0 or j1 < j0 or k1 < k0:
        return np.empty(0, dtype=np.int64)
    dx, dy, dz = _bbox_offsets(box, ox, oy, oz, res, px, py, pz, is3d)
    ok = _in_cone(dx, dy, dz, yaw, pitch, h, v, rng, is3d)
    ii, jj, kk = np.nonzero(ok)
    return ((ii + i0) * ny + (jj + j0)) * nz + (kk + k0)


def cone_sums(field, ox, oy, oz, res, cams, h, v, rng, is3d, inv_dist):
    nx, ny, nz = field.shape
    out = np.zeros(cams.shape[0])
    if rng <= 0.0:
        return out
    for c, (px, py, pz, yaw, pitch) in enumerate(cams):
        box = _bbox(nx, ny, nz, ox, oy, oz, res, px, py, pz, rng, is3d)
        i0, i1, j0, j1, k0, k1 = box
        if i1 < i0 or j1 < j0 or k1 < k0:
            continue
        dx, dy, dz = _bbox_offsets(box, ox, oy, oz, res, px, py, pz, is3d)
        ok = _in_cone(dx, dy, dz, yaw, pitch, h, v, rng, is3d)
        vals = field[i0:i1 + 1, j0:j1 + 1, k0:k1 + 1][ok]
        if inv_dist:
            d = np.sqrt(dx * dx + dy * dy + dz * dz)[ok]
            vals = vals * (res / np.maximum(d, res))
        out[c] = vals.sum()
    return out


def raycast(truth, belief, observed, ox, oy, oz, res, px, py, pz, yaw, pitch, h, v, rng, is3d, rays):
    """All rays advance one cell per iteration; rays only ever write the
    truth-determined state, so the interleaving does not change the result."""
    nx, ny, nz = truth.shape
    dims = np.array([nx, ny, nz])
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    g = np.array([(px - ox) / res, (py - oy) / res, (pz - oz) / res if is3d else 0.5])
    cell0 = np.floor(g).astype(np.int64)
    if not is3d:
        cell0[2] = 0
    if np.any(cell0 < 0) or np.any(cell0 >= dims):
        return
    xc, yc, zc = rays[:, 0], rays[:, 1], rays[:, 2]
    if is3d:
        x1 = cp * xc - sp * zc
        dz = sp * xc + cp * zc
    else:
        x1 = xc
        dz = np.zeros_like(xc)
    d = np.column_stack([cy * x1 - sy * yc, sy * x1 + cy * yc, dz])
    nr = d.shape[0]
    cell = np.tile(cell0, (nr, 1))
    step = np.where(d > 0, 1, -1)
    with np.errstate(divide="ignore"):
        tdelta = np.where(d != 0.0, np.abs(1.0 / np.where(d != 0.0, d, 1.0)), np.inf)
    tnext = np.where(d > 0, (cell0 + 1 - g) * tdelta, np.where(d < 0, (g - cell0) * tdelta, np.inf))
    t = np.zeros(nr)
    active = np.ones(nr, dtype=bool)
    tmax_all = rng / res
    rows = np.arange(nr)
    while True:
        active &= t <= tmax_all
        if not active.any():
            break
        idx = rows[active]
        ci, cj, ck = cell[idx, 0], cell[idx, 1], cell[idx, 2]
        cdx = ox + (ci + 0.5) * res - px
        cdy = oy + (cj + 0.5) * res - py
        cdz = (oz + (ck + 0.5) * res - pz) if is3d else np.zeros(len(idx))
        inside = _in_cone(cdx, cdy, cdz, yaw, pitch, h, v, rng, is3d)
        hit = truth[ci, cj, ck] == OCCUPIED
        sel = inside
        belief[ci[sel], cj[sel], ck[sel]] = np.where(hit[sel], OCCUPIED, FREE).astype(belief.dtype)
        observed[ci[sel], cj[sel], ck[sel]] = True
        active[idx[hit]] = False
        mov = idx[~hit]
        if mov.size == 0:
            continue
        tn = tnext[mov]
        # same axis order as the scalar kernel: x wins ties, then y
        ax = np.where((tn[:, 0] <= tn[:, 1]) & (tn[:, 0] <= tn[:, 2]), 0, np.where(tn[:, 1] <= tn[:, 2], 1, 2))
        t[mov] = tn[np.arange(len(mov)), ax]
        tnext[mov, ax] += tdelta[mov, ax]
        cell[mov, ax] += step[mov, ax]
        out = np.any((cell[mov] < 0) | (cell[mov] >= dims), axis=1)
        active[mov[out]] = False


def swept(states, radius, hz, nx, ny, nz, ox, oy, res):
    v = np.full((nx, ny, nz), -1, dtype=np.int32)
    hz = min(hz, nz)
    r2 = radius * radius
    for s, (px, py) in enumerate(np.asarray(states)[:, :2]):
        ci = int(math.floor((px - ox) / res))
        cj = int(math.floor((py - oy) / res))
        i0 = max(min(int(math.floor((px - radius - ox) / res)), ci), 0)
        i1 = min(max(int(math.floor((px + radius - ox) / res)), ci), nx - 1)
        j0 = max(min(int(math.floor((py - radius - oy) / res)), cj), 0)
        j1 = min(max(int(math.floor((py + radius - oy) / res)), cj), ny - 1)
        if i1 < i0 or j1 < j0:
            continue
        dx = ox + (np.arange(i0, i1 + 1) + 0.5) * res - px
        dy = oy + (np.arange(j0, j1 + 1) + 0.5) * res - py
        foot = dx[:, None] ** 2 + dy[None, :] ** 2 < r2
        if i0 <= ci <= i1 and j0 <= cj <= j1:
            foot[ci - i0, cj - j0] = True
        block = v[i0:i1 + 1, j0:j1 + 1, :hz]
        block[(block < 0) & foot[:, :, None]] = s
    return v


def astar(blocked, si, sj, gi, gj):
    nx, ny = blocked.shape
    sq2 = math.sqrt(2.0)
    start = si * ny + sj
    goal = gi * ny + gj
    g = {start: 0.0}
    parent = {start: -1}
    closed = set()

    def heur(i, j):
        ddx, ddy = abs(i - gi), abs(j - gj)
        return max(ddx, ddy) + (sq2 - 1.0) * min(ddx, ddy)

    heap = [(heur(si, sj), 0, start)]
    counter = 1
    moves = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))
    found = False
    while heap:
        _, _, node = heapq.heappop(heap)
        if node in closed:
            continue
        closed.add(node)
        if node == goal:
            found = True
            break
        ni, nj = divmod(node, ny)
        for d, (di, dj) in enumerate(moves):
            ai, aj = ni + di, nj + dj
            if ai < 0 or aj < 0 or ai >= nx or aj >= ny or blocked[ai, aj]:
                continue
            diag = d >= 4
            if diag and (blocked[ai, nj] or blocked[ni, aj]):
                continue
            a = ai * ny + aj
            if a in closed:
                continue
            ng = g[node] + (sq2 if diag else 1.0)
            if ng < g.get(a, math.inf):
                g[a] = ng
                parent[a] = node
                ddx, ddy = abs(ai - gi), abs(aj - gj)
                # same association order as the numba kernel
                f = ng + max(ddx, ddy) + (sq2 - 1.0) * min(ddx, ddy)
                heapq.heappush(heap, (f, counter, a))
                counter += 1
    if not found:
        return np.empty((0, 2), dtype=np.int64)
    path = []
    cur = goal
    while cur != -1:
        path.append(divmod(cur, ny))
        cur = parent[cur]
    return np.array(path[::-1], dtype=np.int64)
