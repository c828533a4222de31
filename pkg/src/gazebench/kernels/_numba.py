"""numba kernels. Each function mirrors one in ``_numpy`` exactly."""
import math

import numpy as np
from numba import njit

from ._common import ANG_EPS, FREE, OCCUPIED, POS_EPS, RANGE_EPS


@njit(cache=True, inline="always")
def _in_cone(dx, dy, dz, cy, sy, cp, sp, h, v, rng, is3d):
    d2 = dx * dx + dy * dy + dz * dz
    lim = rng + RANGE_EPS
    if d2 > lim * lim:
        return False
    x1 = cy * dx + sy * dy
    yc = -sy * dx + cy * dy
    if is3d:
        xc = cp * x1 + sp * dz
        zc = -sp * x1 + cp * dz
    else:
        xc = x1
        zc = 0.0
    if xc <= POS_EPS:
        return False
    if math.atan2(abs(yc), xc) > h + ANG_EPS:
        return False
    if is3d and math.atan2(abs(zc), xc) > v + ANG_EPS:
        return False
    return True


@njit(cache=True)
def _bbox(nx, ny, nz, ox, oy, oz, res, px, py, pz, rng, is3d):
    i0 = max(int(math.floor((px - rng - ox) / res)), 0)
    i1 = min(int(math.floor((px + rng - ox) / res)), nx - 1)
    j0 = max(int(math.floor((py - rng - oy) / res)), 0)
    j1 = min(int(math.floor((py + rng - oy) / res)), ny - 1)
    if is3d:
        k0 = max(int(math.floor((pz - rng - oz) / res)), 0)
        k1 = min(int(math.floor((pz + rng - oz) / res)), nz - 1)
    else:
        k0 = 0
        k1 = nz - 1
    return i0, i1, j0, j1, k0, k1


@njit(cache=True)
def cone_flat_indices(nx, ny, nz, ox, oy, oz, res, px, py, pz, yaw, pitch, h, v, rng, is3d):
    out = np.empty(0, dtype=np.int64)
    if rng <= 0.0:
        return out
    i0, i1, j0, j1, k0, k1 = _bbox(nx, ny, nz, ox, oy, oz, res, px, py, pz, rng, is3d)
    if i1 < i0 or j1 < j0 or k1 < k0:
        return out
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    buf = np.empty((i1 - i0 + 1) * (j1 - j0 + 1) * (k1 - k0 + 1), dtype=np.int64)
    n = 0
    for i in range(i0, i1 + 1):
        dx = ox + (i + 0.5) * res - px
        for j in range(j0, j1 + 1):
            dy = oy + (j + 0.5) * res - py
            for k in range(k0, k1 + 1):
                dz = oz + (k + 0.5) * res - pz if is3d else 0.0
                if _in_cone(dx, dy, dz, cy, sy, cp, sp, h, v, rng, is3d):
                    buf[n] = (i * ny + j) * nz + k
                    n += 1
    return buf[:n].copy()


@njit(cache=True)
def cone_sums(field, ox, oy, oz, res, cams, h, v, rng, is3d, inv_dist):
    """Reward sum inside the cone for each camera row ``(px, py, pz, yaw, pitch)``."""
    nx, ny, nz = field.shape
    m = cams.shape[0]
    out = np.zeros(m)
    if rng <= 0.0:
        return out
    for c in range(m):
        px, py, pz, yaw, pitch = cams[c, 0], cams[c, 1], cams[c, 2], cams[c, 3], cams[c, 4]
        i0, i1, j0, j1, k0, k1 = _bbox(nx, ny, nz, ox, oy, oz, res, px, py, pz, rng, is3d)
        cy, sy = math.cos(yaw), math.sin(yaw)
        cp, sp = math.cos(pitch), math.sin(pitch)
        total = 0.0
        for i in range(i0, i1 + 1):
            dx = ox + (i + 0.5) * res - px
            for j in range(j0, j1 + 1):
                dy = oy + (j + 0.5) * res - py
                for k in range(k0, k1 + 1):
                    dz = oz + (k + 0.5) * res - pz if is3d else 0.0
                    if _in_cone(dx, dy, dz, cy, sy, cp, sp, h, v, rng, is3d):
                        if inv_dist:
                            d = math.sqrt(dx * dx + dy * dy + dz * dz)
                            total += field[i, j, k] * (res / max(d, res))
                        else:
                            total += field[i, j, k]
        out[c] = total
    return out


@njit(cache=True)
def raycast(truth, belief, observed, ox, oy, oz, res, px, py, pz, yaw, pitch, h, v, rng, is3d, rays):
    """Cast ``rays`` (camera-frame unit vectors, shape (R, 3)) and update belief in place."""
    nx, ny, nz = truth.shape
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    gx = (px - ox) / res
    gy = (py - oy) / res
    gz = (pz - oz) / res if is3d else 0.5
    tmax_all = rng / res
    for r in range(rays.shape[0]):
        xc, yc, zc = rays[r, 0], rays[r, 1], rays[r, 2]
        if is3d:
            x1 = cp * xc - sp * zc
            dz = sp * xc + cp * zc
        else:
            x1 = xc
            dz = 0.0
        dx = cy * x1 - sy * yc
        dy = sy * x1 + cy * yc
        ci = int(math.floor(gx))
        cj = int(math.floor(gy))
        ck = int(math.floor(gz)) if is3d else 0
        if ci < 0 or cj < 0 or ck < 0 or ci >= nx or cj >= ny or ck >= nz:
            continue
        si = 1 if dx > 0 else -1
        sj = 1 if dy > 0 else -1
        sk = 1 if dz > 0 else -1
        tdx = abs(1.0 / dx) if dx != 0.0 else np.inf
        tdy = abs(1.0 / dy) if dy != 0.0 else np.inf
        tdz = abs(1.0 / dz) if dz != 0.0 else np.inf
        if dx > 0:
            tx = (ci + 1 - gx) * tdx
        elif dx < 0:
            tx = (gx - ci) * tdx
        else:
            tx = np.inf
        if dy > 0:
            ty = (cj + 1 - gy) * tdy
        elif dy < 0:
            ty = (gy - cj) * tdy
        else:
            ty = np.inf
        if dz > 0:
            tz = (ck + 1 - gz) * tdz
        elif dz < 0:
            tz = (gz - ck) * tdz
        else:
            tz = np.inf
        t = 0.0
        while t <= tmax_all:
            cdx = ox + (ci + 0.5) * res - px
            cdy = oy + (cj + 0.5) * res - py
            cdz = oz + (ck + 0.5) * res - pz if is3d else 0.0
            inside = _in_cone(cdx, cdy, cdz, cy, sy, cp, sp, h, v, rng, is3d)
            hit = truth[ci, cj, ck] == OCCUPIED
            if inside:
                belief[ci, cj, ck] = OCCUPIED if hit else FREE
                observed[ci, cj, ck] = True
            if hit:
                break
            if tx <= ty and tx <= tz:
                t = tx
                tx += tdx
                ci += si
            elif ty <= tz:
                t = ty
                ty += tdy
                cj += sj
            else:
                t = tz
                tz += tdz
                ck += sk
            if ci < 0 or cj < 0 or ck < 0 or ci >= nx or cj >= ny or ck >= nz:
                break


@njit(cache=True)
def swept(states, radius, hz, nx, ny, nz, ox, oy, res):
    v = np.full((nx, ny, nz), -1, dtype=np.int32)
    hz = min(hz, nz)
    r2 = radius * radius
    for s in range(states.shape[0]):
        px, py = states[s, 0], states[s, 1]
        ci = int(math.floor((px - ox) / res))
        cj = int(math.floor((py - oy) / res))
        i0 = max(int(math.floor((px - radius - ox) / res)), 0)
        i1 = min(int(math.floor((px + radius - ox) / res)), nx - 1)
        j0 = max(int(math.floor((py - radius - oy) / res)), 0)
        j1 = min(int(math.floor((py + radius - oy) / res)), ny - 1)
        i0 = min(i0, ci)
        i1 = max(i1, ci)
        j0 = min(j0, cj)
        j1 = max(j1, cj)
        for i in range(max(i0, 0), min(i1, nx - 1) + 1):
            dx = ox + (i + 0.5) * res - px
            for j in range(max(j0, 0), min(j1, ny - 1) + 1):
                dy = oy + (j + 0.5) * res - py
                if (i == ci and j == cj) or dx * dx + dy * dy < r2:
                    for k in range(hz):
                        if v[i, j, k] < 0:
                            v[i, j, k] = s
    return v


@njit(cache=True)
def astar(blocked, si, sj, gi, gj):
    """8-connected A* with octile heuristic and no corner cutting.

    Returns an (K, 2) array of cells from start to goal, empty when no path.
    """
    nx, ny = blocked.shape
    n = nx * ny
    g = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    closed = np.zeros(n, dtype=np.bool_)
    cap = 16
    hf = np.empty(cap)
    hc = np.empty(cap, dtype=np.int64)
    hn = np.empty(cap, dtype=np.int64)
    size = 0
    counter = 0
    start = si * ny + sj
    goal = gi * ny + gj
    g[start] = 0.0
    sq2 = math.sqrt(2.0)
    # push start
    ddx = abs(si - gi)
    ddy = abs(sj - gj)
    hf[0] = max(ddx, ddy) + (sq2 - 1.0) * min(ddx, ddy)
    hc[0] = 0
    hn[0] = start
    size = 1
    counter = 1
    di = np.array([1, -1, 0, 0, 1, 1, -1, -1])
    dj = np.array([0, 0, 1, -1, 1, -1, 1, -1])
    found = False
    while size > 0:
        # pop min
        node = hn[0]
        size -= 1
        if size > 0:
            hf[0] = hf[size]
            hc[0] = hc[size]
            hn[0] = hn[size]
            p = 0
            while True:
                l = 2 * p + 1
                if l >= size:
                    break
                m = l
                if l + 1 < size and (hf[l + 1] < hf[l] or (hf[l + 1] == hf[l] and hc[l + 1] < hc[l])):
                    m = l + 1
                if hf[m] < hf[p] or (hf[m] == hf[p] and hc[m] < hc[p]):
                    tf, tc, tn = hf[p], hc[p], hn[p]
                    hf[p], hc[p], hn[p] = hf[m], hc[m], hn[m]
                    hf[m], hc[m], hn[m] = tf, tc, tn
                    p = m
                else:
                    break
        if closed[node]:
            continue
        closed[node] = True
        if node == goal:
            found = True
            break
        ni = node // ny
        nj = node % ny
        for d in range(8):
            ai = ni + di[d]
            aj = nj + dj[d]
            if ai < 0 or aj < 0 or ai >= nx or aj >= ny:
                continue
            if blocked[ai, aj]:
                continue
            diag = d >= 4
            if diag and (blocked[ni + di[d], nj] or blocked[ni, nj + dj[d]]):
                continue
            a = ai * ny + aj
            if closed[a]:
                continue
            ng = g[node] + (sq2 if diag else 1.0)
            if ng < g[a]:
                g[a] = ng
                parent[a] = node
                ddx = abs(ai - gi)
                ddy = abs(aj - gj)
                f = ng + max(ddx, ddy) + (sq2 - 1.0) * min(ddx, ddy)
                if size == cap:
                    cap *= 2
                    nf = np.empty(cap)
                    nc = np.empty(cap, dtype=np.int64)
                    nn = np.empty(cap, dtype=np.int64)
                    nf[:size] = hf[:size]
                    nc[:size] = hc[:size]
                    nn[:size] = hn[:size]
                    hf, hc, hn = nf, nc, nn
                c = size
                hf[c] = f
                hc[c] = counter
                hn[c] = a
                counter += 1
                size += 1
                while c > 0:
                    p = (c - 1) // 2
                    if hf[c] < hf[p] or (hf[c] == hf[p] and hc[c] < hc[p]):
                        tf, tc, tn = hf[p], hc[p], hn[p]
                        hf[p], hc[p], hn[p] = hf[c], hc[c], hn[c]
                        hf[c], hc[c], hn[c] = tf, tc, tn
                        c = p
                    else:
                        break
    if not found:
        return np.empty((0, 2), dtype=np.int64)
    length = 0
    cur = goal
    while cur != -1:
        length += 1
        cur = parent[cur]
    out = np.empty((length, 2), dtype=np.int64)
    cur = goal
    for idx in range(length - 1, -1, -1):
        out[idx, 0] = cur // ny
        out[idx, 1] = cur % ny
        cur = parent[cur]
    return out
