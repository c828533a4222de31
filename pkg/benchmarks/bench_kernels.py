"""Time the numba kernels against their numpy twins and check they agree.

    python benchmarks/bench_kernels.py [--repeat 5] [--size 1000]

Prints one row per kernel: best-of-N wall time for each backend, the
speed-up, and whether the outputs matched exactly.
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from gazebench.kernels import numba_impl, numpy_impl
from gazebench.sensing import ray_directions


def _best(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    return a.shape == b.shape and np.array_equal(a, b)


def cases(size: int, rng: np.random.Generator):
    n = size
    field2d = rng.integers(1, 100, size=(n, n, 1)).astype(np.float64)
    cams = np.array([[n / 2, n / 2, 0.0, p, 0.0] for p in np.linspace(-math.pi / 2, math.pi / 2, 17)])
    h, v = math.radians(29), math.radians(22.5)
    yield "cone_sums 2d x17", lambda m: m.cone_sums(field2d, 0.0, 0.0, 0.0, 1.0, cams, h, v, 200.0, False, False)

    field3d = rng.integers(1, 100, size=(64, 64, 16)).astype(np.float64)
    cams3 = np.array([[3.2, 3.2, 1.0, p, t] for p in np.linspace(-3.84, 1.75, 16)
                      for t in np.linspace(-math.pi / 2, math.pi / 6, 9)])
    yield "cone_sums 3d x144", lambda m: m.cone_sums(field3d, 0.0, 0.0, 0.0, 0.1, cams3, h, v, 4.0, True, False)

    truth = np.ones((n, n, 1), dtype=np.uint8)
    for _ in range(n // 4):
        i, j = rng.integers(0, n - 6, size=2)
        truth[i:i + 6, j:j + 6] = 2
    rays2 = ray_directions(h, v, math.radians(0.5), False)

    def ray2(m):
        belief = np.zeros_like(truth)
        seen = np.zeros(truth.shape, dtype=bool)
        m.raycast(truth, belief, seen, 0.0, 0.0, 0.0, 1.0, n / 2 + 0.3, n / 2 + 0.6, 0.0, 0.4, 0.0,
                  h, v, 200.0, False, rays2)
        return belief

    yield "raycast 2d", ray2

    truth3 = np.ones((64, 64, 16), dtype=np.uint8)
    truth3[40:46, 20:44, :10] = 2
    rays3 = ray_directions(h, v, math.radians(0.5), True)

    def ray3(m):
        belief = np.zeros_like(truth3)
        seen = np.zeros(truth3.shape, dtype=bool)
        m.raycast(truth3, belief, seen, 0.0, 0.0, 0.0, 0.1, 0.85, 3.25, 1.0, 0.0, -0.5, h, v, 4.0, True, rays3)
        return belief

    yield "raycast 3d", ray3

    t = np.linspace(0, 1, 400)
    states = np.column_stack([20 + (n - 40) * t, n / 2 + n / 4 * np.sin(6 * t), np.zeros_like(t)])
    yield "swept 2d", lambda m: m.swept(states, 5.0, 1, n, n, 1, 0.0, 0.0, 1.0)

    blocked = truth[:, :, 0] == 2
    blocked[0, 0] = blocked[n - 1, n - 1] = False
    yield "astar 2d", lambda m: m.astar(blocked, 0, 0, n - 1, n - 1)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=1000, help="edge length of the 2D grids")
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)
    if numba_impl is None:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':20s} {'numba s':>10s} {'numpy s':>10s} {'speed-up':>9s}  match")
    for name, fn in cases(a.size, np.random.default_rng(a.seed)):
        fn(numba_impl)  # compile outside the timed region
        tn, on = _best(lambda: fn(numba_impl), a.repeat)
        tp, op = _best(lambda: fn(numpy_impl), a.repeat)
        print(f"{name:20s} {tn:10.4f} {tp:10.4f} {tp / tn:9.1f}  {_same(on, op)}")


if __name__ == "__main__":
    main()
