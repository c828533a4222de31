import math

import numpy as np
import pytest

from gazebench.planner import (
    NoPath,
    PlanConfig,
    blocked_map,
    densify,
    inflate,
    path_blocked,
    plan,
    replan_due,
)
from gazebench.robot import RobotModel
from gazebench.trajectory import Trajectory
from gazebench.voxel import GridSpec, OccupancyGrid
from gazebench.world import Box, Environment

CFG = PlanConfig(replan_interval=5, inflation_radius=1.0, footprint_radius=1.0, base_speed=1.0)


def _path_length(traj):
    return float(np.hypot(*np.diff(traj.states[:, :2], axis=0).T).sum())


def test_straight_line_in_free_space():
    spec = GridSpec((100, 100), 1.0)
    traj = plan(OccupancyGrid.free(spec), (10.0, 10.0, 0.0), (10.0, 90.0, 0.0), CFG)
    assert _path_length(traj) == pytest.approx(80.0, rel=0.05)
    assert np.allclose(traj.states[0, :2], (10, 10)) and np.allclose(traj.states[-1, :2], (10, 90))


def test_unknown_space_is_free_by_default():
    spec = GridSpec((50, 50), 1.0)
    traj = plan(OccupancyGrid(spec), (5.5, 5.5, 0.0), (44.5, 44.5, 0.0), CFG)
    assert _path_length(traj) == pytest.approx(39 * math.sqrt(2), rel=0.05)


def test_unknown_as_occupied_refuses_to_plan():
    spec = GridSpec((50, 50), 1.0)
    cfg = PlanConfig(unknown_policy="occupied", inflation_radius=1.0, footprint_radius=1.0)
    with pytest.raises(NoPath):
        plan(OccupancyGrid(spec), (5.5, 5.5, 0.0), (44.5, 44.5, 0.0), cfg)


def test_goal_inside_obstacle_has_no_path():
    spec = GridSpec((40, 40), 1.0)
    env = Environment(spec, 0, [Box((25, 25, 0), (6, 6, 1))])
    with pytest.raises(NoPath):
        plan(env.truth, (5.5, 5.5, 0.0), (27.5, 27.5, 0.0), CFG)


def test_goal_outside_grid_has_no_path():
    spec = GridSpec((40, 40), 1.0)
    with pytest.raises(NoPath):
        plan(OccupancyGrid.free(spec), (5.5, 5.5, 0.0), (45.0, 5.5, 0.0), CFG)


def test_start_equals_goal_gives_zero_duration():
    spec = GridSpec((20, 20), 1.0)
    traj = plan(OccupancyGrid.free(spec), (7.5, 7.5, 0.3), (7.5, 7.5, 0.3), CFG)
    assert traj.duration == 0


def test_path_detours_around_wall():
    spec = GridSpec((60, 60), 1.0)
    env = Environment(spec, 0, [Box((30, 0, 0), (2, 45, 1))])
    traj = plan(env.truth, (10.5, 10.5, 0.0), (50.5, 10.5, 0.0), CFG)
    blocked = blocked_map(env.truth, CFG)
    ij = np.floor(traj.states[:, :2]).astype(int)
    assert not blocked[ij[:, 0], ij[:, 1]].any()
    assert traj.states[:, 1].max() > 45


def test_step_length_respects_speed():
    spec = GridSpec((80, 80), 1.0)
    env = Environment(spec, 0, [Box((30, 20, 0), (4, 40, 1)), Box((50, 0, 0), (3, 50, 1))])
    for speed in (1.0, 0.5, 2.0):
        cfg = PlanConfig(inflation_radius=2.0, footprint_radius=1.0, base_speed=speed)
        traj = plan(env.truth, (5.5, 40.5, 0.0), (75.5, 10.5, 1.0), cfg)
        assert traj.max_step_length() <= speed + 1e-9
        assert traj.states[-1, 2] == 1.0


def test_plan_is_deterministic():
    spec = GridSpec((80, 80), 1.0)
    env = Environment(spec, 0, [Box((20, 20, 0), (10, 10, 1)), Box((45, 40, 0), (8, 20, 1))])
    a = plan(env.truth, (5.5, 5.5, 0.0), (70.5, 70.5, 0.0), CFG)
    b = plan(env.truth, (5.5, 5.5, 0.0), (70.5, 70.5, 0.0), CFG)
    assert np.array_equal(a.states, b.states)


def test_start_in_inflation_margin_falls_back_to_footprint():
    spec = GridSpec((40, 40), 1.0)
    env = Environment(spec, 0, [Box((20, 0, 0), (1, 40, 1))])
    cfg = PlanConfig(inflation_radius=4.0, footprint_radius=1.0)
    # three cells from the wall: inside the wide margin, clear of the footprint
    traj = plan(env.truth, (17.5, 20.5, 0.0), (5.5, 20.5, 0.0), cfg)
    assert traj.states[-1, 0] == 5.5


def test_overhang_does_not_block_a_short_robot():
    spec = GridSpec((40, 40, 20), 0.1)
    env = Environment(spec, 0, [Box((18, 0, 10), (4, 40, 10))])
    robot = RobotModel(radius=0.1, height=0.8, camera_height=0.6)
    cfg = PlanConfig(inflation_radius=2.0, footprint_radius=1.0)
    traj = plan(env.truth, (0.5, 2.0, 0.0), (3.5, 2.0, 0.0), cfg, robot)
    assert _path_length(traj) == pytest.approx(3.0, rel=0.05)


def test_inflate_uses_centre_distance():
    blocked = np.zeros((11, 11), dtype=bool)
    blocked[5, 5] = True
    grown = inflate(blocked, 2.0)
    assert grown[7, 5] and grown[5, 3] and not grown[7, 7]
    assert not inflate(np.zeros((4, 4), bool), 3.0).any()


def test_densify_spacing():
    pts = np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 3.0]])
    out = densify(pts, 1.0)
    assert np.hypot(*np.diff(out, axis=0).T).max() <= 1.0 + 1e-12
    assert np.allclose(out[-1], (10, 3))


@pytest.mark.parametrize("step,last,blocked,expected", [
    (15, 10, False, True),
    (12, 10, False, False),
    (11, 10, True, True),
    (0, None, False, True),
])
def test_replan_due(step, last, blocked, expected):
    assert replan_due(step, last, PlanConfig(replan_interval=5), blocked) is expected


def test_path_blocked_looks_ahead_only():
    spec = GridSpec((20, 20), 1.0)
    traj = Trajectory(0, [[2.5 + k, 5.5, 0.0] for k in range(10)])
    blocked = np.zeros((20, 20), dtype=bool)
    blocked[3, 5] = True
    assert path_blocked(traj, 0, blocked, spec)
    assert not path_blocked(traj, 1, blocked, spec)


def test_plan_config_validation():
    with pytest.raises(ValueError):
        PlanConfig(inflation_radius=1.0, footprint_radius=2.0)
    with pytest.raises(ValueError):
        PlanConfig(replan_interval=0)
    with pytest.raises(ValueError):
        PlanConfig(unknown_policy="maybe")
