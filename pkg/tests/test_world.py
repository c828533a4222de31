import math

import numpy as np
import pytest

from gazebench.robot import RobotModel
from gazebench.voxel import CellState, GridSpec
from gazebench.world import (
    Box,
    EnvParams,
    Environment,
    NoFeasibleTask,
    ParamsInfeasible,
    ScriptedObstacle,
    TaskSpec,
    check_collision,
    footprint_cells,
    generate_environment,
    generate_task,
    truth_at,
)


def test_five_boxes_with_edges_in_range():
    env = generate_environment(7, EnvParams(dims=(1000, 1000, 1), n_obstacles=5, size_range=(10, 30)))
    assert len(env.static_obstacles) == 5
    for b in env.static_obstacles:
        assert 10 <= b.size[0] <= 30 and 10 <= b.size[1] <= 30
        # inside the one-cell perimeter
        assert b.min[0] >= 1 and b.min[0] + b.size[0] <= 999
        assert b.min[1] >= 1 and b.min[1] + b.size[1] <= 999


def test_no_obstacles_leaves_only_perimeter():
    env = generate_environment(3, EnvParams(dims=(20, 15, 1), n_obstacles=0, size_range=(2, 4)))
    occ = env.truth.cells[:, :, 0] == CellState.OCCUPIED
    expect = np.zeros((20, 15), dtype=bool)
    expect[0, :] = expect[-1, :] = expect[:, 0] = expect[:, -1] = True
    assert np.array_equal(occ, expect)
    assert env.truth.is_truth()


def test_environment_generation_is_deterministic():
    p = EnvParams(dims=(120, 120, 1), n_obstacles=8, size_range=(3, 9))
    a, b = generate_environment(11, p), generate_environment(11, p)
    assert np.array_equal(a.truth.cells, b.truth.cells)
    assert not np.array_equal(a.truth.cells, generate_environment(12, p).truth.cells)


def test_oversized_obstacles_are_infeasible():
    with pytest.raises(ParamsInfeasible):
        generate_environment(0, EnvParams(dims=(10, 10, 1), n_obstacles=1, size_range=(9, 12)))


def test_environment_json_round_trip(tmp_path):
    env = generate_environment(5, EnvParams(dims=(60, 50, 1), n_obstacles=4, size_range=(2, 6)))
    env.dynamic_obstacles.append(ScriptedObstacle((2, 2, 1), [(0, (5.0, 5.0, 0.0)), (10, (20.0, 5.0, 0.0))]))
    path = tmp_path / "env.json"
    env.save(path)
    back = Environment.load(path)
    assert back.spec == env.spec and back.seed == 5
    for step in (0, 4, 30):
        assert np.array_equal(truth_at(back, step).cells, truth_at(env, step).cells)


def _mover(waypoints, size=(2, 2, 1)):
    spec = GridSpec((40, 10), 1.0)
    return Environment(spec, 0, [], [ScriptedObstacle(size, waypoints)])


def test_truth_at_step_zero_uses_first_waypoint():
    env = _mover([(0, (10, 3, 0)), (10, (20, 3, 0))])
    occ = np.argwhere(truth_at(env, 0).cells[:, :, 0] == CellState.OCCUPIED)
    assert occ.min(axis=0).tolist() == [10, 3]


def test_truth_at_interpolates_linearly():
    env = _mover([(0, (10, 3, 0)), (10, (20, 3, 0))])
    assert env.dynamic_obstacles[0].position_at(5) == (15, 3, 0)
    occ = np.argwhere(truth_at(env, 5).cells[:, :, 0] == CellState.OCCUPIED)
    assert occ.min(axis=0).tolist() == [15, 3]


def test_truth_at_holds_after_last_waypoint():
    env = _mover([(0, (10, 3, 0)), (10, (20, 3, 0))])
    assert env.dynamic_obstacles[0].position_at(500) == (20, 3, 0)


def test_waypoint_steps_must_increase():
    with pytest.raises(ValueError):
        ScriptedObstacle((1, 1, 1), [(5, (0, 0, 0)), (5, (1, 0, 0))])


def test_dynamic_stamping_keeps_static_cells():
    spec = GridSpec((30, 30), 1.0)
    env = Environment(spec, 1, [Box((10, 10, 0), (4, 4, 1))],
                      [ScriptedObstacle((3, 3, 1), [(0, (2, 12, 0)), (20, (25, 12, 0))])])
    static = env.truth.cells == CellState.OCCUPIED
    for step in range(0, 25, 3):
        assert (truth_at(env, step).cells[static] == CellState.OCCUPIED).all()


def test_collision_free_in_open_space():
    truth = generate_environment(0, EnvParams(dims=(50, 50, 1), n_obstacles=0, size_range=(1, 2))).truth
    assert not check_collision(truth, (25.5, 25.5, 0.0), RobotModel(radius=3.0))


def test_collision_when_centre_inside_obstacle():
    spec = GridSpec((20, 20), 1.0)
    env = Environment(spec, 0, [Box((8, 8, 0), (3, 3, 1))])
    assert check_collision(env.truth, (9.5, 9.5, 0.0), RobotModel(radius=0.4))


def test_boundary_cell_centre_does_not_collide():
    spec = GridSpec((20, 20), 1.0)
    env = Environment(spec, 0, [Box((12, 5, 0), (1, 1, 1))])
    # obstacle centre (12.5, 5.5) sits exactly 2.0 from the robot centre
    robot = RobotModel(radius=2.0)
    assert not check_collision(env.truth, (10.5, 5.5, 0.0), robot)
    assert check_collision(env.truth, (10.6, 5.5, 0.0), robot)


def test_collision_ignores_layers_above_the_robot():
    spec = GridSpec((20, 20, 10), 0.1)
    overhang = Environment(spec, 0, [Box((8, 8, 6), (4, 4, 4))])
    robot = RobotModel(radius=0.3, height=0.5, camera_height=0.4)
    assert not check_collision(overhang.truth, (1.0, 1.0, 0.0), robot)
    low = Environment(spec, 0, [Box((8, 8, 4), (4, 4, 1))])
    assert check_collision(low.truth, (1.0, 1.0, 0.0), robot)


def test_footprint_includes_centre_cell_for_tiny_robot():
    spec = GridSpec((10, 10), 1.0)
    cells = footprint_cells(spec, (3.2, 4.9, 0.0), RobotModel(radius=0.1))
    assert cells.tolist() == [3 * 10 + 4]


def test_generate_task_in_free_space():
    env = generate_environment(1, EnvParams(dims=(40, 40, 1), n_obstacles=0, size_range=(1, 2)))
    robot = RobotModel(radius=1.0)
    t = generate_task(env, 99, robot, task_id="t", env_id="e")
    assert not check_collision(env.truth, t.start, robot)
    assert not check_collision(env.truth, t.goal, robot)
    for s in (t.start, t.goal):
        assert -math.pi <= s[2] < math.pi
    assert generate_task(env, 99, robot, task_id="t", env_id="e") == t


def test_sealed_goal_has_no_feasible_task():
    spec = GridSpec((40, 40), 1.0)
    ring = [Box((20, 20, 0), (9, 1, 1)), Box((20, 28, 0), (9, 1, 1)),
            Box((20, 20, 0), (1, 9, 1)), Box((28, 20, 0), (1, 9, 1))]
    env = Environment(spec, 1, ring)
    with pytest.raises(NoFeasibleTask):
        generate_task(env, 4, RobotModel(radius=1.0), start=(5.5, 5.5, 0.0), goal=(24.5, 24.5, 0.0))


def test_task_json_round_trip():
    t = TaskSpec("t1", "e1", 3, (1.0, 2.0, 0.5), (4.0, 5.0, -1.0))
    assert TaskSpec.from_dict(t.to_dict()) == t
