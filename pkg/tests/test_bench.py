import math

import numpy as np
import pytest

from gazebench.bench.config import RunConfig
from gazebench.bench.episode import EpisodeResult, run_episode
from gazebench.bench.metrics import EmptyInput, aggregate, filter_tasks, rank_methods, staleness_histogram
from gazebench.bench.runner import mask_latencies, results_document, run_suite
from gazebench.bench.suites import Suite, build_suite, config_2d_small
from gazebench.world import EnvParams, generate_environment, generate_task


def _res(task, ctrl, cf=True, rg=True, cov=0.5, stale=(), lat=()):
    return EpisodeResult(task, "e", ctrl, 0, cf, rg, cov, list(stale), 10, list(lat), "d")


# --- filtering and ranking ----------------------------------------------------

def test_filter_drops_all_fail_and_keeps_any_success():
    rs = [_res("a", c, rg=False) for c in ("optimised", "fixed", "panning", "lookahead")]
    rs += [_res("b", "optimised", cf=False), _res("b", "fixed")]
    rs += [_res("c", c) for c in ("optimised", "fixed")]
    assert filter_tasks(rs) == ["b", "c"]


def test_success_outranks_higher_coverage_failure():
    ranks = rank_methods([_res("t", "b", cf=False, cov=0.9), _res("t", "a", cov=0.2)])
    assert [(e.controller, e.rank) for e in ranks] == [("a", 1), ("b", 2)]


def test_coverage_orders_within_tier():
    ranks = rank_methods([_res("t", "a", cov=0.3), _res("t", "b", cov=0.4)])
    assert [e.controller for e in ranks] == ["b", "a"]


def test_identical_outcomes_tie_in_name_order():
    ranks = rank_methods([_res("t", "panning", cov=0.4), _res("t", "fixed", cov=0.4), _res("t", "lookahead", cov=0.1)])
    assert [(e.controller, e.rank) for e in ranks] == [("fixed", 1), ("panning", 1), ("lookahead", 3)]


def test_rank_refuses_mixed_tasks():
    with pytest.raises(ValueError):
        rank_methods([_res("a", "x"), _res("b", "x")])


# --- aggregation --------------------------------------------------------------

def test_single_success():
    s = aggregate([_res("t", "optimised", cov=0.5)])["optimised"]
    assert s.success_rate == 1.0 and s.mean_coverage == 0.5 and s.first_place_fraction == 1.0


def test_mean_coverage_over_tasks():
    s = aggregate([_res("t1", "x", cov=0.2), _res("t2", "x", cov=0.4)])["x"]
    assert s.mean_coverage == pytest.approx(0.3)


def test_unsolved_tasks_are_excluded_from_means():
    rs = [_res("t1", "x", cov=0.2), _res("t2", "x", cf=False, cov=0.9)]
    s = aggregate(rs)["x"]
    assert s.n_tasks == 1 and s.mean_coverage == 0.2
    # latency counts every episode
    rs = [_res("t1", "x", lat=[0.1]), _res("t2", "x", cf=False, lat=[0.3])]
    assert aggregate(rs)["x"].latency["count"] == 2


def test_histogram_conserves_samples():
    rs = [_res("t1", "x", stale=[0, 5, 5, 100]), _res("t2", "x", stale=[3])]
    s = aggregate(rs)["x"]
    assert sum(s.staleness_histogram) == 5 and len(s.staleness_histogram) == 101
    assert s.staleness_histogram[5] == 2 and s.median_staleness == 5.0


def test_histogram_rejects_out_of_range():
    with pytest.raises(ValueError):
        staleness_histogram([101], 100)


def test_aggregate_needs_results():
    with pytest.raises(EmptyInput):
        aggregate([])


# --- episodes -----------------------------------------------------------------

@pytest.fixture(scope="module")
def open_room():
    cfg = config_2d_small()
    env = generate_environment(2, EnvParams(dims=(60, 60, 1), n_obstacles=0, size_range=(1, 2)))
    task = generate_task(env, 5, cfg.robot, cfg.plan, task_id="t0", env_id="e0")
    return cfg, env, task


@pytest.mark.parametrize("kind", ["optimised", "fixed", "panning", "lookahead"])
def test_empty_room_always_succeeds(open_room, kind):
    cfg, env, task = open_room
    r = run_episode(task, env, kind, cfg)
    assert r.reached_goal and r.collision_free and r.termination == "goal"
    assert 0.0 < r.coverage <= 1.0
    assert all(0 <= v <= cfg.gaze.t_clip for v in r.occupancy_staleness)
    assert len(r.decision_latencies) == r.steps_taken


def test_episode_is_deterministic(open_room):
    cfg, env, task = open_room
    a = run_episode(task, env, "optimised", cfg).to_dict()
    b = run_episode(task, env, "optimised", cfg).to_dict()
    a.pop("decision_latencies"), b.pop("decision_latencies")
    assert a == b


def test_coverage_is_monotone_and_staleness_is_entry_time(open_room):
    cfg, env, task = open_room
    covs = []

    def check(rec):
        covs.append(rec.coverage)
        assert np.array_equal(rec.staleness, rec.times.t.reshape(-1)[rec.new_cells])

    r = run_episode(task, env, "panning", cfg, on_step=check)
    assert covs == sorted(covs) and covs[-1] == r.coverage


def test_frames_are_written(open_room, tmp_path):
    cfg, env, task = open_room
    r = run_episode(task, env, "fixed", cfg, frames_dir=tmp_path)
    frames = sorted(tmp_path.glob("step_*.pgm"))
    assert len(frames) == r.steps_taken and frames[0].read_bytes().startswith(b"P5")


def test_step_budget_counts_as_failure_to_reach(open_room):
    cfg, env, task = open_room
    tight = cfg.merged({"episode": {"budget_factor": 0.1, "min_budget": 3}})
    r = run_episode(task, env, "fixed", tight)
    assert r.steps_taken == 3 and not r.reached_goal and r.collision_free
    assert r.termination == "budget"


# --- configuration and suites -------------------------------------------------

def test_config_round_trip_and_digest():
    cfg = config_2d_small()
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
    assert RunConfig.from_dict(cfg.to_dict()).digest() == cfg.digest()
    other = cfg.merged({"gaze": {"tau_c": 3}})
    assert other.gaze.tau_c == 3 and other.digest() != cfg.digest()


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        RunConfig().merged({"gaze": {"tau_x": 1}})
    with pytest.raises(ValueError):
        RunConfig().merged({"camera": {}})


def test_suite_generation_is_deterministic_and_round_trips(tmp_path):
    a = build_suite("2d-small", 3, n_envs=2, tasks_per_env=2)
    b = build_suite("2d-small", 3, n_envs=2, tasks_per_env=2)
    assert a.tasks == b.tasks and len(a.tasks) == 4
    a.save(tmp_path / "s")
    back = Suite.load(tmp_path / "s")
    assert back.tasks == a.tasks and back.config == a.config
    for eid, env in a.envs.items():
        assert np.array_equal(back.envs[eid].truth.cells, env.truth.cells)


def test_dynamic_suite_has_one_crossing_box_per_seed():
    s = build_suite("3d-lite-dynamic", 0, n_seeds=3)
    assert len(s.tasks) == 3
    for t in s.tasks:
        env = s.envs[t.env_id]
        assert env.spec.dims == (64, 64, 16) and len(env.dynamic_obstacles) == 1


def test_unknown_suite_name():
    with pytest.raises(ValueError):
        build_suite("nope")


def test_run_suite_is_reproducible_with_workers():
    suite = build_suite("2d-small", 1, n_envs=1, tasks_per_env=2)
    serial = run_suite(suite, ["fixed", "optimised"], workers=1)
    pooled = run_suite(suite, ["fixed", "optimised"], workers=2)
    d1 = mask_latencies(results_document(suite, suite.config, ["fixed", "optimised"], serial))
    d2 = mask_latencies(results_document(suite, suite.config, ["fixed", "optimised"], pooled))
    assert d1 == d2
    assert [(r.task_id, r.controller) for r in serial] == [
        (suite.tasks[0].task_id, "fixed"), (suite.tasks[0].task_id, "optimised"),
        (suite.tasks[1].task_id, "fixed"), (suite.tasks[1].task_id, "optimised")]
