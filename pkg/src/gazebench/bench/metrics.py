"""Task filtering, tiered ranking and per-controller aggregation."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .episode import EpisodeResult


class EmptyInput(ValueError):
    pass


def _by_task(results: Iterable[EpisodeResult]) -> dict[str, list[EpisodeResult]]:
    out: dict[str, list[EpisodeResult]] = defaultdict(list)
    for r in results:
        out[r.task_id].append(r)
    return dict(out)


def filter_tasks(results: Iterable[EpisodeResult]) -> list[str]:
    """Ids of tasks on which at least one controller succeeded, in first-seen order."""
    return [tid for tid, rs in _by_task(results).items() if any(r.success for r in rs)]


@dataclass(frozen=True)
class RankEntry:
    task_id: str
    controller: str
    tier: int  # 1 = success, 0 = failure
    coverage: float
    rank: int


def rank_methods(results: Sequence[EpisodeResult]) -> list[RankEntry]:
    """Order one task's results: success first, then coverage, ties by name.

    Uses competition ranking, so two controllers with identical tier and
    coverage share a rank and the next rank is skipped.
    """
    if len({r.task_id for r in results}) > 1:
        raise ValueError("rank_methods expects results for a single task")
    ordered = sorted(results, key=lambda r: (-int(r.success), -r.coverage, r.controller))
    out: list[RankEntry] = []
    prev = None
    rank = 0
    for pos, r in enumerate(ordered, start=1):
        key = (int(r.success), r.coverage)
        if key != prev:
            rank = pos
            prev = key
        out.append(RankEntry(r.task_id, r.controller, int(r.success), float(r.coverage), rank))
    return out


def rank_table(results: Iterable[EpisodeResult], tasks: Sequence[str] | None = None) -> list[RankEntry]:
    groups = _by_task(results)
    ids = list(groups) if tasks is None else list(tasks)
    return [e for tid in ids for e in rank_methods(groups[tid])]


@dataclass
class ControllerSummary:
    controller: str
    n_tasks: int
    success_rate: float
    collision_free_rate: float
    mean_coverage: float
    first_place_fraction: float
    median_staleness: float | None
    staleness_histogram: list[int]
    latency: dict


def latency_stats(samples: Sequence[float]) -> dict:
    a = np.asarray(samples, dtype=float)
    if a.size == 0:
        return {"count": 0, "mean": None, "p50": None, "p95": None, "max": None}
    return {
        "count": int(a.size),
        "mean": float(a.mean()),
        "p50": float(np.percentile(a, 50)),
        "p95": float(np.percentile(a, 95)),
        "max": float(a.max()),
    }


def staleness_histogram(samples: Iterable[int], t_clip: int = 100) -> np.ndarray:
    a = np.asarray(list(samples), dtype=np.int64)
    if a.size and (a.min() < 0 or a.max() > t_clip):
        raise ValueError("staleness sample outside [0, t_clip]")
    return np.bincount(a, minlength=t_clip + 1)


def aggregate(results: Sequence[EpisodeResult], t_clip: int = 100) -> dict[str, ControllerSummary]:
    """Per-controller summary over the filtered task set.

    Rates, coverage, staleness and first places use only tasks that some
    controller solved. Latency covers every episode, since the decision
    cost does not depend on the outcome.
    """
    results = list(results)
    if not results:
        raise EmptyInput("no results to aggregate")
    keep = filter_tasks(results)
    kept = set(keep)
    firsts: dict[str, int] = defaultdict(int)
    for e in rank_table(results, keep):
        if e.rank == 1:
            firsts[e.controller] += 1

    out: dict[str, ControllerSummary] = {}
    for name in sorted({r.controller for r in results}):
        mine = [r for r in results if r.controller == name]
        sel = [r for r in mine if r.task_id in kept]
        n = len(sel)
        stale = [v for r in sel for v in r.occupancy_staleness]
        out[name] = ControllerSummary(
            controller=name,
            n_tasks=n,
            success_rate=sum(r.success for r in sel) / n if n else 0.0,
            collision_free_rate=sum(r.collision_free for r in sel) / n if n else 0.0,
            mean_coverage=float(np.mean([r.coverage for r in sel])) if n else 0.0,
            first_place_fraction=firsts[name] / len(keep) if keep else 0.0,
            median_staleness=float(np.median(stale)) if stale else None,
            staleness_histogram=staleness_histogram(stale, t_clip).tolist(),
            latency=latency_stats([x for r in mine for x in r.decision_latencies]),
        )
    return out
