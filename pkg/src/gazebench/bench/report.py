"""CSV/JSON outputs derived from a results document."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from .episode import EpisodeResult
from .metrics import RankEntry, aggregate, filter_tasks, rank_table

RANK_COLUMNS = ("task_id", "controller", "tier", "coverage", "rank")


def write_rank_csv(path, entries: Sequence[RankEntry]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(RANK_COLUMNS)
        for e in entries:
            w.writerow([e.task_id, e.controller, e.tier, repr(e.coverage), e.rank])
    return path


def write_rank(path, results: Sequence[EpisodeResult]) -> Path:
    return write_rank_csv(path, rank_table(results, filter_tasks(results)))


def write_report(out_dir, results: Sequence[EpisodeResult], t_clip: int = 100) -> dict[str, Path]:
    """Write summary.json, staleness_histogram.csv, latency.csv and latency_samples.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = aggregate(results, t_clip)
    names = sorted(summary)
    tasks_total = len({r.task_id for r in results})
    doc = {
        "tasks_total": tasks_total,
        "tasks_filtered": len(filter_tasks(results)),
        "controllers": {n: {k: v for k, v in asdict(summary[n]).items() if k != "staleness_histogram"}
                        for n in names},
    }
    paths = {"summary": out / "summary.json", "staleness": out / "staleness_histogram.csv",
             "latency": out / "latency.csv", "latency_samples": out / "latency_samples.csv"}
    paths["summary"].write_text(json.dumps(doc, indent=1) + "\n")

    with paths["staleness"].open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["bin", *names])
        for b in range(t_clip + 1):
            w.writerow([b, *(summary[n].staleness_histogram[b] for n in names)])

    stats = ("count", "mean", "p50", "p95", "max")
    with paths["latency"].open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["controller", *(f"{s}_s" if s != "count" else s for s in stats)])
        for n in names:
            w.writerow([n, *(summary[n].latency[s] for s in stats)])

    # the raw distribution, one row per decision
    with paths["latency_samples"].open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["controller", "task_id", "step", "latency_s"])
        for r in results:
            for i, x in enumerate(r.decision_latencies):
                w.writerow([r.controller, r.task_id, i, x])
    return paths
