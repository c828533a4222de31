"""Run a suite across controllers, optionally over a process pool, and persist results."""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from ..gaze import ControllerKind
from .config import RunConfig
from .episode import LATENCY_FIELDS, RESULT_SCHEMA, EpisodeResult, run_episode
from .suites import Suite

ALL_CONTROLLERS = tuple(k.value for k in ControllerKind)

_worker_state: dict = {}


def _init_worker(suite: Suite, cfg: RunConfig, frames_root):
    _worker_state.update(suite=suite, cfg=cfg, frames=frames_root)


def _run_job(job: tuple[int, str]) -> dict:
    ti, controller = job
    suite, cfg, frames = _worker_state["suite"], _worker_state["cfg"], _worker_state["frames"]
    task = suite.tasks[ti]
    fdir = None if frames is None else Path(frames) / task.task_id / controller
    return run_episode(task, suite.envs[task.env_id], controller, cfg, frames_dir=fdir).to_dict()


def parse_controllers(spec: str | Sequence[str]) -> list[str]:
    names = [s.strip() for s in spec.split(",")] if isinstance(spec, str) else list(spec)
    names = [n for n in names if n]
    for n in names:
        ControllerKind(n)
    if len(set(names)) != len(names):
        raise ValueError("duplicate controller names")
    return names


def run_suite(suite: Suite, controllers: Sequence[str] = ALL_CONTROLLERS, cfg: RunConfig | None = None,
              workers: int = 1, frames_dir=None, limit: int | None = None) -> list[EpisodeResult]:
    """Every (task, controller) pair, returned in task-major, controller-minor order."""
    cfg = cfg or suite.config
    n = len(suite.tasks) if limit is None else min(limit, len(suite.tasks))
    jobs = [(ti, c) for ti in range(n) for c in controllers]
    if workers <= 1:
        _init_worker(suite, cfg, frames_dir)
        docs = [_run_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(suite, cfg, frames_dir)) as ex:
            docs = list(ex.map(_run_job, jobs, chunksize=1))
    return [EpisodeResult.from_dict(d) for d in docs]


def results_document(suite: Suite, cfg: RunConfig, controllers: Sequence[str],
                     results: Sequence[EpisodeResult]) -> dict:
    return {
        "schema": RESULT_SCHEMA,
        "suite": suite.name,
        "suite_seed": suite.seed,
        "controllers": list(controllers),
        "config": cfg.to_dict(),
        "config_digest": cfg.digest(),
        "results": [r.to_dict() for r in results],
    }


def write_results(path, doc: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n")
    return path


def load_results(path) -> tuple[dict, list[EpisodeResult]]:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != RESULT_SCHEMA:
        raise ValueError(f"unsupported results schema {doc.get('schema')!r}")
    return doc, [EpisodeResult.from_dict(d) for d in doc["results"]]


def mask_latencies(doc: dict) -> dict:
    """Copy of a results document with wall-clock fields blanked."""
    out = dict(doc)
    out["results"] = [{**r, **{k: None for k in LATENCY_FIELDS}} for r in doc["results"]]
    return out
