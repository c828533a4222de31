"""``gazebench`` command line: gen, run, rank, report."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .runner import ALL_CONTROLLERS, load_results, parse_controllers, results_document, run_suite, write_results
from .report import write_rank, write_report
from .suites import SUITE_CONFIGS, SUITES, Suite, build_suite


def _overrides(path: str | None) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text())


def cmd_gen(a) -> int:
    kw = {}
    over = _overrides(a.config)
    if over:
        kw["config"] = SUITE_CONFIGS[a.suite]().merged(over)
    suite = build_suite(a.suite, a.seed, **kw)
    out = suite.save(a.out)
    print(f"wrote {len(suite.tasks)} tasks in {len(suite.envs)} environments to {out}")
    return 0


def cmd_run(a) -> int:
    suite = Suite.load(a.suite)
    cfg = suite.config.merged(_overrides(a.config))
    controllers = parse_controllers(a.controllers)
    results = run_suite(suite, controllers, cfg, workers=a.workers, frames_dir=a.frames, limit=a.limit)
    write_results(a.out, results_document(suite, cfg, controllers, results))
    ok = sum(r.success for r in results)
    print(f"{len(results)} episodes, {ok} successful; results in {a.out}")
    return 0


def cmd_rank(a) -> int:
    _, results = load_results(a.inp)
    print(f"rank table written to {write_rank(a.out, results)}")
    return 0


def cmd_report(a) -> int:
    doc, results = load_results(a.inp)
    t_clip = int(doc.get("config", {}).get("gaze", {}).get("t_clip", 100))
    paths = write_report(a.out, results, t_clip)
    summary = json.loads(paths["summary"].read_text())
    print(f"tasks: {summary['tasks_filtered']} of {summary['tasks_total']} kept")
    for name, s in summary["controllers"].items():
        print(f"  {name:10s} success {s['success_rate']:.3f}  coverage {s['mean_coverage']:.4f}  "
              f"first {s['first_place_fraction']:.3f}  median staleness {s['median_staleness']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gazebench", description="Active gaze control benchmark harness.")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a canonical suite")
    g.add_argument("--suite", required=True, choices=sorted(SUITES))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--config", help="JSON file of config overrides baked into the suite")
    g.set_defaults(fn=cmd_gen)

    r = sub.add_parser("run", help="run controllers over a generated suite")
    r.add_argument("--suite", required=True, help="suite directory written by 'gen'")
    r.add_argument("--controllers", default=",".join(ALL_CONTROLLERS))
    r.add_argument("--out", required=True)
    r.add_argument("--frames", help="directory for per-step PGM belief frames")
    r.add_argument("--workers", type=int, default=min(4, os.cpu_count() or 1))
    r.add_argument("--config", help="JSON file of config overrides")
    r.add_argument("--limit", type=int, help="run only the first N tasks")
    r.set_defaults(fn=cmd_run)

    k = sub.add_parser("rank", help="tiered per-task ranking as CSV")
    k.add_argument("--in", dest="inp", required=True)
    k.add_argument("--out", required=True)
    k.set_defaults(fn=cmd_rank)

    s = sub.add_parser("report", help="summary, staleness histogram and latency tables")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_report)
    return p


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        return a.fn(a)
    except (ValueError, FileNotFoundError) as e:
        print(f"gazebench: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
