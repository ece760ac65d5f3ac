"""``ccsplan`` command line: run grids, build tables, render scenes."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from ..config import load_constants
from ..errors import TaskError
from ..orchestrator import APPROACHES, EpisodeConfig, WireBackend
from ..scene import state_from_dict
from ..solver import frozen_clock
from ..tasks import catalog
from .grid import FixtureSource, SharedBackend, load_records, run_grid
from .report import emit_metrics_csv, emit_svg, emit_table, plot_success


def _split(values: list[str] | None, everything: list[str]) -> list[str]:
    if not values or values == ["all"]:
        return list(everything)
    out = []
    for v in values:
        out += [x for x in v.split(",") if x]
    return out


def _seeds(text: str) -> list[int]:
    if "," in text or "-" in text.strip("-"):
        out = []
        for part in text.split(","):
            if "-" in part:
                lo, hi = part.split("-")
                out += list(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        return out
    return list(range(int(text)))


def _svg_name(rec) -> str:
    return f"{rec.task}__{rec.approach}__s{rec.seed}.svg"


def cmd_run(args) -> int:
    consts = load_constants(args.config)
    tasks = _split(args.task, [t.task_id for t in catalog()])
    approaches = _split(args.approach, list(APPROACHES))
    if args.backend == "replay":
        factory = FixtureSource(args.fixtures)
        clock = frozen_clock if not args.real_clock else time.perf_counter
    else:
        if not args.endpoint or not args.model:
            print("error: --backend wire needs --endpoint and --model", file=sys.stderr)
            return 2
        factory = SharedBackend(WireBackend(args.endpoint, args.model, args.key_env))
        clock = time.perf_counter
    cfg = EpisodeConfig(budget=args.budget, consts=consts, clock=clock)
    out = Path(args.out)
    new = run_grid(tasks, approaches, _seeds(args.seeds), factory, out, workers=args.workers, cfg=cfg,
                   consts=consts)
    svg_dir = out / "svg"
    svg_dir.mkdir(parents=True, exist_ok=True)
    for rec in new:
        state = rec.final_state or rec.initial_state
        if state is not None:
            emit_svg(state_from_dict(state), svg_dir / _svg_name(rec), consts)
    wins = sum(r.success for r in new)
    print(f"ran {len(new)} cell(s), {wins} succeeded; records in {out / 'records.ndjson'}")
    return 0


def cmd_table(args) -> int:
    records = load_records(args.input)
    if not records:
        print(f"error: no records found in {args.input}", file=sys.stderr)
        return 1
    out = Path(args.out or args.input)
    out.mkdir(parents=True, exist_ok=True)
    md = emit_table(records)
    (out / "success.md").write_text(md)
    (out / "success.csv").write_text(emit_table(records, fmt="csv"))
    (out / "metrics.csv").write_text(emit_metrics_csv(records))
    if not args.no_figure:
        plot_success(records, out / "success.png")
    print(md, end="")
    return 0


def cmd_render(args) -> int:
    consts = load_constants(args.config)
    text = Path(args.record).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    try:
        docs = [json.loads(ln) for ln in lines] if len(lines) > 1 else [json.loads(text)]
    except json.JSONDecodeError as e:
        print(f"error: {args.record} is not JSON: {e}", file=sys.stderr)
        return 1
    for key, want in (("task", args.task), ("approach", args.approach), ("seed", args.seed)):
        if want is not None:
            docs = [d for d in docs if str(d.get(key)) == str(want)]
    if not docs:
        print("error: no matching record", file=sys.stderr)
        return 1
    doc = docs[0]
    state = doc.get("final_state") or doc.get("initial_state")
    if state is None and "objects" in doc:
        state = doc
    if state is None:
        print("error: record holds no scene", file=sys.stderr)
        return 1
    path = emit_svg(state_from_dict(state), args.out, consts)
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccsplan", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a task x approach x seed grid")
    r.add_argument("--task", action="append", help="task id(s), comma separated or repeated; default all")
    r.add_argument("--approach", action="append", help="approach(es); default all seven")
    r.add_argument("--seeds", default="10", help="a count N (seeds 0..N-1) or a list like 0,3,5-7")
    r.add_argument("--budget", type=int, help="override the per-solve sample budget")
    r.add_argument("--backend", choices=("replay", "wire"), default="replay")
    r.add_argument("--fixtures", help="replay fixture root (default: bundled fixtures)")
    r.add_argument("--endpoint", help="chat-completions URL for the wire backend")
    r.add_argument("--model", help="model name for the wire backend")
    r.add_argument("--key-env", default="OPENAI_API_KEY", help="environment variable holding the API key")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--config", help="JSON file overriding constants and tolerances")
    r.add_argument("--real-clock", action="store_true", help="record real timings in replay mode")
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("table", help="success table, metrics and figure from records")
    t.add_argument("--in", dest="input", required=True, help="directory holding records.ndjson")
    t.add_argument("--out", help="where to write tables (default: the input directory)")
    t.add_argument("--no-figure", action="store_true")
    t.set_defaults(func=cmd_table)

    v = sub.add_parser("render", help="top-down SVG of a recorded scene")
    v.add_argument("--record", required=True, help="records.ndjson, a single record, or a state JSON")
    v.add_argument("--out", required=True, help="SVG path")
    v.add_argument("--task")
    v.add_argument("--approach")
    v.add_argument("--seed", type=int)
    v.add_argument("--config")
    v.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, TaskError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
