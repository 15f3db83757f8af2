"""Command-line entry points.

`stresslab` is the umbrella command; `stimgen` is a shortcut for the
`gen-stimuli` subcommand. Usage errors exit 2 (argparse default), runtime
failures print a diagnostic to stderr and exit 1.
"""
from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis
from .corpus import CorpusBuilder, CorpusView
from .errors import StressLabError
from .graphs import generate_graph
from .quality import (
    average_edge_length,
    average_node_distance,
    correlation_matrix,
    count_crossings,
    crossing_bound,
    edge_crossing_metric,
    node_uniformity,
)
from .stress import kruskal_stress, ksm, metric_stress, normalized_metric_stress
from .trials import (
    MODES,
    ResponseRecord,
    SessionConfig,
    SIZES,
    TrialPlan,
    grade,
    schedule_session,
)

REPORT_METRICS = (
    "ksm",
    "kruskal_stress",
    "metric_stress",
    "normalized_metric_stress",
    "edge_crossing",
    "node_uniformity",
    "average_edge_length",
    "average_node_distance",
    "crossing_count",
)


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list: {text!r}")
    if not sizes or any(s < 2 for s in sizes):
        raise argparse.ArgumentTypeError(f"bad size list: {text!r}")
    return sizes


def _resolve_seed(value: int | None) -> int:
    """--seed flag, then STRESSLAB_SEED, then fresh entropy."""
    if value is not None:
        return value
    env = os.environ.get("STRESSLAB_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise StressLabError(f"STRESSLAB_SEED must be an integer, got {env!r}")
    return secrets.randbits(31)


def _score_row(view: CorpusView, key: str) -> dict:
    gid, set_id, label = key.split("/")
    graph = view.graph(gid)
    drawing = view.drawing(gid, set_id, round(float(label) * 100))
    crossings = count_crossings(drawing)
    bound = crossing_bound(graph)
    return {
        "drawing_id": key,
        "ksm": ksm(drawing),
        "kruskal_stress": kruskal_stress(drawing),
        "metric_stress": metric_stress(drawing),
        "normalized_metric_stress": normalized_metric_stress(drawing),
        "edge_crossing": edge_crossing_metric(drawing, bound=bound, crossings=crossings),
        "node_uniformity": node_uniformity(drawing),
        "average_edge_length": average_edge_length(drawing),
        "average_node_distance": average_node_distance(drawing),
        "crossing_count": crossings,
    }


_worker_view: CorpusView | None = None


def _score_init(corpus_dir: str) -> None:
    global _worker_view
    _worker_view = CorpusView(corpus_dir)


def _score_task(key: str) -> dict:
    assert _worker_view is not None
    return _score_row(_worker_view, key)


# -- subcommand handlers ----------------------------------------------------


def _cmd_gen_graphs(args) -> int:
    seed = _resolve_seed(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    index = {"v": 1, "seed": seed, "graphs": []}
    for size in args.sizes:
        for gi in range(args.count):
            # Same seed key as the corpus builder uses, so a later
            # gen-stimuli run with this seed reuses identical graphs.
            graph = generate_graph(
                size,
                edge_probability=args.edge_probability,
                seed=np.random.SeedSequence([seed, size, gi]),
            )
            gid = f"n{size}-g{gi}"
            path = out / f"{gid}.json"
            path.write_text(json.dumps(graph.to_json(), sort_keys=True) + "\n")
            index["graphs"].append(
                {"id": gid, "n": graph.n, "m": len(graph.edges), "file": path.name}
            )
            print(f"{gid}: n={graph.n} m={len(graph.edges)}")
    (out / "graphs.json").write_text(json.dumps(index, indent=1, sort_keys=True) + "\n")
    print(f"seed: {seed}")
    print(f"wrote {len(index['graphs'])} graphs to {out}")
    return 0


def _cmd_gen_stimuli(args) -> int:
    seed = _resolve_seed(args.seed)
    builder = CorpusBuilder(
        args.out,
        seed,
        tolerance=args.tolerance,
        restart_budget=args.restarts,
        jobs=args.jobs,
        log=lambda msg: print(msg, flush=True),
    )
    manifest = builder.build(args.sizes)
    n = len(manifest["drawings"])
    print(f"seed: {seed}")
    print(f"corpus complete: {n} drawings under {args.out}")
    return 0


def _cmd_score(args) -> int:
    view = CorpusView(args.corpus)
    keys = view.all_drawing_keys()
    if args.jobs > 1:
        with ProcessPoolExecutor(
            max_workers=args.jobs,
            initializer=_score_init,
            initargs=(str(args.corpus),),
        ) as pool:
            rows = list(pool.map(_score_task, keys))
    else:
        rows = [_score_row(view, key) for key in keys]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    print(f"scored {len(rows)} drawings -> {out}")
    return 0


def _cmd_correlate(args) -> int:
    rows = []
    with open(args.report) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    metrics = args.metrics.split(",") if args.metrics else None
    matrix = correlation_matrix(rows, metrics=metrics)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(matrix.to_json(), indent=1, sort_keys=True) + "\n")
    width = max(len(m) for m in matrix.metrics)
    print(" " * width + "  " + "  ".join(f"{m[:6]:>6}" for m in matrix.metrics))
    for name, row in zip(matrix.metrics, matrix.pearson):
        cells = "  ".join("  None" if v is None else f"{v:+.3f}" for v in row)
        print(f"{name:>{width}}  {cells}")
    print(f"wrote {out}")
    return 0


def _cmd_schedule(args) -> int:
    seed = _resolve_seed(args.seed)
    config = SessionConfig(
        mode=args.mode,
        participant_id=args.participant,
        seed=seed,
        size=None if args.mode == "expert" else args.size,
    )
    view = CorpusView(args.corpus)
    plans = schedule_session(config, view)
    doc = {
        "v": 1,
        "config": config.to_json(),
        "plans": [p.to_json() for p in plans],
    }
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    training = sum(1 for p in plans if p.kind == "training")
    print(f"seed: {seed}")
    print(f"{len(plans)} trials ({training} training) -> {out}")
    return 0


def _cmd_grade(args) -> int:
    doc = json.loads(Path(args.plan).read_text())
    plans = {p["trial_index"]: TrialPlan.from_json(p) for p in doc["plans"]}
    graded = []
    with open(args.responses) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if obj.get("kind") not in (None, "response"):
                continue
            record = ResponseRecord.from_json(obj)
            plan = plans.get(record.trial_index)
            if plan is None:
                raise StressLabError(f"no plan for trial {record.trial_index}")
            graded.append(
                {
                    "trial_index": record.trial_index,
                    "kind": plan.kind,
                    "answer": record.answer,
                    "correct_answer": plan.correct_answer,
                    "correct": grade(plan, record),
                }
            )
    lines = [json.dumps(g, sort_keys=True) for g in graded]
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n" if lines else "")
    else:
        for line in lines:
            print(line)
    right = sum(g["correct"] for g in graded)
    print(f"{right}/{len(graded)} correct", file=sys.stderr)
    return 0


_GROUP_MODES = {"trained": "trained-feedback", "untrained": "untrained", "expert": "expert"}


def _cmd_aggregate(args) -> int:
    logs = analysis.read_study_logs(args.study)
    mode = _GROUP_MODES[args.group]
    selected = [log for log in logs if log.config.mode == mode]
    if not selected:
        raise StressLabError(f"no {mode} sessions under {args.study}")
    blocks = analysis.extract_blocks(selected)
    blocks, replaced = analysis.replace_outliers(blocks)
    rows = analysis.aggregate(blocks, args.group)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    analysis.write_aggregate_csv(rows, args.out)
    for rep in replaced:
        print(
            f"outlier: {rep.participant_id} trial {rep.trial_index} "
            f"{rep.original_time:.1f}s -> {rep.replacement_time:.1f}s"
        )
    print(f"{len(selected)} sessions, {len(rows)} rows -> {args.out}")
    return 0


def _cmd_plot(args) -> int:
    rows = analysis.read_aggregate_csv(args.csv)
    out = Path(args.out)
    paths = analysis.emit_delta_charts(rows, out)
    for path in paths:
        print(f"wrote {path}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.corpus, args.study)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_export(args) -> int:
    from .service import build_study_tar

    data = build_study_tar(args.study)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(data)
    print(f"wrote {out} ({len(data)} bytes)")
    return 0


# -- parser wiring ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stresslab",
        description="Graph-drawing stress metrics, stimulus synthesis, and "
        "2AFC perception-study tooling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graphs", help="sample sparse connected graphs")
    p.add_argument("--sizes", type=_parse_sizes, required=True, help="comma list, e.g. 10,25,50")
    p.add_argument("--count", type=int, default=5, help="graphs per size (default 5)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--edge-probability", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_graphs)

    p = sub.add_parser("gen-stimuli", help="build the full drawing corpus by hill climbing")
    p.add_argument("--sizes", type=_parse_sizes, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--tolerance", type=float, default=0.01)
    p.add_argument("--restarts", type=int, default=5)
    p.set_defaults(func=_cmd_gen_stimuli)

    p = sub.add_parser("score", help="compute per-drawing metric report over a corpus")
    p.add_argument("corpus")
    p.add_argument("--out", required=True, help="JSONL report path")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("correlate", help="Pearson matrix over a metric report")
    p.add_argument("report", help="JSONL report from `score`")
    p.add_argument("--out", required=True, help="JSON output path")
    p.add_argument("--metrics", default=None, help="comma list (default: all numeric)")
    p.set_defaults(func=_cmd_correlate)

    p = sub.add_parser("schedule", help="emit a full session trial plan")
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--size", type=int, choices=SIZES, default=None)
    p.add_argument("--participant", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_schedule)

    p = sub.add_parser("grade", help="grade a response log against a plan")
    p.add_argument("--plan", required=True, help="JSON from `schedule`")
    p.add_argument("--responses", required=True, help="JSONL of response records")
    p.add_argument("--out", default=None, help="graded JSONL (default stdout)")
    p.set_defaults(func=_cmd_grade)

    p = sub.add_parser("aggregate", help="per-delta aggregate CSV from session logs")
    p.add_argument("study", help="study directory of session JSONL logs")
    p.add_argument("--group", choices=sorted(_GROUP_MODES), required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("plot", help="per-delta line charts from an aggregate CSV")
    p.add_argument("csv")
    p.add_argument("--out", required=True, help="output directory for SVGs")
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("serve", help="run the session service")
    p.add_argument("--corpus", required=True)
    p.add_argument("--study", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("export", help="deterministic tar of a study directory")
    p.add_argument("study")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StressLabError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def stimgen(argv: list[str] | None = None) -> int:
    """Alias entry point: `stimgen --sizes 10,25,50 --seed S --out corpus/`."""
    parser = argparse.ArgumentParser(
        prog="stimgen",
        description="Build the stimulus corpus (alias for `stresslab gen-stimuli`).",
    )
    parser.add_argument("--sizes", type=_parse_sizes, required=True)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", required=True)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--tolerance", type=float, default=0.01)
    parser.add_argument("--restarts", type=int, default=5)
    args = parser.parse_args(argv)
    args.func = _cmd_gen_stimuli
    try:
        return _cmd_gen_stimuli(args)
    except StressLabError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
