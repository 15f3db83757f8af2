"""Response-log analysis: session log I/O, outlier handling, per-delta
aggregation, t-tests, and line-chart emission.

A session log is JSONL: one header line holding the config and the full
trial plan, then one line per response, then an optional questionnaire
line. The header makes every log self-contained, so analysis never needs
the corpus. A truncated trailing line (interrupted write) is ignored.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.special import betainc

from .errors import AnalysisError, IncompleteLogError
from .trials import ResponseRecord, SessionConfig, TrialPlan, grade

OUTLIER_THRESHOLD_S = 200.0


@dataclass
class SessionLog:
    session_id: str
    config: SessionConfig
    plans: list[TrialPlan]
    responses: list[ResponseRecord]
    questionnaire: dict | None = None

    def header_json(self) -> dict:
        return {
            "v": 1,
            "kind": "header",
            "session_id": self.session_id,
            "config": self.config.to_json(),
            "plans": [p.to_json() for p in self.plans],
        }


def read_session_log(path: str | Path) -> SessionLog:
    """Parse a JSONL session log, ignoring a truncated trailing line."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise AnalysisError(f"{path}: empty session log")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as err:
        raise AnalysisError(f"{path}: unreadable header line: {err}") from err
    if header.get("kind") != "header":
        raise AnalysisError(f"{path}: first line is not a session header")
    log = SessionLog(
        session_id=header["session_id"],
        config=SessionConfig.from_json(header["config"]),
        plans=[TrialPlan.from_json(p) for p in header["plans"]],
        responses=[],
    )
    for line in lines[1:]:
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            break  # interrupted final write; everything durable precedes it
        if obj.get("kind") == "response":
            log.responses.append(ResponseRecord.from_json(obj))
        elif obj.get("kind") == "questionnaire":
            log.questionnaire = {
                k: v for k, v in obj.items() if k not in ("kind", "v")
            }
    return log


def read_study_logs(study_dir: str | Path) -> list[SessionLog]:
    logs = []
    for path in sorted(Path(study_dir).glob("*.jsonl")):
        logs.append(read_session_log(path))
    return logs


class TrialOutcome(NamedTuple):
    plan: TrialPlan
    response: ResponseRecord
    correct: bool


@dataclass
class ParticipantBlock:
    """One participant's 45 graded main trials for one graph size."""

    participant_id: str
    mode: str
    size: int
    trials: list[TrialOutcome]


def extract_blocks(logs: Iterable[SessionLog]) -> list[ParticipantBlock]:
    """Join responses to main-trial plans, one block per (participant, size).

    Raises IncompleteLogError when any main trial lacks a response.
    """
    blocks = []
    for log in logs:
        by_index = {r.trial_index: r for r in log.responses}
        per_size: dict[int, list[TrialOutcome]] = {}
        missing = []
        for plan in log.plans:
            if plan.kind != "main":
                continue
            response = by_index.get(plan.trial_index)
            if response is None:
                missing.append(plan.trial_index)
                continue
            per_size.setdefault(plan.size, []).append(
                TrialOutcome(plan, response, grade(plan, response))
            )
        if missing:
            raise IncompleteLogError(log.config.participant_id, missing)
        for size in sorted(per_size):
            blocks.append(
                ParticipantBlock(
                    participant_id=log.config.participant_id,
                    mode=log.config.mode,
                    size=size,
                    trials=per_size[size],
                )
            )
    return blocks


class OutlierReplacement(NamedTuple):
    participant_id: str
    size: int
    trial_index: int
    original_time: float
    replacement_time: float


def replace_outliers(
    blocks: Sequence[ParticipantBlock], threshold: float = OUTLIER_THRESHOLD_S
) -> tuple[list[ParticipantBlock], list[OutlierReplacement]]:
    """Replace response times above threshold with the participant's mean.

    The mean is over that participant's remaining (at or below threshold)
    response times within the block. Idempotent; returns new blocks plus an
    audit entry per replacement.
    """
    cleaned = []
    audit = []
    for block in blocks:
        times = [t.response.response_time for t in block.trials]
        kept = [t for t in times if t <= threshold]
        if len(kept) == len(times):
            cleaned.append(block)
            continue
        if not kept:
            raise AnalysisError(
                f"participant {block.participant_id}: every response time is "
                f"above {threshold}s, replacement mean undefined"
            )
        mean = sum(kept) / len(kept)
        new_trials = []
        for outcome in block.trials:
            if outcome.response.response_time > threshold:
                audit.append(
                    OutlierReplacement(
                        block.participant_id,
                        block.size,
                        outcome.plan.trial_index,
                        outcome.response.response_time,
                        mean,
                    )
                )
                new_trials.append(
                    TrialOutcome(
                        outcome.plan,
                        replace(outcome.response, response_time=mean),
                        outcome.correct,
                    )
                )
            else:
                new_trials.append(outcome)
        cleaned.append(replace(block, trials=new_trials))
    return cleaned, audit


def aggregate(blocks: Sequence[ParticipantBlock], group: str) -> list[dict]:
    """Group means per (size, delta): accuracy 0-5, confidence 0-10, time.

    same_count totals "same" answers across the group's participants at a
    delta. Trial order within a block never affects the result.
    """
    if not blocks:
        raise AnalysisError("no participant blocks to aggregate")
    per_cell: dict[tuple[int, int], dict] = {}
    for block in blocks:
        by_delta: dict[int, list[TrialOutcome]] = {}
        for outcome in block.trials:
            by_delta.setdefault(outcome.plan.delta_centi, []).append(outcome)
        for delta, outcomes in by_delta.items():
            cell = per_cell.setdefault(
                (block.size, delta),
                {"accuracy": [], "confidence": [], "time": [], "same": 0},
            )
            cell["accuracy"].append(sum(1 for o in outcomes if o.correct))
            cell["confidence"].append(sum(2 for o in outcomes if o.response.confident))
            cell["time"].append(
                sum(o.response.response_time for o in outcomes) / len(outcomes)
            )
            cell["same"] += sum(1 for o in outcomes if o.response.answer == "same")
    rows = []
    for (size, delta) in sorted(per_cell):
        cell = per_cell[(size, delta)]
        k = len(cell["accuracy"])
        rows.append(
            {
                "group": group,
                "size": size,
                "delta": delta / 100,
                "mean_accuracy": sum(cell["accuracy"]) / k,
                "mean_confidence": sum(cell["confidence"]) / k,
                "mean_time": sum(cell["time"]) / k,
                "same_count": cell["same"],
            }
        )
    return rows


AGGREGATE_COLUMNS = (
    "group",
    "size",
    "delta",
    "mean_accuracy",
    "mean_confidence",
    "mean_time",
    "same_count",
)


def write_aggregate_csv(rows: Sequence[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row["group"],
                    row["size"],
                    f"{row['delta']:.2f}",
                    f"{row['mean_accuracy']:.6f}",
                    f"{row['mean_confidence']:.6f}",
                    f"{row['mean_time']:.6f}",
                    row["same_count"],
                ]
            )


def read_aggregate_csv(path: str | Path) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                {
                    "group": rec["group"],
                    "size": int(rec["size"]),
                    "delta": float(rec["delta"]),
                    "mean_accuracy": float(rec["mean_accuracy"]),
                    "mean_confidence": float(rec["mean_confidence"]),
                    "mean_time": float(rec["mean_time"]),
                    "same_count": int(rec["same_count"]),
                }
            )
    return rows


class TTestResult(NamedTuple):
    t: float
    df: float
    p: float


def _two_tailed_p(t: float, df: float) -> float:
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def t_test(
    sample_a: Sequence[float],
    sample_b: Sequence[float],
    paired: bool = False,
    *,
    equal_var: bool = True,
) -> TTestResult:
    """Student's t with two-tailed p via the regularized incomplete beta.

    Independent samples pool variance by default; equal_var=False switches
    to the Welch form. Identical samples give t=0, p=1; zero variance with
    unequal means is an error.
    """
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise AnalysisError("each sample needs at least 2 observations")
    if paired:
        if a.size != b.size:
            raise AnalysisError("paired samples must have equal length")
        d = a - b
        n = d.size
        md = float(d.mean())
        vd = float(d.var(ddof=1))
        df = float(n - 1)
        if vd == 0.0:
            if md == 0.0:
                return TTestResult(0.0, df, 1.0)
            raise AnalysisError("zero variance of differences with nonzero mean")
        t = md / math.sqrt(vd / n)
        return TTestResult(t, df, _two_tailed_p(t, df))
    na, nb = a.size, b.size
    ma, mb = float(a.mean()), float(b.mean())
    va, vb = float(a.var(ddof=1)), float(b.var(ddof=1))
    if equal_var:
        df = float(na + nb - 2)
        pooled = ((na - 1) * va + (nb - 1) * vb) / df
        se2 = pooled * (1.0 / na + 1.0 / nb)
    else:
        se2 = va / na + vb / nb
        if se2 > 0.0:
            df = se2 * se2 / (
                (va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1)
            )
        else:
            df = float(na + nb - 2)
    if se2 == 0.0:
        if ma == mb:
            return TTestResult(0.0, df, 1.0)
        raise AnalysisError("zero pooled variance with unequal means")
    t = (ma - mb) / math.sqrt(se2)
    return TTestResult(t, df, _two_tailed_p(t, df))


# -- chart emission ---------------------------------------------------------

_PALETTE = ("#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377")


def render_line_chart(
    series: dict[str, list[tuple[float, float]]],
    *,
    title: str,
    x_label: str,
    y_label: str,
    y_floor: float | None = None,
    width: int = 640,
    height: int = 420,
) -> str:
    """Minimal deterministic SVG line chart, one polyline per series."""
    if not series:
        raise AnalysisError("no series to plot")
    pad_l, pad_r, pad_t, pad_b = 62.0, 16.0, 34.0, 46.0
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x_min, x_max = min(xs), max(xs)
    y_min = min(ys) if y_floor is None else min(y_floor, min(ys))
    y_max = max(ys)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0
    plot_w = width - pad_l - pad_r
    plot_h = height - pad_t - pad_b

    def px(x: float) -> float:
        return pad_l + (x - x_min) / (x_max - x_min) * plot_w

    def py(y: float) -> float:
        return pad_t + (y_max - y) / (y_max - y_min) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">'
        f"{title}</text>",
        f'<line x1="{pad_l:.1f}" y1="{pad_t:.1f}" x2="{pad_l:.1f}" '
        f'y2="{pad_t + plot_h:.1f}" stroke="#333333"/>',
        f'<line x1="{pad_l:.1f}" y1="{pad_t + plot_h:.1f}" '
        f'x2="{pad_l + plot_w:.1f}" y2="{pad_t + plot_h:.1f}" stroke="#333333"/>',
        f'<text x="{pad_l + plot_w / 2:.1f}" y="{height - 10:.1f}" '
        f'text-anchor="middle" font-size="12">{x_label}</text>',
        f'<text x="14" y="{pad_t + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-size="12" transform="rotate(-90 14 {pad_t + plot_h / 2:.1f})">'
        f"{y_label}</text>",
    ]
    for i in range(5):
        y = y_min + (y_max - y_min) * i / 4
        out.append(
            f'<line x1="{pad_l - 4:.1f}" y1="{py(y):.1f}" x2="{pad_l:.1f}" '
            f'y2="{py(y):.1f}" stroke="#333333"/>'
        )
        out.append(
            f'<text x="{pad_l - 8:.1f}" y="{py(y) + 4:.1f}" text-anchor="end" '
            f'font-size="11">{y:.2f}</text>'
        )
    for x in sorted({x for pts in series.values() for x, _ in pts}):
        out.append(
            f'<line x1="{px(x):.1f}" y1="{pad_t + plot_h:.1f}" x2="{px(x):.1f}" '
            f'y2="{pad_t + plot_h + 4:.1f}" stroke="#333333"/>'
        )
        out.append(
            f'<text x="{px(x):.1f}" y="{pad_t + plot_h + 18:.1f}" '
            f'text-anchor="middle" font-size="11">{x:.2f}</text>'
        )
    for idx, (label, pts) in enumerate(sorted(series.items())):
        color = _PALETTE[idx % len(_PALETTE)]
        path = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in sorted(pts))
        out.append(
            f'<polyline points="{path}" fill="none" stroke="{color}" '
            f'stroke-width="2"/>'
        )
        ly = pad_t + 14 + 16 * idx
        out.append(
            f'<line x1="{pad_l + plot_w - 120:.1f}" y1="{ly - 4:.1f}" '
            f'x2="{pad_l + plot_w - 96:.1f}" y2="{ly - 4:.1f}" stroke="{color}" '
            f'stroke-width="2"/>'
        )
        out.append(
            f'<text x="{pad_l + plot_w - 90:.1f}" y="{ly:.1f}" font-size="11">'
            f"{label}</text>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


_CHART_SPECS = (
    ("mean_accuracy", "accuracy.svg", "Mean accuracy per delta", "accuracy (0-5)"),
    ("mean_time", "time.svg", "Mean response time per delta", "seconds"),
    (
        "mean_confidence",
        "confidence.svg",
        "Mean confidence per delta",
        "confidence (0-10)",
    ),
)


def emit_delta_charts(rows: Sequence[dict], out_dir: str | Path) -> list[Path]:
    """Write accuracy/time/confidence line charts from aggregate rows."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for key, filename, title, y_label in _CHART_SPECS:
        series: dict[str, list[tuple[float, float]]] = {}
        for row in rows:
            label = f"{row['group']} n={row['size']}"
            series.setdefault(label, []).append((row["delta"], row[key]))
        svg = render_line_chart(
            series, title=title, x_label="delta", y_label=y_label, y_floor=0.0
        )
        path = out_dir / filename
        path.write_text(svg)
        written.append(path)
    return written
