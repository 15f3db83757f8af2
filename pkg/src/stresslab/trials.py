"""Trial scheduling, grading, and the training gate.

Schedules are deterministic functions of (corpus, session config). Training
runs the nine KSM deltas 0.40 down to 0.00 in that fixed order; the main
block covers every (graph, delta) cell exactly once in shuffled order. For
each trial the concrete KSM endpoints are drawn uniformly from the grid
pairs realizing the delta inside [0.4, 0.8], the drawing for each endpoint
comes from a uniformly chosen set, and left/right placement is a coin flip.
Zero-delta trials take two drawings of equal KSM from different sets so the
pair is never the identical image.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import CorpusView
from .errors import SchedulingError

MODES = ("trained-feedback", "untrained", "expert")
ANSWERS = ("left", "same", "right")
SIZES = (10, 25, 50)
TRAINING_DELTAS_CENTI = tuple(range(40, -5, -5))
MAIN_DELTAS_CENTI = tuple(range(0, 45, 5))
TRAINING_GATE_MINIMUM = 5

# independent seed streams so a standalone schedule matches the same block
# inside a chained expert session
_TRAIN_STREAM = 1
_MAIN_STREAM = 2


@dataclass(frozen=True)
class SessionConfig:
    mode: str
    participant_id: str
    seed: int
    size: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode != "expert":
            if self.size not in SIZES:
                raise ValueError(f"size must be one of {SIZES}, got {self.size!r}")
        if not self.participant_id:
            raise ValueError("participant_id must be non-empty")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def sizes(self) -> tuple[int, ...]:
        """Block sizes in presentation order; experts chain all three."""
        if self.mode == "expert":
            return SIZES
        return (self.size,)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "participant_id": self.participant_id,
            "seed": self.seed,
            "size": self.size,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SessionConfig":
        return cls(
            mode=obj["mode"],
            participant_id=obj["participant_id"],
            seed=int(obj["seed"]),
            size=obj.get("size"),
        )


@dataclass(frozen=True)
class DrawingRef:
    graph_id: str
    set_id: str
    target_centi: int
    ksm: float

    def to_json(self) -> dict:
        return {
            "graph_id": self.graph_id,
            "set_id": self.set_id,
            "target_centi": self.target_centi,
            "ksm": self.ksm,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DrawingRef":
        return cls(obj["graph_id"], obj["set_id"], int(obj["target_centi"]), obj["ksm"])


@dataclass(frozen=True)
class TrialPlan:
    trial_index: int
    kind: str  # "training" | "main"
    size: int
    graph_id: str
    left: DrawingRef
    right: DrawingRef
    delta_centi: int
    correct_answer: str
    feedback: bool

    @property
    def delta(self) -> float:
        return self.delta_centi / 100

    def to_json(self) -> dict:
        return {
            "trial_index": self.trial_index,
            "kind": self.kind,
            "size": self.size,
            "graph_id": self.graph_id,
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "delta_centi": self.delta_centi,
            "correct_answer": self.correct_answer,
            "feedback": self.feedback,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TrialPlan":
        return cls(
            trial_index=int(obj["trial_index"]),
            kind=obj["kind"],
            size=int(obj["size"]),
            graph_id=obj["graph_id"],
            left=DrawingRef.from_json(obj["left"]),
            right=DrawingRef.from_json(obj["right"]),
            delta_centi=int(obj["delta_centi"]),
            correct_answer=obj["correct_answer"],
            feedback=bool(obj["feedback"]),
        )


@dataclass(frozen=True)
class ResponseRecord:
    trial_index: int
    answer: str
    confident: bool
    response_time: float
    submitted_at: str = ""

    def __post_init__(self):
        if self.answer not in ANSWERS:
            raise ValueError(f"answer must be one of {ANSWERS}, got {self.answer!r}")
        if not (self.response_time > 0):
            raise ValueError("response_time must be positive")

    def to_json(self) -> dict:
        return {
            "trial_index": self.trial_index,
            "answer": self.answer,
            "confident": self.confident,
            "response_time": self.response_time,
            "submitted_at": self.submitted_at,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ResponseRecord":
        return cls(
            trial_index=int(obj["trial_index"]),
            answer=obj["answer"],
            confident=bool(obj["confident"]),
            response_time=float(obj["response_time"]),
            submitted_at=obj.get("submitted_at", ""),
        )


def _require_size(corpus: CorpusView, size: int) -> None:
    if not corpus.has_size(size):
        raise SchedulingError(f"corpus has no complete size-{size} stimulus set")


def _endpoints_for_delta(rng: np.random.Generator, corpus: CorpusView, delta: int):
    targets = corpus.targets_centi
    pairs = [(lo, lo + delta) for lo in targets if lo + delta <= max(targets)]
    if not pairs:
        raise SchedulingError(f"no target pair realizes delta {delta}")
    return pairs[int(rng.integers(len(pairs)))]


def _pick_refs(
    rng: np.random.Generator, corpus: CorpusView, gid: str, delta: int
) -> tuple[DrawingRef, DrawingRef]:
    """Two drawing refs realizing the delta; lower-target ref first."""
    lo, hi = _endpoints_for_delta(rng, corpus, delta)
    sets = corpus.set_ids
    if delta == 0:
        chosen = rng.choice(len(sets), size=2, replace=False)
        set_lo, set_hi = sets[int(chosen[0])], sets[int(chosen[1])]
    else:
        set_lo = sets[int(rng.integers(len(sets)))]
        set_hi = sets[int(rng.integers(len(sets)))]
    ref_lo = DrawingRef(gid, set_lo, lo, corpus.recorded_ksm(gid, set_lo, lo))
    ref_hi = DrawingRef(gid, set_hi, hi, corpus.recorded_ksm(gid, set_hi, hi))
    return ref_lo, ref_hi


def _as_trial(
    rng: np.random.Generator,
    index: int,
    kind: str,
    size: int,
    gid: str,
    delta: int,
    ref_lo: DrawingRef,
    ref_hi: DrawingRef,
    feedback: bool,
) -> TrialPlan:
    lo_on_left = bool(rng.integers(2))
    left, right = (ref_lo, ref_hi) if lo_on_left else (ref_hi, ref_lo)
    if delta == 0:
        correct = "same"
    else:
        # higher KSM means lower stress
        correct = "right" if lo_on_left else "left"
    return TrialPlan(
        trial_index=index,
        kind=kind,
        size=size,
        graph_id=gid,
        left=left,
        right=right,
        delta_centi=delta,
        correct_answer=correct,
        feedback=feedback,
    )


def schedule_training(config: SessionConfig, corpus: CorpusView) -> list[TrialPlan]:
    """Nine fixed-order trials, deltas 0.40 down to 0.00; empty for experts."""
    if config.mode == "expert":
        return []
    size = config.size
    _require_size(corpus, size)
    rng = np.random.default_rng(
        np.random.SeedSequence([config.seed, _TRAIN_STREAM, size])
    )
    gids = corpus.graph_ids(size)
    plans = []
    for index, delta in enumerate(TRAINING_DELTAS_CENTI):
        gid = gids[int(rng.integers(len(gids)))]
        ref_lo, ref_hi = _pick_refs(rng, corpus, gid, delta)
        plans.append(
            _as_trial(
                rng,
                index,
                "training",
                size,
                gid,
                delta,
                ref_lo,
                ref_hi,
                feedback=config.mode == "trained-feedback",
            )
        )
    return plans


def schedule_main(
    config: SessionConfig, corpus: CorpusView, size: int | None = None
) -> list[TrialPlan]:
    """One trial per (graph, delta) cell, shuffled: 5 x 9 = 45 plans.

    Pass size to select a block of an expert session; novice sessions use
    the config size. Trial indices start at 0 within the block.
    """
    block_size = size if size is not None else config.size
    if block_size not in SIZES:
        raise SchedulingError(f"no stimulus size {block_size!r}")
    _require_size(corpus, block_size)
    rng = np.random.default_rng(
        np.random.SeedSequence([config.seed, _MAIN_STREAM, block_size])
    )
    gids = corpus.graph_ids(block_size)
    cells = [(gid, delta) for gid in gids for delta in MAIN_DELTAS_CENTI]
    order = rng.permutation(len(cells))
    plans = []
    for index, cell_idx in enumerate(order):
        gid, delta = cells[int(cell_idx)]
        ref_lo, ref_hi = _pick_refs(rng, corpus, gid, delta)
        plans.append(
            _as_trial(
                rng, index, "main", block_size, gid, delta, ref_lo, ref_hi, False
            )
        )
    return plans


def schedule_session(config: SessionConfig, corpus: CorpusView) -> list[TrialPlan]:
    """Full session plan: training block then main block(s), re-indexed."""
    plans = list(schedule_training(config, corpus))
    for size in config.sizes:
        plans.extend(schedule_main(config, corpus, size))
    return [
        TrialPlan(
            trial_index=i,
            kind=p.kind,
            size=p.size,
            graph_id=p.graph_id,
            left=p.left,
            right=p.right,
            delta_centi=p.delta_centi,
            correct_answer=p.correct_answer,
            feedback=p.feedback,
        )
        for i, p in enumerate(plans)
    ]


def grade(plan: TrialPlan, response: ResponseRecord) -> bool:
    if plan.trial_index != response.trial_index:
        raise ValueError(
            f"response for trial {response.trial_index} graded against "
            f"plan {plan.trial_index}"
        )
    return response.answer == plan.correct_answer


def training_gate(graded: Sequence[bool]) -> bool:
    """Pass when at least 5 of the 9 training answers were correct."""
    if len(graded) != len(TRAINING_DELTAS_CENTI):
        raise ValueError(f"expected {len(TRAINING_DELTAS_CENTI)} graded training "
                         f"responses, got {len(graded)}")
    return sum(bool(g) for g in graded) >= TRAINING_GATE_MINIMUM
