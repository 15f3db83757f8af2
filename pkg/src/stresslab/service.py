"""HTTP facade serving stimuli and trial plans, persisting responses.

One service instance hosts one study directory against one corpus. Every
session is an append-only JSONL file: header (config + full plan), then
responses, then the questionnaire. Records are fsynced before any reply, so
a crash mid-request loses at most an unacknowledged line, and replaying the
log reconstructs the session exactly.

Drawings are exposed only through opaque content refs, and no payload sent
before a session finishes carries KSM values, deltas, or upcoming answers.
The single exception, required by the trained-feedback design, is the
feedback block echoing the correct answer of the training trial that was
just answered.
"""
from __future__ import annotations

import hashlib
import io
import json
import os
import secrets
import tarfile
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Response

from .corpus import CorpusView
from .svg import render_svg
from .trials import (
    ANSWERS,
    MODES,
    ResponseRecord,
    SessionConfig,
    SIZES,
    TrialPlan,
    grade,
    schedule_session,
    training_gate,
)

CONFIDENCE_OPTIONS = (
    "Very confident",
    "Somewhat confident",
    "Not very confident",
    "Not confident at all",
)
DIFFICULTY_OPTIONS = ("Very difficult", "Difficult", "Easy", "Very Easy")
FAMILIARITY_OPTIONS = (
    "Very familiar",
    "Somewhat familiar",
    "Not very familiar",
    "They are new to me",
)
AGE_OPTIONS = ("18-25", "26-35", "36-45", "46-55", "56-65", "66-75", "76+")

QUESTIONNAIRE_FIELDS = (
    {"name": "strategy", "prompt": "What was your overall strategy for deciding "
     "which drawing had lower stress?", "type": "text"},
    {"name": "overall_confidence", "prompt": "Overall, how confident are you in "
     "your responses?", "type": "choice", "options": list(CONFIDENCE_OPTIONS)},
    {"name": "difficulty", "prompt": "How difficult did you find the experiment?",
     "type": "choice", "options": list(DIFFICULTY_OPTIONS)},
    {"name": "familiarity", "prompt": "How familiar are you with network "
     "diagrams?", "type": "choice", "options": list(FAMILIARITY_OPTIONS)},
    {"name": "age_range", "prompt": "What is your age range?", "type": "choice",
     "options": list(AGE_OPTIONS)},
    {"name": "gender", "prompt": "What is your gender?", "type": "text"},
)

_CHOICE_FIELDS = {
    "overall_confidence": CONFIDENCE_OPTIONS,
    "difficulty": DIFFICULTY_OPTIONS,
    "familiarity": FAMILIARITY_OPTIONS,
    "age_range": AGE_OPTIONS,
}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class SessionState:
    session_id: str
    config: SessionConfig
    plans: list[TrialPlan]
    log_path: Path
    cursor: int = 0
    status: str = "in-training"
    questionnaire_done: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def training_count(self) -> int:
        return sum(1 for p in self.plans if p.kind == "training")

    def derive_status(self, responses: list[ResponseRecord]) -> None:
        """Recompute cursor and status from durable records."""
        self.cursor = len(responses)
        n_train = self.training_count
        if self.questionnaire_done:
            self.status = "complete"
            return
        if (
            self.config.mode == "trained-feedback"
            and self.cursor >= n_train
            and not self._gate_passed(responses[:n_train])
        ):
            self.status = "failed-gate"
            return
        if self.cursor >= len(self.plans):
            self.status = "questionnaire"
        elif self.cursor >= n_train:
            self.status = "in-main"
        else:
            self.status = "in-training"

    def _gate_passed(self, training_responses: list[ResponseRecord]) -> bool:
        graded = [
            grade(self.plans[i], r) for i, r in enumerate(training_responses)
        ]
        return training_gate(graded)

    def gate_summary(self, responses: list[ResponseRecord]) -> dict:
        n_train = self.training_count
        graded = [grade(self.plans[i], r) for i, r in enumerate(responses[:n_train])]
        return {
            "passed": training_gate(graded),
            "correct": sum(graded),
            "total": n_train,
        }


class StudyStore:
    """Session registry over one study directory, with crash-safe replay."""

    def __init__(self, study_dir: str | Path, corpus: CorpusView):
        self.study_dir = Path(study_dir)
        self.study_dir.mkdir(parents=True, exist_ok=True)
        self.study_id = self.study_dir.name
        self.corpus = corpus
        self._lock = threading.Lock()
        self._sessions: dict[str, SessionState] = {}
        self._participants: set[str] = set()
        self._responses: dict[str, list[ResponseRecord]] = {}
        secret_file = self.study_dir / "secret"
        if not secret_file.exists():
            secret_file.write_text(secrets.token_hex(16))
        self._secret = secret_file.read_text().strip()
        self._refs = self._build_refs()
        for path in sorted(self.study_dir.glob("*.jsonl")):
            self._load_session(path)

    # -- drawing refs -------------------------------------------------------

    def _ref(self, drawing_key: str) -> str:
        digest = hashlib.sha1((self._secret + drawing_key).encode()).hexdigest()
        return digest[:16]

    def _build_refs(self) -> dict[str, str]:
        refs = {}
        for key in self.corpus.all_drawing_keys():
            refs[self._ref(key)] = key
        return refs

    def svg_for_ref(self, ref: str) -> str | None:
        key = self._refs.get(ref)
        if key is None:
            return None
        gid, set_id, label = key.split("/")
        drawing = self.corpus.drawing(gid, set_id, round(float(label) * 100))
        return render_svg(drawing)

    def ref_for_plan_side(self, plan: TrialPlan, side: str) -> str:
        ref = plan.left if side == "left" else plan.right
        key = f"{ref.graph_id}/{ref.set_id}/{ref.target_centi / 100:.2f}"
        return self._ref(key)

    # -- session lifecycle --------------------------------------------------

    def _load_session(self, path: Path) -> None:
        from .analysis import read_session_log

        log = read_session_log(path)
        state = SessionState(
            session_id=log.session_id,
            config=log.config,
            plans=log.plans,
            log_path=path,
            questionnaire_done=log.questionnaire is not None,
        )
        state.derive_status(log.responses)
        self._sessions[log.session_id] = state
        self._responses[log.session_id] = list(log.responses)
        self._participants.add(log.config.participant_id)

    def create_session(self, config: SessionConfig) -> SessionState:
        for size in config.sizes:
            if not self.corpus.has_size(size):
                raise HTTPException(
                    status_code=404,
                    detail=f"corpus has no complete size-{size} stimulus set",
                )
        with self._lock:
            if config.participant_id in self._participants:
                raise HTTPException(
                    status_code=409,
                    detail=f"participant {config.participant_id!r} already has a "
                    "session in this study",
                )
            session_id = uuid.uuid4().hex
            plans = schedule_session(config, self.corpus)
            path = self.study_dir / f"{session_id}.jsonl"
            state = SessionState(
                session_id=session_id,
                config=config,
                plans=plans,
                log_path=path,
            )
            header = {
                "v": 1,
                "kind": "header",
                "session_id": session_id,
                "config": config.to_json(),
                "plans": [p.to_json() for p in plans],
                "created_at": _now(),
            }
            self._append_line(path, header)
            state.derive_status([])
            self._sessions[session_id] = state
            self._responses[session_id] = []
            self._participants.add(config.participant_id)
            return state

    def get(self, session_id: str) -> SessionState:
        state = self._sessions.get(session_id)
        if state is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return state

    def responses(self, session_id: str) -> list[ResponseRecord]:
        return self._responses[session_id]

    def _append_line(self, path: Path, obj: dict) -> None:
        line = json.dumps(obj, sort_keys=True) + "\n"
        with open(path, "a") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())

    def append_response(self, state: SessionState, record: ResponseRecord) -> None:
        self._append_line(state.log_path, {"v": 1, "kind": "response", **record.to_json()})
        self._responses[state.session_id].append(record)
        state.derive_status(self._responses[state.session_id])

    def append_questionnaire(self, state: SessionState, answers: dict) -> None:
        self._append_line(
            state.log_path,
            {"v": 1, "kind": "questionnaire", "submitted_at": _now(), **answers},
        )
        state.questionnaire_done = True
        state.derive_status(self._responses[state.session_id])

    def export_tar(self) -> bytes:
        return build_study_tar(self.study_dir)


def build_study_tar(study_dir: str | Path) -> bytes:
    """Deterministic tar of every session log plus a study manifest."""
    study_dir = Path(study_dir)
    sessions = []
    for path in sorted(study_dir.glob("*.jsonl")):
        header = json.loads(path.read_text().splitlines()[0])
        sessions.append(
            {
                "session_id": header["session_id"],
                "participant_id": header["config"]["participant_id"],
                "mode": header["config"]["mode"],
                "size": header["config"]["size"],
                "file": path.name,
            }
        )
    manifest = {
        "v": 1,
        "study_id": study_dir.name,
        "sessions": sorted(sessions, key=lambda s: s["session_id"]),
    }
    buf = io.BytesIO()

    def _add(tar: tarfile.TarFile, name: str, data: bytes) -> None:
        info = tarfile.TarInfo(name=name)
        info.size = len(data)
        info.mtime = 0
        info.uid = info.gid = 0
        info.uname = info.gname = ""
        info.mode = 0o644
        tar.addfile(info, io.BytesIO(data))

    with tarfile.open(fileobj=buf, mode="w") as tar:
        _add(tar, "manifest.json", (json.dumps(manifest, sort_keys=True, indent=1) + "\n").encode())
        for entry in manifest["sessions"]:
            data = (study_dir / entry["file"]).read_bytes()
            _add(tar, entry["file"], data)
    return buf.getvalue()


def create_app(corpus_dir: str | Path, study_dir: str | Path) -> FastAPI:
    corpus = CorpusView(corpus_dir)
    store = StudyStore(study_dir, corpus)
    app = FastAPI(title="stress perception study service")
    app.state.store = store

    def trial_payload(state: SessionState) -> dict:
        plan = state.plans[state.cursor]
        return {
            "v": 1,
            "kind": "trial",
            "trial_index": plan.trial_index,
            "trial_kind": plan.kind,
            "number": state.cursor + 1,
            "total": len(state.plans),
            "size": plan.size,
            "left_svg": f"/drawings/{store.ref_for_plan_side(plan, 'left')}.svg",
            "right_svg": f"/drawings/{store.ref_for_plan_side(plan, 'right')}.svg",
            "options": list(ANSWERS),
        }

    def questionnaire_payload() -> dict:
        return {
            "v": 1,
            "kind": "questionnaire",
            "fields": [dict(f) for f in QUESTIONNAIRE_FIELDS],
        }

    def completion_payload(state: SessionState) -> dict:
        return {
            "v": 1,
            "kind": "complete",
            "session_id": state.session_id,
            "trials_answered": state.cursor,
        }

    def gate_payload(state: SessionState) -> dict:
        return {
            "v": 1,
            "kind": "gate",
            **state.gate_summary(store.responses(state.session_id)),
        }

    def current_payload(state: SessionState) -> dict:
        body = {"v": 1, "session_id": state.session_id, "status": state.status}
        if state.status in ("in-training", "in-main"):
            body["trial"] = trial_payload(state)
        elif state.status == "questionnaire":
            body["questionnaire"] = questionnaire_payload()
        elif state.status == "failed-gate":
            body["gate"] = gate_payload(state)
        else:
            body["summary"] = completion_payload(state)
        return body

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        if payload.get("v") != 1:
            raise HTTPException(status_code=400, detail="missing or unsupported v")
        mode = payload.get("mode")
        if mode not in MODES:
            raise HTTPException(status_code=400, detail=f"mode must be one of {MODES}")
        size = payload.get("size")
        if mode != "expert" and size not in SIZES:
            raise HTTPException(status_code=400, detail=f"size must be one of {SIZES}")
        participant = payload.get("participant_id")
        if not isinstance(participant, str) or not participant:
            raise HTTPException(status_code=400, detail="participant_id required")
        seed = payload.get("seed")
        if seed is None:
            seed = secrets.randbits(31)
        if not isinstance(seed, int) or seed < 0:
            raise HTTPException(status_code=400, detail="seed must be a non-negative integer")
        config = SessionConfig(
            mode=mode,
            participant_id=participant,
            seed=seed,
            size=None if mode == "expert" else size,
        )
        state = store.create_session(config)
        return current_payload(state)

    @app.get("/sessions/{session_id}/current")
    def current(session_id: str):
        return current_payload(store.get(session_id))

    @app.post("/sessions/{session_id}/responses")
    def submit_response(session_id: str, payload: dict = Body(...)):
        state = store.get(session_id)
        with state.lock:
            if state.status in ("failed-gate", "complete"):
                raise HTTPException(status_code=410, detail=f"session is {state.status}")
            if state.status == "questionnaire":
                raise HTTPException(
                    status_code=409, detail="trials finished; questionnaire expected"
                )
            if payload.get("v") != 1:
                raise HTTPException(status_code=400, detail="missing or unsupported v")
            try:
                record = ResponseRecord(
                    trial_index=int(payload["trial_index"]),
                    answer=payload["answer"],
                    confident=bool(payload["confident"]),
                    response_time=float(payload["response_time"]),
                    submitted_at=_now(),
                )
            except (KeyError, TypeError, ValueError) as err:
                raise HTTPException(status_code=400, detail=f"bad response record: {err}")
            plan = state.plans[state.cursor]
            if record.trial_index != plan.trial_index:
                raise HTTPException(
                    status_code=409,
                    detail=f"expected trial {plan.trial_index}, got {record.trial_index}",
                )
            store.append_response(state, record)
            reply = {"v": 1, "accepted": record.trial_index, "status": state.status}
            if plan.kind == "training" and plan.feedback:
                reply["feedback"] = {
                    "correct": grade(plan, record),
                    "correct_answer": plan.correct_answer,
                }
            finished_training = (
                plan.kind == "training"
                and state.cursor == state.training_count
                and state.config.mode == "trained-feedback"
            )
            if finished_training:
                reply["gate"] = gate_payload(state)
            if state.status in ("in-training", "in-main"):
                reply["next"] = trial_payload(state)
            elif state.status == "questionnaire":
                reply["next"] = questionnaire_payload()
            return reply

    @app.post("/sessions/{session_id}/questionnaire")
    def submit_questionnaire(session_id: str, payload: dict = Body(...)):
        state = store.get(session_id)
        with state.lock:
            if state.status == "complete":
                return completion_payload(state)  # idempotent re-submit
            if state.status != "questionnaire":
                raise HTTPException(
                    status_code=409, detail=f"session is {state.status}"
                )
            if payload.get("v") != 1:
                raise HTTPException(status_code=400, detail="missing or unsupported v")
            answers = {}
            for spec_field in QUESTIONNAIRE_FIELDS:
                name = spec_field["name"]
                value = payload.get(name)
                if not isinstance(value, str) or not value.strip():
                    raise HTTPException(status_code=400, detail=f"missing field {name}")
                allowed = _CHOICE_FIELDS.get(name)
                if allowed and value not in allowed:
                    raise HTTPException(
                        status_code=400,
                        detail=f"{name} must be one of {list(allowed)}",
                    )
                answers[name] = value
            store.append_questionnaire(state, answers)
            return completion_payload(state)

    @app.get("/drawings/{ref}.svg")
    def drawing_svg(ref: str):
        svg = store.svg_for_ref(ref)
        if svg is None:
            raise HTTPException(status_code=404, detail="unknown drawing ref")
        return Response(content=svg, media_type="image/svg+xml")

    @app.get("/studies/{study_id}/export")
    def export_study(study_id: str):
        if study_id != store.study_id:
            raise HTTPException(status_code=404, detail="unknown study")
        return Response(content=store.export_tar(), media_type="application/x-tar")

    return app
