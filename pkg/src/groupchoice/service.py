"""HTTP service backing the human-baseline prediction study.

A participant opens a session, sees each group's member-by-option rating
table with anonymized option labels (D1..Dn), predicts the group's choice,
and finally gets an accuracy summary against reference lines. Predictions are
persisted to an append-only newline-delimited JSON event log so a session can
be replayed or resumed after a restart.
"""
from __future__ import annotations

import json
import math
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .dataset import Dataset

HUMAN_PAPER_MEAN_ACCURACY = 0.37


@dataclass
class StudySession:
    session_id: str
    tasks: list[str]
    created_at: float
    predictions: dict[str, int] = field(default_factory=dict)
    last_event_at: float | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


class PredictionBody(BaseModel):
    group_id: str
    option_index: int


@dataclass
class ReferenceAccuracies:
    lcp_ave: float | None = None
    pacp_ave: float | None = None

    @classmethod
    def from_report_json(cls, path) -> "ReferenceAccuracies":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        values = {}
        for v in payload.get("variants", []):
            name = v["model"] + "-" + v["strategy"]
            if v.get("augmentation", "none") != "none":
                continue
            if name in ("LCP-AVE", "PACP-AVE"):
                values[name] = float(v["mean_accuracy"])
        return cls(lcp_ave=values.get("LCP-AVE"), pacp_ave=values.get("PACP-AVE"))


class StudyServer:
    """Session registry plus append-only persistence; wraps one dataset."""

    def __init__(
        self,
        dataset: Dataset,
        reference: ReferenceAccuracies | None = None,
        session_log: str | Path | None = None,
        seed: int = 0,
    ):
        self.dataset = dataset
        self.reference = reference or ReferenceAccuracies()
        self.session_log = Path(session_log) if session_log else None
        self.seed = seed
        self.sessions: dict[str, StudySession] = {}
        self._registry_lock = threading.Lock()
        self._session_counter = 0
        if self.session_log and self.session_log.exists():
            self._replay_log()

    def _append_event(self, event: dict) -> None:
        if self.session_log is None:
            return
        with open(self.session_log, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event) + "\n")

    def _replay_log(self) -> None:
        with open(self.session_log, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                if event["event"] == "session_started":
                    self.sessions[event["session_id"]] = StudySession(
                        session_id=event["session_id"],
                        tasks=list(event["tasks"]),
                        created_at=float(event["at"]),
                    )
                elif event["event"] == "prediction":
                    session = self.sessions.get(event["session_id"])
                    if session is None:
                        continue
                    session.predictions[event["group_id"]] = int(event["option_index"])
                    session.last_event_at = float(event["at"])

    def start_session(self) -> StudySession:
        with self._registry_lock:
            self._session_counter += 1
            counter = self._session_counter
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, counter]))
        tasks = [g.group_id for g in self.dataset.groups]
        rng.shuffle(tasks)
        session = StudySession(str(uuid.uuid4()), tasks, created_at=time.time())
        with self._registry_lock:
            self.sessions[session.session_id] = session
        self._append_event(
            {
                "event": "session_started",
                "session_id": session.session_id,
                "tasks": session.tasks,
                "at": session.created_at,
            }
        )
        return session

    def session(self, session_id: str) -> StudySession:
        session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def record_prediction(self, session_id: str, group_id: str, option_index: int) -> None:
        session = self.session(session_id)
        if group_id not in set(session.tasks):
            raise HTTPException(status_code=400, detail=f"unknown group {group_id!r}")
        if not 0 <= option_index < self.dataset.n_options:
            raise HTTPException(status_code=400, detail="option index out of range")
        with session.lock:
            if group_id in session.predictions:
                raise HTTPException(
                    status_code=409, detail=f"group {group_id!r} already answered"
                )
            session.predictions[group_id] = option_index
            session.last_event_at = time.time()
            self._append_event(
                {
                    "event": "prediction",
                    "session_id": session_id,
                    "group_id": group_id,
                    "option_index": option_index,
                    "at": session.last_event_at,
                }
            )

    def summary(self, session_id: str) -> dict:
        session = self.session(session_id)
        answered = len(session.predictions)
        correct = sum(
            int(self.dataset.choice(gid) == option)
            for gid, option in session.predictions.items()
        )
        end = session.last_event_at if answered == len(session.tasks) else None
        elapsed = (end if end is not None else time.time()) - session.created_at
        return {
            "answered": answered,
            "correct": correct,
            "accuracy": correct / answered if answered else 0.0,
            "elapsed_seconds": elapsed,
            "reference": {
                "lcp_ave": self.reference.lcp_ave,
                "pacp_ave": self.reference.pacp_ave,
                "human_paper_mean": HUMAN_PAPER_MEAN_ACCURACY,
            },
        }


def session_accuracies_from_log(log_path) -> dict[str, tuple[int, int]]:
    """Recompute (answered, correct) per session from the event log alone.

    Correctness needs the dataset, so this returns the raw predictions and the
    caller scores them; see ``score_log`` for the scored version.
    """
    sessions: dict[str, dict[str, int]] = {}
    with open(log_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            event = json.loads(line)
            if event["event"] == "session_started":
                sessions.setdefault(event["session_id"], {})
            elif event["event"] == "prediction":
                sessions.setdefault(event["session_id"], {})[event["group_id"]] = int(
                    event["option_index"]
                )
    return sessions


def score_log(log_path, dataset: Dataset) -> dict[str, float]:
    """Per-session accuracy recomputed from the append-only log."""
    out = {}
    for session_id, predictions in session_accuracies_from_log(log_path).items():
        if not predictions:
            out[session_id] = 0.0
            continue
        correct = sum(
            int(dataset.choice(gid) == option) for gid, option in predictions.items()
        )
        out[session_id] = correct / len(predictions)
    return out


def create_app(
    dataset: Dataset,
    reference: ReferenceAccuracies | None = None,
    session_log: str | Path | None = None,
    seed: int = 0,
    static_dir: str | Path | None = None,
) -> FastAPI:
    """Build the study API; ``dataset`` must hold the raw (unsquared) ratings
    shown to participants."""
    server = StudyServer(dataset, reference, session_log, seed)
    app = FastAPI(title="group choice prediction study")
    app.state.server = server

    @app.post("/api/sessions", status_code=201)
    def create_session():
        session = server.start_session()
        return {"session_id": session.session_id, "tasks": list(session.tasks)}

    @app.get("/api/groups/{group_id}")
    def group_ratings(group_id: str):
        try:
            group = dataset.group(group_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown group {group_id!r}")
        members = []
        for i, user in enumerate(group.members):
            row = dataset.ratings.values[user]
            members.append(
                {
                    "label": f"Member {i + 1}",
                    "ratings": [None if math.isnan(r) else float(r) for r in row],
                }
            )
        options = [f"D{j + 1}" for j in range(dataset.n_options)]
        return {"members": members, "options": options}

    @app.post("/api/sessions/{session_id}/predictions", status_code=201)
    def submit_prediction(session_id: str, body: PredictionBody):
        server.record_prediction(session_id, body.group_id, body.option_index)
        return JSONResponse(
            status_code=201,
            content={"group_id": body.group_id, "option_index": body.option_index},
        )

    @app.get("/api/sessions/{session_id}/summary")
    def session_summary(session_id: str):
        return server.summary(session_id)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app


def serve(
    dataset: Dataset,
    reference: ReferenceAccuracies | None = None,
    port: int = 8000,
    session_log: str | Path | None = None,
    seed: int = 0,
    static_dir: str | Path | None = None,
) -> None:
    """Run the study service until interrupted."""
    import uvicorn

    app = create_app(dataset, reference, session_log, seed, static_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="info")
