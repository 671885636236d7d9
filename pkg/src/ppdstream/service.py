"""Session service: the screening conversation behind a thin HTTP layer.

``ScreeningService`` is plain Python (fully testable without HTTP);
``create_app`` wraps it in a FastAPI adapter returning JSON bodies.  Every
behavior reachable over HTTP is reachable through the service object.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from pydantic import BaseModel

from .checkpoint import Checkpoint
from .counterfactual import ExplanationRow
from .dialogue import (
    ALL_TOPICS_COVERED,
    AGE_QUESTION,
    Assessment,
    ChatBackend,
    DialogueSession,
    DONE,
    assess,
    interpret_responses,
    next_question,
    push_history,
)

GREETING = (
    "Hi! I'm here to talk about how things have been going for you since the "
    "birth of your baby."
)


class ServiceError(RuntimeError):
    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


@dataclass
class ApiMessage:
    role: str  # "user" | "assistant" | "system-note"
    text: str
    assessment: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {"role": self.role, "text": self.text}
        if self.assessment is not None:
            out["assessment"] = self.assessment
        return out


def _assessment_payload(assessment: Assessment) -> dict:
    rows = [
        asdict(r) if isinstance(r, ExplanationRow) else r
        for r in (assessment.rows or [])
    ]
    return {
        "prediction": assessment.prediction,
        "probability": assessment.probability,
        "explanation": assessment.explanation,
        "rows": rows,
        "recommendations": assessment.recommendations,
        "flags": list(assessment.flags),
    }


@dataclass
class ScreeningService:
    checkpoint: Optional[Checkpoint]
    backend: ChatBackend
    n_iterations: int = 100
    seed: Optional[int] = 7
    sessions: dict[str, DialogueSession] = field(default_factory=dict)

    def create_session(self) -> tuple[str, list[ApiMessage]]:
        if self.checkpoint is None:
            raise ServiceError("no model checkpoint configured", status=503)
        session = DialogueSession()
        self.sessions[session.session_id] = session
        push_history(session, ("assistant", AGE_QUESTION))
        return session.session_id, [
            ApiMessage("assistant", GREETING),
            ApiMessage("assistant", AGE_QUESTION),
        ]

    def post_message(self, session_id: str, text: str) -> list[ApiMessage]:
        session = self.sessions.get(session_id)
        if session is None:
            raise ServiceError(f"unknown session {session_id!r}", status=404)
        if session.state == DONE:
            raise ServiceError("session already completed", status=409)
        text = (text or "").strip()
        if not text:
            return [ApiMessage("system-note", "Please type a reply so we can continue.")]

        if session.age is None:
            match = re.search(r"\d+", text)
            if match is None:
                return [ApiMessage("assistant", "Sorry, I need your age as a number. " + AGE_QUESTION)]
            session.age = int(match.group())
            push_history(session, ("user", text))
            question = next_question(session, self.backend)
            return [ApiMessage("assistant", question)]

        push_history(session, ("user", text))
        interpret_responses(session, self.backend)
        question = next_question(session, self.backend)
        if question is not ALL_TOPICS_COVERED:
            return [ApiMessage("assistant", question)]

        assessment = assess(
            session,
            self.checkpoint.learner,
            self.checkpoint.transform,
            self.backend,
            n_iterations=self.n_iterations,
            rng=np.random.default_rng(self.seed),
        )
        label = "detected" if assessment.prediction else "not detected"
        messages = [
            ApiMessage(
                "assistant",
                f"Thank you for sharing all of that with me. Based on our "
                f"conversation, signs of postpartum depression are {label} "
                f"({100 * assessment.probability:.2f}% confidence).",
                assessment=_assessment_payload(assessment),
            )
        ]
        if assessment.explanation:
            messages.append(ApiMessage("system-note", assessment.explanation))
        if assessment.recommendations:
            recs = "\n".join(f"{i + 1}. {r}" for i, r in enumerate(assessment.recommendations))
            messages.append(ApiMessage("assistant", "A few things that may help:\n" + recs))
        return messages


class MessageIn(BaseModel):
    text: str


def create_app(service: ScreeningService):
    """FastAPI adapter around a ScreeningService."""
    from fastapi import FastAPI, HTTPException
    from fastapi.middleware.cors import CORSMiddleware

    app = FastAPI(title="ppdstream screening service")
    app.state.service = service
    # The bundled web client may be served from a different origin.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["POST"],
        allow_headers=["Content-Type"],
    )

    @app.post("/sessions")
    def create_session():
        try:
            session_id, messages = service.create_session()
        except ServiceError as exc:
            raise HTTPException(status_code=exc.status, detail=str(exc))
        return {"session_id": session_id, "messages": [m.to_dict() for m in messages]}

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageIn):
        try:
            messages = service.post_message(session_id, body.text)
        except ServiceError as exc:
            raise HTTPException(status_code=exc.status, detail=str(exc))
        return {"messages": [m.to_dict() for m in messages]}

    return app
