"""Topic-driven screening dialogue over a pluggable chat-completion backend.

A session asks for the user's age, then works through the eight symptom
topics one question at a time.  User turns are interpreted into canonical
response options by the backend (temperature 0); questions and the care
recommendations come from generation prompts (temperature 1).  A FIFO history
of the last 10 interactions provides conversational context.

Backends: an OpenAI-style HTTP client configured from environment variables,
and a deterministic keyword-rule mock so every dialogue test runs offline.
"""

from __future__ import annotations

import itertools
import json
import os
import re
import uuid
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from .counterfactual import (
    PerturbationPolicy,
    counterfactual,
    eligible_for_explanation,
    explanation_rows,
    render_explanation,
)
from .encoding import encode_record
from .learners import OnlineClassifier
from .records import ResponseOption, ScreeningRecord, Topic, TOPIC_ORDER, make_record

HISTORY_LIMIT = 10
ELIGIBILITY_GATE = 0.80

TOPIC_LISTING = (
    "topic 1: baby bonding issues, topic 2: concentration and decision-making "
    "problems, topic 3: feeling sad or tearful, topic 4: feeling guilty, "
    "topic 5: irritability towards the baby or the partner, topic 6: "
    "overreacting or loss of appetite, topic 7: suicide behavior, topic 8: "
    "trouble sleeping"
)


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    text: str
    temperature: float


PROMPTS: dict[str, PromptTemplate] = {
    "interpretation": PromptTemplate(
        "interpretation",
        "Analyze the user's responses in the dialogue and return per topic one "
        "of the following options: NA, yes, sometimes, often, no, unwilling to "
        "disclose. Answer with one line per topic in the form 'topic <n>: "
        f"<option>'. {TOPIC_LISTING}.",
        temperature=0.0,
    ),
    "question_generation": PromptTemplate(
        "question_generation",
        "The following is a conversation with an AI assistant. The assistant "
        "is dynamic, never repeats the same thing twice, and is creative, "
        "intelligent, and kind. The assistant tries to establish a "
        "conversation, and it always asks a question when he finishes speaking "
        f"about one of these topics: {TOPIC_LISTING}. Return an utterance per "
        "topic.",
        temperature=1.0,
    ),
    "treatment": PromptTemplate(
        "treatment",
        "Propose three care treatments for a user with PPD taking into "
        "consideration its responses into the following dialogue.",
        temperature=1.0,
    ),
}

TOPIC_NUMBER = {topic: i + 1 for i, topic in enumerate(TOPIC_ORDER)}

AGE_QUESTION = "Before we start, could you tell me your age?"

#: Offline fallback question per topic, used when the backend fails.
FALLBACK_QUESTIONS: dict[Topic, str] = {
    Topic.BABY_BONDING: "How do you feel about the bond with your baby these days?",
    Topic.CONCENTRATION: "Have you had trouble concentrating or making decisions lately?",
    Topic.SADNESS: "Do you find yourself feeling sad or tearful?",
    Topic.GUILT: "Do feelings of guilt come up for you at the moment?",
    Topic.IRRITABILITY: "Do you notice irritability towards your baby or your partner?",
    Topic.APPETITE: "How has your appetite been? Any overreacting or loss of appetite?",
    Topic.SUICIDE: "Have you had any thoughts of harming yourself?",
    Topic.SLEEP: "How are you sleeping at night? Any trouble sleeping?",
}


class BackendError(RuntimeError):
    """The chat backend could not produce a completion."""


class ChatBackend:
    """Abstract chat-completion interface."""

    def complete(self, system: str, history: list[tuple[str, str]], temperature: float) -> str:
        raise NotImplementedError


class RemoteChatBackend(ChatBackend):
    """OpenAI-style chat-completions client.

    Configuration comes from the environment: ``PPD_CHAT_BASE_URL``,
    ``PPD_CHAT_MODEL`` and ``PPD_CHAT_API_KEY``.  One retry, short timeout.
    """

    def __init__(
        self,
        base_url: Optional[str] = None,
        model: Optional[str] = None,
        api_key: Optional[str] = None,
        timeout: float = 20.0,
    ):
        self.base_url = (base_url or os.environ.get("PPD_CHAT_BASE_URL", "")).rstrip("/")
        self.model = model or os.environ.get("PPD_CHAT_MODEL", "gpt-3.5-turbo")
        self.api_key = api_key or os.environ.get("PPD_CHAT_API_KEY", "")
        self.timeout = timeout
        if not self.base_url:
            raise BackendError("no chat backend configured (PPD_CHAT_BASE_URL unset)")

    def complete(self, system: str, history: list[tuple[str, str]], temperature: float) -> str:
        import requests

        messages = [{"role": "system", "content": system}]
        for speaker, text in history:
            role = "assistant" if speaker == "assistant" else "user"
            messages.append({"role": role, "content": text})
        payload = {"model": self.model, "messages": messages, "temperature": temperature}
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        last_error: Exception | None = None
        for _ in range(2):  # one retry
            try:
                response = requests.post(
                    f"{self.base_url}/chat/completions",
                    json=payload,
                    headers=headers,
                    timeout=self.timeout,
                )
                response.raise_for_status()
                return response.json()["choices"][0]["message"]["content"]
            except Exception as exc:  # noqa: BLE001 - normalized below
                last_error = exc
        raise BackendError(f"chat backend failed: {last_error}")


def _load_mock_rules() -> dict:
    with resources.files("ppdstream.data").joinpath("mock_rules.json").open() as fh:
        return json.load(fh)


class MockChatBackend(ChatBackend):
    """Deterministic rule-table backend for offline tests and demos.

    Interpretation scans the user's utterances for topic keywords and option
    keywords (rule table shipped as package data); question generation returns
    a canned question for the requested topic; the treatment prompt returns a
    fixed three-item list.
    """

    def __init__(self, fail: bool = False):
        self.fail = fail
        rules = _load_mock_rules()
        self.topic_keywords = {
            Topic.from_slug(slug): [k.lower() for k in kws]
            for slug, kws in rules["topic_keywords"].items()
        }
        self.option_keywords = [
            (ResponseOption.from_slug(entry["option"]), [k.lower() for k in entry["keywords"]])
            for entry in rules["option_keywords"]
        ]
        self.questions = {
            Topic.from_slug(slug): q for slug, q in rules["questions"].items()
        }
        self.treatments = rules["treatments"]

    def complete(self, system: str, history: list[tuple[str, str]], temperature: float) -> str:
        if self.fail:
            raise BackendError("mock backend configured to fail")
        if system.startswith("Analyze the user's responses"):
            return self._interpret(history)
        if "care treatments" in system:
            return "\n".join(f"{i + 1}. {t}" for i, t in enumerate(self.treatments))
        match = re.search(r"Next topic: (.+)$", system)
        if match:
            wanted = match.group(1).strip().lower()
            topic = next((t for t in Topic if t.display.lower() == wanted), None)
            if topic is None:
                raise BackendError(f"mock backend knows no topic {wanted!r}")
            return self.questions[topic]
        raise BackendError(f"mock backend cannot handle prompt: {system[:60]}...")

    @staticmethod
    def _matches(text: str, keywords: list[str]) -> bool:
        # multi-word keywords match as substrings, single words as token prefixes
        tokens = re.findall(r"[a-z']+", text)
        for keyword in keywords:
            if " " in keyword:
                if keyword in text:
                    return True
            elif any(t == keyword or t.startswith(keyword) for t in tokens):
                return True
        return False

    def _classify_option(self, utterance: str) -> Optional[ResponseOption]:
        text = utterance.lower()
        for option, keywords in self.option_keywords:
            if self._matches(text, keywords):
                return option
        return None

    def _interpret(self, history: list[tuple[str, str]]) -> str:
        found: dict[Topic, ResponseOption] = {}
        for speaker, utterance in history:
            if speaker != "user":
                continue
            text = utterance.lower()
            for topic, keywords in self.topic_keywords.items():
                if self._matches(text, keywords):
                    option = self._classify_option(text)
                    if option is not None:
                        found[topic] = option
        lines = []
        for topic in TOPIC_ORDER:
            option = found.get(topic, ResponseOption.NA)
            lines.append(f"topic {TOPIC_NUMBER[topic]}: {option.display}")
        return "\n".join(lines)


# --------------------------------------------------------------------------
# Session state machine
# --------------------------------------------------------------------------

COLLECTING = "collecting"
ASSESSING = "assessing"
DONE = "done"


class AllTopicsCovered:
    """Sentinel returned by next_question once every topic is interpreted."""

    def __repr__(self):
        return "AllTopicsCovered"


ALL_TOPICS_COVERED = AllTopicsCovered()


class IncompleteSessionError(RuntimeError):
    """Assessment requested before age or all topic interpretations exist."""


@dataclass
class DialogueSession:
    session_id: str = field(default_factory=lambda: uuid.uuid4().hex)
    pending_topics: list[Topic] = field(default_factory=lambda: list(TOPIC_ORDER))
    history: list[tuple[str, str]] = field(default_factory=list)
    interpretations: dict[Topic, ResponseOption] = field(default_factory=dict)
    age: Optional[int] = None
    state: str = COLLECTING
    flags: list[str] = field(default_factory=list)


def push_history(session: DialogueSession, interaction: tuple[str, str]) -> DialogueSession:
    """Append to the FIFO history, discarding the oldest past 10 entries."""
    session.history.append(interaction)
    if len(session.history) > HISTORY_LIMIT:
        del session.history[: len(session.history) - HISTORY_LIMIT]
    return session


def next_question(session: DialogueSession, backend: ChatBackend) -> str | AllTopicsCovered:
    """Question for the first pending topic, or the all-covered sentinel."""
    if session.state != COLLECTING:
        raise RuntimeError(f"next_question requires the collecting state, not {session.state}")
    if not session.pending_topics:
        session.state = ASSESSING
        return ALL_TOPICS_COVERED
    topic = session.pending_topics[0]
    template = PROMPTS["question_generation"]
    system = f"{template.text}\nNext topic: {topic.display}"
    try:
        question = backend.complete(system, list(session.history), template.temperature)
    except BackendError:
        question = FALLBACK_QUESTIONS[topic]
        session.flags.append(f"fallback_question:{topic.slug}")
    push_history(session, ("assistant", question))
    return question


_INTERPRETATION_LINE = re.compile(
    r"topic\s*(\d+)\s*[:\-]\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE
)


def parse_interpretation_reply(reply: str) -> dict[Topic, ResponseOption]:
    """Parse 'topic <n>: <option>' lines, tolerant of surrounding prose.

    Unparseable topics are simply absent from the result (treated as NA by
    the caller).
    """
    out: dict[Topic, ResponseOption] = {}
    number_to_topic = {n: t for t, n in TOPIC_NUMBER.items()}
    for match in _INTERPRETATION_LINE.finditer(reply):
        number = int(match.group(1))
        topic = number_to_topic.get(number)
        if topic is None:
            continue
        try:
            option = ResponseOption.from_slug(match.group(2))
        except ValueError:
            continue
        out[topic] = option
    return out


def interpret_responses(
    session: DialogueSession, backend: ChatBackend
) -> dict[Topic, ResponseOption]:
    """Run the interpretation prompt over the history and merge results.

    Non-NA interpretations win over NA; a topic leaves the pending list
    exactly when its interpretation becomes non-NA.
    """
    if not any(speaker == "user" for speaker, _ in session.history):
        raise RuntimeError("interpretation requires at least one user utterance")
    template = PROMPTS["interpretation"]
    try:
        reply = backend.complete(template.text, list(session.history), template.temperature)
        parsed = parse_interpretation_reply(reply)
    except BackendError:
        parsed = {}
        session.flags.append("interpretation_failed")
    result = {t: parsed.get(t, ResponseOption.NA) for t in TOPIC_ORDER}
    for topic, option in result.items():
        if option is not ResponseOption.NA:
            session.interpretations[topic] = option
    session.pending_topics = [
        t for t in TOPIC_ORDER
        if session.interpretations.get(t, ResponseOption.NA) is ResponseOption.NA
    ]
    return result


@dataclass(frozen=True)
class Assessment:
    prediction: bool
    probability: float  # probability of the predicted class
    explanation: Optional[str]
    rows: Optional[list]
    recommendations: Optional[list[str]]
    flags: tuple[str, ...] = ()


def assess(
    session: DialogueSession,
    learner: OnlineClassifier,
    transform,
    backend: ChatBackend,
    *,
    n_iterations: int = 100,
    policy: Optional[PerturbationPolicy] = None,
    rng: Optional[np.random.Generator] = None,
) -> Assessment:
    """Score the completed session and attach explanation + recommendations.

    ``transform`` is the frozen feature filter from the replay checkpoint
    (identity is acceptable for untrained setups).
    """
    if session.state not in (ASSESSING, COLLECTING):
        raise RuntimeError("session already assessed")
    if session.age is None:
        raise IncompleteSessionError("age unknown")
    missing = [t for t in TOPIC_ORDER if t not in session.interpretations]
    if missing:
        raise IncompleteSessionError(
            f"missing interpretations for: {[t.slug for t in missing]}"
        )

    record = make_record(session.age, session.interpretations)
    transform = transform or (lambda s: s)
    sample = transform(encode_record(record))
    proba = learner.predict_proba_one(sample)
    prediction = proba[True] > proba[False]
    probability = proba[prediction]
    flags: list[str] = []

    explanation = rows = None
    if eligible_for_explanation(proba, ELIGIBILITY_GATE):
        result = counterfactual(
            learner,
            record,
            prediction,
            n_iterations=n_iterations,
            policy=policy,
            rng=rng,
            transform=transform,
        )
        explanation = render_explanation(record, result, prediction, probability)
        rows = explanation_rows(record, result)

    recommendations = None
    if prediction:
        template = PROMPTS["treatment"]
        try:
            reply = backend.complete(template.text, list(session.history), template.temperature)
            recommendations = [
                re.sub(r"^\s*\d+[.)]\s*", "", line).strip()
                for line in reply.splitlines()
                if line.strip()
            ][:3]
        except BackendError:
            flags.append("treatment_failed")

    session.state = DONE
    return Assessment(
        prediction=prediction,
        probability=probability,
        explanation=explanation,
        rows=rows,
        recommendations=recommendations,
        flags=tuple(flags),
    )
