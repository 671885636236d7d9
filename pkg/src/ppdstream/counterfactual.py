"""Counterfactual explanations: minimal feature changes that flip a prediction.

The search resamples every topic (and the age bucket, restricted to adjacent
buckets) for a fixed number of iterations, keeping the perturbed sample with
the fewest changed features among those that flip the model's prediction with
probability above one half.  Perturbation pools point toward the opposite
class so candidates do not contradict the model's logic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .encoding import EncodedSample, encode_record
from .learners import OnlineClassifier
from .records import AgeBucket, ResponseOption, ScreeningRecord, Topic, TOPIC_ORDER


@dataclass(frozen=True)
class PerturbationPolicy:
    """Candidate response options used when resampling, per predicted label.

    When the model currently predicts presence, symptom answers are resampled
    toward absence, and vice versa.
    """

    toward_absence: tuple[ResponseOption, ...] = (
        ResponseOption.NO,
        ResponseOption.SOMETIMES,
    )
    toward_presence: tuple[ResponseOption, ...] = (
        ResponseOption.YES,
        ResponseOption.OFTEN,
        ResponseOption.SOMETIMES,
    )
    perturb_age: bool = True

    def __post_init__(self):
        if not self.toward_absence or not self.toward_presence:
            raise ValueError("perturbation pools must be non-empty")

    def pool(self, predicted: bool) -> tuple[ResponseOption, ...]:
        return self.toward_absence if predicted else self.toward_presence


@dataclass(frozen=True)
class CounterfactualResult:
    """Smallest change set found, with the flipped-class probability."""

    relevant_features: frozenset[str]
    flipped_probability: float
    changes: Mapping[str, tuple[str, str]]  # group slug -> (old, new) display
    x_final: ScreeningRecord
    iterations_used: int


class NotFound:
    """Sentinel: no perturbation flipped the prediction within the budget."""

    def __repr__(self):
        return "NotFound"


NOT_FOUND = NotFound()

#: Signature of the sample transform applied before the model (typically the
#: frozen variance-threshold filter); identity when None.
Transform = Callable[[EncodedSample], EncodedSample]


def eligible_for_explanation(distribution: Mapping[bool, float], gate: float = 0.80) -> bool:
    """True iff the winning class probability strictly exceeds the gate."""
    return max(distribution.values()) > gate


def _record_diff(a: ScreeningRecord, b: ScreeningRecord) -> dict[str, tuple[str, str]]:
    changes: dict[str, tuple[str, str]] = {}
    for topic in TOPIC_ORDER:
        old, new = a.responses[topic], b.responses[topic]
        if old is not new:
            changes[topic.slug] = (old.display, new.display)
    if a.age_bucket is not b.age_bucket:
        changes["age"] = (a.age_bucket.display, b.age_bucket.display)
    return changes


def counterfactual(
    model: OnlineClassifier,
    x: ScreeningRecord,
    predicted: bool,
    n_iterations: int = 100,
    policy: Optional[PerturbationPolicy] = None,
    rng: Optional[np.random.Generator] = None,
    transform: Optional[Transform] = None,
) -> CounterfactualResult | NotFound:
    """Randomized minimal-change search over topic/age perturbations."""
    if n_iterations < 1:
        raise ValueError("n_iterations must be >= 1")
    policy = policy or PerturbationPolicy()
    rng = rng if rng is not None else np.random.default_rng()
    transform = transform or (lambda s: s)

    pool = policy.pool(predicted)
    age_pool = (x.age_bucket,) + (x.age_bucket.adjacent() if policy.perturb_age else ())

    best: Optional[tuple[dict, float, ScreeningRecord, int]] = None
    for iteration in range(1, n_iterations + 1):
        responses = {
            topic: pool[rng.integers(len(pool))] for topic in TOPIC_ORDER
        }
        bucket = age_pool[rng.integers(len(age_pool))]
        candidate = ScreeningRecord(
            age_bucket=bucket, responses=responses, label=x.label
        )
        sample = transform(encode_record(candidate))
        proba = model.predict_proba_one(sample)
        pred_new = proba[True] > proba[False]
        if pred_new == predicted or proba[pred_new] <= 0.5:
            continue
        changes = _record_diff(x, candidate)
        if best is None or len(changes) < len(best[0]):
            best = (changes, proba[pred_new], candidate, iteration)

    if best is None:
        return NOT_FOUND
    changes, proba_final, x_final, iteration = best
    return CounterfactualResult(
        relevant_features=frozenset(changes),
        flipped_probability=proba_final,
        changes=changes,
        x_final=x_final,
        iterations_used=iteration,
    )


@dataclass(frozen=True)
class ExplanationRow:
    """Structured rendering item for the UI."""

    group: str  # topic slug or "age"
    title: str
    old: str
    new: Optional[str]
    relevant: bool


def explanation_rows(
    x: ScreeningRecord, result: CounterfactualResult | NotFound
) -> list[ExplanationRow]:
    changes: Mapping[str, tuple[str, str]] = (
        result.changes if isinstance(result, CounterfactualResult) else {}
    )
    rows = []
    old_age, new_age = changes.get("age", (x.age_bucket.display, None))
    rows.append(ExplanationRow("age", "Age", old_age, new_age, "age" in changes))
    for topic in TOPIC_ORDER:
        old, new = changes.get(topic.slug, (x.responses[topic].display, None))
        rows.append(
            ExplanationRow(topic.slug, topic.display, old, new, topic.slug in changes)
        )
    return rows


def render_explanation(
    x: ScreeningRecord,
    result: CounterfactualResult | NotFound,
    predicted: bool,
    probability: float,
) -> str:
    """Plain-text explanation block inserted into the conversation.

    Changed (relevant) lines carry the ``old -> new`` transition and are
    emphasized with ``**``; unchanged lines list the original value only.
    """
    head = "Presence" if predicted else "Absence"
    lines = [f"{head} of PPD ({100 * probability:.2f}%)", ""]
    for row in explanation_rows(x, result):
        if row.relevant and row.new is not None:
            lines.append(f"**{row.title}: {row.old} -> {row.new}**")
        else:
            lines.append(f"{row.title}: {row.old}")
    return "\n".join(lines)
