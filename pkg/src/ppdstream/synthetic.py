"""Surrogate survey-table generator.

The public survey table the benchmark tables were measured on cannot be
redistributed here, so this module generates a stand-in stream with the same
shape: 1491 rows, the 523/968 class split, eight topic columns over the six
response options, and an integer age column.  Responses are drawn from
label-conditional option distributions with per-topic strength differences,
which gives the online learners a realistic (noisy but learnable) signal.

The surrogate is for exercising the pipeline end to end; benchmark-table
numbers measured on it are not comparable to the published ones.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .records import ResponseOption, ScreeningRecord, SchemaMapping, Topic, TOPIC_ORDER, make_record

#: Option order used by the probability tables below.
_OPTIONS = (
    ResponseOption.YES,
    ResponseOption.OFTEN,
    ResponseOption.SOMETIMES,
    ResponseOption.NO,
    ResponseOption.UNWILLING,
)

# P(option | presence) and P(option | absence); per-topic mixing below.
_PRESENCE = np.array([0.30, 0.20, 0.30, 0.13, 0.07])
_ABSENCE = np.array([0.07, 0.04, 0.24, 0.58, 0.07])

#: How strongly each topic tracks the label (1 = full signal, 0 = noise).
_TOPIC_STRENGTH = {
    Topic.BABY_BONDING: 0.75,
    Topic.CONCENTRATION: 0.55,
    Topic.SADNESS: 0.85,
    Topic.GUILT: 0.60,
    Topic.IRRITABILITY: 0.70,
    Topic.APPETITE: 0.50,
    Topic.SUICIDE: 0.80,
    Topic.SLEEP: 0.65,
}

_NEUTRAL = (_PRESENCE + _ABSENCE) / 2


def generate_records(
    n_total: int = 1491,
    n_absence: int = 523,
    seed: Optional[int] = 20240524,
) -> list[ScreeningRecord]:
    """Deterministic surrogate stream with an exact class split."""
    if n_absence > n_total:
        raise ValueError("n_absence cannot exceed n_total")
    rng = np.random.default_rng(seed)
    labels = np.array([False] * n_absence + [True] * (n_total - n_absence))
    rng.shuffle(labels)

    records = []
    for label in labels:
        responses = {}
        for topic in TOPIC_ORDER:
            s = _TOPIC_STRENGTH[topic]
            base = _PRESENCE if label else _ABSENCE
            p = s * base + (1 - s) * _NEUTRAL
            responses[topic] = _OPTIONS[rng.choice(len(_OPTIONS), p=p / p.sum())]
        # presence skews slightly younger
        mean_age = 31.0 if label else 34.0
        age = int(np.clip(round(rng.normal(mean_age, 5.0)), 25, 50))
        records.append(make_record(age, responses, bool(label)))
    return records


SURROGATE_HEADERS = {
    "Age": "age",
    "Problems of bonding with baby": Topic.BABY_BONDING.slug,
    "Problems concentrating or making decision": Topic.CONCENTRATION.slug,
    "Feeling sad or Tearful": Topic.SADNESS.slug,
    "Feeling of guilt": Topic.GUILT.slug,
    "Irritable towards baby & partner": Topic.IRRITABILITY.slug,
    "Overeating or loss of appetite": Topic.APPETITE.slug,
    "Suicide attempt": Topic.SUICIDE.slug,
    "Trouble sleeping at night": Topic.SLEEP.slug,
    "Diagnosis": "label",
}


def surrogate_mapping() -> SchemaMapping:
    aliases = {
        "NA": "na",
        "Yes": "yes",
        "Sometimes": "sometimes",
        "Often": "often",
        "No": "no",
        "Unwilling to disclose": "unwilling_to_disclose",
    }
    return SchemaMapping(
        columns=dict(SURROGATE_HEADERS),
        aliases=aliases,
        label_aliases={"0": 0, "1": 1},
    )


def surrogate_mapping_text() -> str:
    """The surrogate mapping in its on-disk config format."""
    lines = ["[columns]"]
    lines += [f"{header} = {target}" for header, target in SURROGATE_HEADERS.items()]
    lines.append("")
    lines.append("[aliases]")
    for raw, slug in surrogate_mapping().aliases.items():
        lines.append(f"{raw} = {slug}")
    lines.append("")
    lines.append("[labels]")
    lines.append("0 = 0")
    lines.append("1 = 1")
    return "\n".join(lines) + "\n"
