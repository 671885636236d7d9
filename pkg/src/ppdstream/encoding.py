"""One-hot encoding of screening records into sparse Boolean samples.

The feature space is fixed: 8 topics x 6 response options plus 5 age buckets,
53 Boolean features in total.  Feature names are a public contract (they show
up in explanations and the UI):

    <topic-slug>__<option-slug>      e.g. feeling_sad_or_tearful__sometimes
    age__<low>_<high>                e.g. age__30_35
"""

from __future__ import annotations

from typing import Dict

from .records import AgeBucket, ResponseOption, ScreeningRecord, Topic, TOPIC_ORDER

EncodedSample = Dict[str, int]


def topic_feature(topic: Topic, option: ResponseOption) -> str:
    return f"{topic.slug}__{option.slug}"


def age_feature(bucket: AgeBucket) -> str:
    return f"age__{bucket.slug}"


#: All 53 feature names in canonical order (topics in questioning order,
#: options in enum order, then age buckets ascending).
FEATURE_SPACE: tuple[str, ...] = tuple(
    topic_feature(t, o) for t in TOPIC_ORDER for o in ResponseOption
) + tuple(age_feature(b) for b in AgeBucket)

assert len(FEATURE_SPACE) == 53


def encode_record(record: ScreeningRecord) -> EncodedSample:
    """One-hot expansion of a validated record.

    Only the active indicators are materialized; features absent from the
    returned map are semantically 0.  Exactly one option feature per topic
    and exactly one age feature are set.
    """
    sample: EncodedSample = {}
    for topic in TOPIC_ORDER:
        sample[topic_feature(topic, record.responses[topic])] = 1
    sample[age_feature(record.age_bucket)] = 1
    return sample


def decode_feature(name: str) -> tuple[str, str]:
    """Split a feature name into its (group, value) slugs.

    Group is a topic slug or ``"age"``; value is an option or bucket slug.
    """
    if name.startswith("age__"):
        return "age", name[len("age__"):]
    group, _, value = name.rpartition("__")
    if not group:
        raise ValueError(f"not a feature name: {name!r}")
    return group, value


def feature_display(name: str) -> str:
    """Human-readable rendering of a feature name."""
    group, value = decode_feature(name)
    if group == "age":
        return f"Age {value.replace('_', '-')}"
    topic = Topic.from_slug(group)
    option = ResponseOption.from_slug(value)
    return f"{topic.display}: {option.display}"
