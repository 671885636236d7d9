"""Shared fixtures: surrogate streams, a trained checkpoint, the mock backend."""

import pytest

from ppdstream.checkpoint import checkpoint_from_selector
from ppdstream.dialogue import MockChatBackend
from ppdstream.evaluation import prequential_run
from ppdstream.learners import make_learner
from ppdstream.records import (
    ResponseOption,
    Topic,
    TOPIC_ORDER,
    make_record,
)
from ppdstream.selection import SelectorConfig
from ppdstream.synthetic import generate_records


@pytest.fixture(scope="session")
def full_stream():
    """The full deterministic surrogate stream (1491 rows, 523/968 split)."""
    return generate_records()


@pytest.fixture(scope="session")
def small_stream(full_stream):
    return full_stream[:200]


@pytest.fixture(scope="session")
def mock_backend():
    return MockChatBackend()


@pytest.fixture(scope="session")
def trained_checkpoint(full_stream):
    """A GNB model replayed over 400 surrogate rows, with its frozen selector."""
    result = prequential_run(full_stream[:400], make_learner("gnb"), SelectorConfig())
    return checkpoint_from_selector("gnb", result.learner, result.selector)


def record_with(default=ResponseOption.NO, age=32, label=None, **overrides):
    """Build a record with one response per topic; overrides keyed by topic name."""
    responses = {topic: default for topic in TOPIC_ORDER}
    for name, option in overrides.items():
        responses[Topic[name]] = option
    return make_record(age, responses, label)
