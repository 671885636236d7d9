"""Dialogue state machine, FIFO history, interpretation parsing, and the
deterministic mock backend.
"""

import numpy as np
import pytest

from ppdstream.dialogue import (
    ALL_TOPICS_COVERED,
    ASSESSING,
    COLLECTING,
    DONE,
    BackendError,
    DialogueSession,
    FALLBACK_QUESTIONS,
    HISTORY_LIMIT,
    IncompleteSessionError,
    MockChatBackend,
    PROMPTS,
    TOPIC_NUMBER,
    assess,
    interpret_responses,
    next_question,
    parse_interpretation_reply,
    push_history,
)
from ppdstream.learners import make_learner
from ppdstream.records import ResponseOption, Topic, TOPIC_ORDER


class TestHistory:
    def test_fifo_keeps_last_ten(self):
        session = DialogueSession()
        for i in range(12):
            push_history(session, ("user", f"e{i}"))
        assert len(session.history) == HISTORY_LIMIT
        assert session.history[0] == ("user", "e2")
        assert session.history[-1] == ("user", "e11")

    def test_under_limit_untouched(self):
        session = DialogueSession()
        for i in range(3):
            push_history(session, ("assistant", f"q{i}"))
        assert len(session.history) == 3


class TestPrompts:
    def test_three_templates_with_expected_temperatures(self):
        assert set(PROMPTS) == {"interpretation", "question_generation", "treatment"}
        assert PROMPTS["interpretation"].temperature == 0.0
        assert PROMPTS["question_generation"].temperature == 1.0
        assert PROMPTS["treatment"].temperature == 1.0

    def test_topic_numbering_follows_question_order(self):
        assert [TOPIC_NUMBER[t] for t in TOPIC_ORDER] == list(range(1, 9))


class TestInterpretationParsing:
    def test_parses_canonical_lines(self):
        reply = "\n".join(
            f"topic {i + 1}: {o}" for i, o in enumerate(
                ["yes", "no", "sometimes", "often", "NA", "unwilling to disclose",
                 "no", "yes"]
            )
        )
        parsed = parse_interpretation_reply(reply)
        assert parsed[Topic.BABY_BONDING] is ResponseOption.YES
        assert parsed[Topic.APPETITE] is ResponseOption.UNWILLING
        assert parsed[Topic.IRRITABILITY] is ResponseOption.NA

    def test_tolerates_prose_and_unknown_lines(self):
        reply = "Sure! Here is my analysis:\nTopic 3 - Sometimes\ntopic 99: yes\njunk"
        parsed = parse_interpretation_reply(reply)
        assert parsed == {Topic.SADNESS: ResponseOption.SOMETIMES}

    def test_unknown_option_skipped(self):
        assert parse_interpretation_reply("topic 1: maybe?") == {}


class TestMockBackend:
    def test_interpretation_keyword_rules(self, mock_backend):
        history = [
            ("assistant", "Do you find yourself feeling sad or tearful?"),
            ("user", "Sometimes I feel really sad, yes."),
        ]
        reply = mock_backend.complete(
            PROMPTS["interpretation"].text, history, 0.0
        )
        parsed = parse_interpretation_reply(reply)
        # 'sometimes' outranks 'yes' in the option rules
        assert parsed[Topic.SADNESS] is ResponseOption.SOMETIMES
        assert parsed[Topic.SLEEP] is ResponseOption.NA

    def test_no_is_not_matched_inside_other_words(self, mock_backend):
        history = [("user", "I know my sleep is great, yes")]
        reply = mock_backend.complete(PROMPTS["interpretation"].text, history, 0.0)
        parsed = parse_interpretation_reply(reply)
        assert parsed[Topic.SLEEP] is ResponseOption.YES  # 'know' must not read as 'no'

    def test_question_generation_is_canned_per_topic(self, mock_backend):
        template = PROMPTS["question_generation"]
        system = f"{template.text}\nNext topic: {Topic.SLEEP.display}"
        q1 = mock_backend.complete(system, [], 1.0)
        q2 = mock_backend.complete(system, [], 1.0)
        assert q1 == q2
        assert "sleep" in q1.lower()

    def test_treatments_are_three_numbered_items(self, mock_backend):
        reply = mock_backend.complete(PROMPTS["treatment"].text, [], 1.0)
        lines = reply.splitlines()
        assert len(lines) == 3
        assert [l.split(".")[0] for l in lines] == ["1", "2", "3"]

    def test_fail_mode_raises(self):
        backend = MockChatBackend(fail=True)
        with pytest.raises(BackendError):
            backend.complete("anything", [], 0.0)


class TestStateMachine:
    def test_next_question_walks_topics_in_order(self, mock_backend):
        session = DialogueSession()
        question = next_question(session, mock_backend)
        assert "bond" in question.lower()
        assert session.history[-1] == ("assistant", question)
        assert session.pending_topics[0] is Topic.BABY_BONDING

    def test_interpretation_clears_pending_topics(self, mock_backend):
        session = DialogueSession()
        next_question(session, mock_backend)
        push_history(session, ("user", "Yes, I struggle to bond with my baby."))
        result = interpret_responses(session, mock_backend)
        assert result[Topic.BABY_BONDING] is ResponseOption.YES
        assert Topic.BABY_BONDING not in session.pending_topics
        assert session.interpretations[Topic.BABY_BONDING] is ResponseOption.YES

    def test_all_topics_covered_moves_to_assessing(self, mock_backend):
        session = DialogueSession()
        session.interpretations = {t: ResponseOption.NO for t in TOPIC_ORDER}
        session.pending_topics = []
        assert next_question(session, mock_backend) is ALL_TOPICS_COVERED
        assert session.state == ASSESSING

    def test_backend_failure_falls_back_to_canned_question(self):
        session = DialogueSession()
        question = next_question(session, MockChatBackend(fail=True))
        assert question == FALLBACK_QUESTIONS[Topic.BABY_BONDING]
        assert f"fallback_question:{Topic.BABY_BONDING.slug}" in session.flags

    def test_interpretation_failure_flagged(self):
        session = DialogueSession()
        push_history(session, ("user", "hello"))
        result = interpret_responses(session, MockChatBackend(fail=True))
        assert all(o is ResponseOption.NA for o in result.values())
        assert "interpretation_failed" in session.flags

    def test_interpretation_requires_user_turn(self, mock_backend):
        session = DialogueSession()
        with pytest.raises(RuntimeError):
            interpret_responses(session, mock_backend)

    def test_non_na_interpretations_are_sticky(self, mock_backend):
        session = DialogueSession()
        push_history(session, ("user", "Yes, I often cry and feel sad."))
        interpret_responses(session, mock_backend)
        first = session.interpretations[Topic.SADNESS]
        assert first is ResponseOption.OFTEN
        # a later pass with no sadness mention must not erase the earlier call
        session.history = [("user", "My sleep is fine, no trouble at all.")]
        interpret_responses(session, mock_backend)
        assert session.interpretations[Topic.SADNESS] is first


class TestAssess:
    def _complete_session(self, age=30, option=ResponseOption.NO):
        session = DialogueSession()
        session.age = age
        session.interpretations = {t: option for t in TOPIC_ORDER}
        session.pending_topics = []
        session.state = ASSESSING
        return session

    def test_requires_age(self, mock_backend):
        session = self._complete_session()
        session.age = None
        with pytest.raises(IncompleteSessionError):
            assess(session, make_learner("gnb"), None, mock_backend)

    def test_requires_all_interpretations(self, mock_backend):
        session = self._complete_session()
        del session.interpretations[Topic.SLEEP]
        with pytest.raises(IncompleteSessionError, match="trouble_sleeping"):
            assess(session, make_learner("gnb"), None, mock_backend)

    def test_untrained_model_gives_uniform_no_explanation(self, mock_backend):
        session = self._complete_session()
        assessment = assess(session, make_learner("gnb"), None, mock_backend)
        assert assessment.prediction is False  # tie resolves to absence
        assert assessment.probability == 0.5
        assert assessment.explanation is None  # 0.5 is under the 0.80 gate
        assert assessment.recommendations is None
        assert session.state == DONE

    def test_confident_presence_gets_explanation_and_treatments(
        self, mock_backend, trained_checkpoint
    ):
        session = self._complete_session(age=27, option=ResponseOption.YES)
        assessment = assess(
            session,
            trained_checkpoint.learner,
            trained_checkpoint.transform,
            mock_backend,
            rng=np.random.default_rng(0),
        )
        assert assessment.prediction is True
        assert assessment.probability > 0.80
        assert assessment.explanation.startswith("Presence of PPD (")
        assert len(assessment.rows) == 9
        assert len(assessment.recommendations) == 3

    def test_treatment_backend_failure_flagged(self, trained_checkpoint):
        session = self._complete_session(age=27, option=ResponseOption.YES)
        assessment = assess(
            session,
            trained_checkpoint.learner,
            trained_checkpoint.transform,
            MockChatBackend(fail=True),
            rng=np.random.default_rng(0),
        )
        assert assessment.prediction is True
        assert assessment.recommendations is None
        assert "treatment_failed" in assessment.flags

    def test_done_session_cannot_be_reassessed(self, mock_backend):
        session = self._complete_session()
        assess(session, make_learner("gnb"), None, mock_backend)
        with pytest.raises(RuntimeError):
            assess(session, make_learner("gnb"), None, mock_backend)
