"""Counterfactual search invariants, the stump-model oracle, and rendering."""

import numpy as np
import pytest

from ppdstream.counterfactual import (
    NOT_FOUND,
    CounterfactualResult,
    NotFound,
    PerturbationPolicy,
    counterfactual,
    eligible_for_explanation,
    explanation_rows,
    render_explanation,
)
from ppdstream.encoding import encode_record, topic_feature
from ppdstream.learners import OnlineClassifier
from ppdstream.records import (
    AgeBucket,
    ResponseOption,
    Topic,
    TOPIC_ORDER,
    make_record,
)

from conftest import record_with


class StumpModel(OnlineClassifier):
    """Predicts presence with probability 0.9 iff one feature is active."""

    def __init__(self, feature):
        self.feature = feature

    def learn_one(self, x, y):
        pass

    def predict_proba_one(self, x):
        p = 0.9 if x.get(self.feature) else 0.1
        return {True: p, False: 1.0 - p}


class ConstantModel(OnlineClassifier):
    def __init__(self, p_true=0.9):
        self.p_true = p_true

    def learn_one(self, x, y):
        pass

    def predict_proba_one(self, x):
        return {True: self.p_true, False: 1.0 - self.p_true}


class TestEligibility:
    def test_gate_is_strict(self):
        assert not eligible_for_explanation({True: 0.80, False: 0.20})
        assert eligible_for_explanation({True: 0.801, False: 0.199})
        assert eligible_for_explanation({False: 0.95, True: 0.05})

    def test_custom_gate(self):
        assert eligible_for_explanation({True: 0.7, False: 0.3}, gate=0.6)


class TestStumpOracle:
    def test_singleton_change_set(self):
        # oracle: flipping the stump topic is sufficient and nothing smaller
        # exists, so the minimal change set is exactly that topic
        stump_topic = Topic.SADNESS
        model = StumpModel(topic_feature(stump_topic, ResponseOption.YES))
        record = record_with(SADNESS=ResponseOption.YES)
        policy = PerturbationPolicy(
            toward_absence=(ResponseOption.NO,), perturb_age=False
        )
        result = counterfactual(
            model, record, True, policy=policy, rng=np.random.default_rng(0)
        )
        assert isinstance(result, CounterfactualResult)
        assert result.relevant_features == {stump_topic.slug}
        assert result.changes[stump_topic.slug] == ("Yes", "No")

    def test_randomized_stumps(self):
        rng = np.random.default_rng(1)
        for topic in TOPIC_ORDER:
            model = StumpModel(topic_feature(topic, ResponseOption.YES))
            overrides = {topic.name: ResponseOption.YES}
            record = record_with(**overrides)
            policy = PerturbationPolicy(
                toward_absence=(ResponseOption.NO,), perturb_age=False
            )
            result = counterfactual(model, record, True, policy=policy, rng=rng)
            assert result.relevant_features == {topic.slug}


class TestSearchInvariants:
    def test_constant_model_finds_nothing(self):
        record = record_with()
        result = counterfactual(
            ConstantModel(), record, True, rng=np.random.default_rng(2)
        )
        assert isinstance(result, NotFound)
        assert result is NOT_FOUND

    def test_result_flips_with_majority_probability(self, trained_checkpoint):
        model = trained_checkpoint.learner
        rng = np.random.default_rng(3)
        found = 0
        for seed in range(40):
            case_rng = np.random.default_rng(seed)
            responses = {
                t: list(ResponseOption)[case_rng.integers(6)] for t in TOPIC_ORDER
            }
            record = make_record(int(case_rng.integers(25, 51)), responses)
            predicted = model.predict_one(
                trained_checkpoint.transform(encode_record(record))
            )
            result = counterfactual(
                model, record, predicted, rng=rng,
                transform=trained_checkpoint.transform,
            )
            if isinstance(result, NotFound):
                continue
            found += 1
            sample = trained_checkpoint.transform(encode_record(result.x_final))
            proba = model.predict_proba_one(sample)
            flipped = proba[True] > proba[False]
            assert flipped == (not predicted)
            assert proba[flipped] > 0.5
            assert proba[flipped] == pytest.approx(result.flipped_probability)
        assert found > 0  # the invariant must actually be exercised

    def test_changes_equal_independent_diff(self, trained_checkpoint):
        model = trained_checkpoint.learner
        record = record_with(
            SADNESS=ResponseOption.YES, SLEEP=ResponseOption.OFTEN, age=33
        )
        result = counterfactual(model, record, True, rng=np.random.default_rng(4))
        if isinstance(result, NotFound):
            pytest.skip("no counterfactual under this model; diff not exercised")
        diff = {
            t.slug for t in TOPIC_ORDER
            if record.responses[t] is not result.x_final.responses[t]
        }
        if record.age_bucket is not result.x_final.age_bucket:
            diff.add("age")
        assert result.relevant_features == diff
        assert set(result.changes) == diff

    def test_age_perturbation_is_adjacent_only(self):
        class AgeModel(OnlineClassifier):
            def learn_one(self, x, y):
                pass

            def predict_proba_one(self, x):
                p = 0.9 if x.get("age__25_30") else 0.1
                return {True: p, False: 1.0 - p}

        record = record_with(default=ResponseOption.NO, age=27)
        result = counterfactual(
            AgeModel(), record, True, rng=np.random.default_rng(5),
            n_iterations=500,
        )
        assert isinstance(result, CounterfactualResult)
        assert result.x_final.age_bucket is AgeBucket.B30_35  # only neighbour

    def test_policy_pools_respected(self):
        model = StumpModel(topic_feature(Topic.SADNESS, ResponseOption.YES))
        record = record_with(SADNESS=ResponseOption.YES)
        result = counterfactual(model, record, True, rng=np.random.default_rng(6))
        pool = PerturbationPolicy().toward_absence
        for topic in TOPIC_ORDER:
            assert result.x_final.responses[topic] in pool

    def test_iteration_budget_validated(self):
        with pytest.raises(ValueError):
            counterfactual(ConstantModel(), record_with(), True, n_iterations=0)

    def test_policy_pool_must_be_nonempty(self):
        with pytest.raises(ValueError):
            PerturbationPolicy(toward_absence=())


class TestRendering:
    def _result(self):
        model = StumpModel(topic_feature(Topic.SADNESS, ResponseOption.YES))
        record = record_with(SADNESS=ResponseOption.YES, age=32)
        policy = PerturbationPolicy(
            toward_absence=(ResponseOption.NO,), perturb_age=False
        )
        result = counterfactual(
            model, record, True, policy=policy, rng=np.random.default_rng(7)
        )
        return record, result

    def test_rows_order_and_relevance(self):
        record, result = self._result()
        rows = explanation_rows(record, result)
        assert len(rows) == 9
        assert rows[0].group == "age" and rows[0].title == "Age"
        assert [r.group for r in rows[1:]] == [t.slug for t in TOPIC_ORDER]
        relevant = [r for r in rows if r.relevant]
        assert [r.group for r in relevant] == [Topic.SADNESS.slug]
        assert relevant[0].old == "Yes" and relevant[0].new == "No"

    def test_rows_for_not_found_have_no_changes(self):
        record = record_with()
        rows = explanation_rows(record, NOT_FOUND)
        assert all(not r.relevant and r.new is None for r in rows)

    def test_render_golden(self):
        record, result = self._result()
        text = render_explanation(record, result, True, 0.8426)
        expected = "\n".join([
            "Presence of PPD (84.26%)",
            "",
            "Age: 30-35",
            "Baby bonding issues: No",
            "Concentration and decision-making problems: No",
            "**Feeling sad or tearful: Yes -> No**",
            "Feeling guilty: No",
            "Irritability towards the baby or the partner: No",
            "Overreacting or loss of appetite: No",
            "Suicide behavior: No",
            "Trouble sleeping: No",
        ])
        assert text == expected

    def test_render_absence_header(self):
        record = record_with()
        text = render_explanation(record, NOT_FOUND, False, 0.91)
        assert text.startswith("Absence of PPD (91.00%)")
