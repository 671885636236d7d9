"""Counterfactual explanations for confident predictions.

Trains a Gaussian naive Bayes model on part of the surrogate stream, then
walks later samples looking for confident calls (winning probability above
80%).  For each one, the randomized minimal-change search proposes the
smallest set of answer changes that would flip the model, rendered exactly
as the dialogue service inserts them into a conversation.

Run:  python3 demos/counterfactual_tour.py
"""

import numpy as np

from ppdstream.counterfactual import (
    NotFound,
    counterfactual,
    eligible_for_explanation,
    render_explanation,
)
from ppdstream.encoding import encode_record
from ppdstream.learners import make_learner
from ppdstream.synthetic import generate_records


def main():
    stream = generate_records(n_total=600, n_absence=210, seed=21)
    model = make_learner("gnb")
    for record in stream[:400]:
        model.learn_one(encode_record(record), record.label)

    rng = np.random.default_rng(7)
    shown = 0
    for i, record in enumerate(stream[400:], start=400):
        proba = model.predict_proba_one(encode_record(record))
        if not eligible_for_explanation(proba):
            continue
        predicted = proba[True] > proba[False]
        result = counterfactual(model, record, predicted, rng=rng)
        print(f"--- sample {i} ---")
        if isinstance(result, NotFound):
            print("no counterfactual found within 100 iterations")
            continue
        print(render_explanation(record, result, predicted, proba[predicted]))
        print(f"(found at iteration {result.iterations_used}, "
              f"{len(result.relevant_features)} changes)")
        print()
        shown += 1
        if shown == 3:
            break


if __name__ == "__main__":
    main()
