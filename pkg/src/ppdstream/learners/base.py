"""Shared contract for the incremental classifiers.

Every learner consumes sparse Boolean samples (``dict`` of feature name to
0/1; absent features are 0) and binary labels, one observation at a time:

    learn_one(x, y)          update state with exactly this observation
    predict_proba_one(x)     valid distribution over {False, True}
    predict_one(x)           argmax, ties broken toward False

An untrained learner answers the uniform distribution.
"""

from __future__ import annotations

from typing import Dict, Mapping

import numpy as np

Sample = Mapping[str, float]
ClassDistribution = Dict[bool, float]

UNIFORM: ClassDistribution = {False: 0.5, True: 0.5}


class FeatureRegistry:
    """Stable feature-name -> index mapping shared within a learner.

    Indices are assigned in order of first appearance, so a fixed stream
    always yields the same layout.
    """

    def __init__(self):
        self.index: dict[str, int] = {}
        self.names: list[str] = []

    def __len__(self) -> int:
        return len(self.names)

    def add(self, name: str) -> int:
        i = self.index.get(name)
        if i is None:
            i = len(self.names)
            self.index[name] = i
            self.names.append(name)
        return i

    def vectorize(self, sample: Sample) -> np.ndarray:
        """Dense 0/1 vector over all currently known features (growing)."""
        for name in sample:
            if name not in self.index:
                self.add(name)
        x = np.zeros(len(self.names))
        for name, value in sample.items():
            x[self.index[name]] = value
        return x


class OnlineClassifier:
    """Base class fixing the prediction conventions."""

    def learn_one(self, x: Sample, y: bool) -> None:
        raise NotImplementedError

    def predict_proba_one(self, x: Sample) -> ClassDistribution:
        raise NotImplementedError

    def predict_one(self, x: Sample) -> bool:
        proba = self.predict_proba_one(x)
        # strict inequality: a 50/50 tie resolves to absence
        return proba[True] > proba[False]


def normalize_pair(p_false: float, p_true: float) -> ClassDistribution:
    total = p_false + p_true
    if total <= 0 or not np.isfinite(total):
        return dict(UNIFORM)
    return {False: p_false / total, True: p_true / total}
