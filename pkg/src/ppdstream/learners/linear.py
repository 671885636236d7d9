"""Online linear classifiers: logistic regression and ALMA.

Both keep sparse weight maps; features a sample does not mention contribute
nothing to the dot product or the gradient.
"""

from __future__ import annotations

import math
from collections import defaultdict

from .base import ClassDistribution, OnlineClassifier, Sample


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


class LogisticRegression(OnlineClassifier):
    """SGD on log-loss with a constant learning rate.

    The intercept has its own learning rate; L2 decay is applied to the
    weights touched by the current sample.
    """

    def __init__(self, l2: float = 0.0, intercept_lr: float = 0.01,
                 learning_rate: float = 0.01):
        self.l2 = l2
        self.intercept_lr = intercept_lr
        self.learning_rate = learning_rate
        self.weights: dict[str, float] = defaultdict(float)
        self.intercept = 0.0

    def _raw(self, x: Sample) -> float:
        return sum(self.weights[f] * v for f, v in x.items() if f in self.weights) \
            + self.intercept

    def learn_one(self, x: Sample, y: bool) -> None:
        g = sigmoid(self._raw(x)) - (1.0 if y else 0.0)
        lr = self.learning_rate
        for f, v in x.items():
            self.weights[f] -= lr * (g * v + self.l2 * self.weights[f])
        self.intercept -= self.intercept_lr * g

    def predict_proba_one(self, x: Sample) -> ClassDistribution:
        p = sigmoid(self._raw(x))
        return {False: 1.0 - p, True: p}


class ALMAClassifier(OnlineClassifier):
    """Approximate large-margin (p=2) online classifier.

    Labels map to {-1, +1}.  With update counter k, the margin target is
    gamma_k = B / sqrt(k) and the step size eta_k = C / sqrt(k).  When the
    sample violates y * (w . x) <= (1 - alpha) * gamma_k, the weights take an
    additive step eta_k * y * x and are projected back onto the unit L2 ball,
    so ||w||_2 <= 1 always holds.  Probabilities are a logistic squashing of
    the margin.
    """

    def __init__(self, alpha: float = 0.5, b: float = 0.6, c: float = 1.4):
        self.alpha = alpha
        self.b = b
        self.c = c
        self.k = 1
        self.weights: dict[str, float] = defaultdict(float)

    def _margin(self, x: Sample) -> float:
        return sum(self.weights[f] * v for f, v in x.items() if f in self.weights)

    def weight_norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights.values()))

    def learn_one(self, x: Sample, y: bool) -> None:
        ys = 1.0 if y else -1.0
        gamma = self.b / math.sqrt(self.k)
        if ys * self._margin(x) <= (1.0 - self.alpha) * gamma:
            eta = self.c / math.sqrt(self.k)
            for f, v in x.items():
                self.weights[f] += eta * ys * v
            norm = self.weight_norm()
            if norm > 1.0:
                for f in self.weights:
                    self.weights[f] /= norm
            self.k += 1

    def predict_proba_one(self, x: Sample) -> ClassDistribution:
        p = sigmoid(self._margin(x))
        return {False: 1.0 - p, True: p}
