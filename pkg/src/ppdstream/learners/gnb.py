"""Incremental Gaussian naive Bayes.

Per class, per feature: running mean and M2 via Welford updates with
dense-zero semantics (a feature absent from a sample is a 0 observation).
Gaussian variances are smoothed by ``var_smoothing`` times the largest
per-feature variance to avoid singularities on constant Boolean features.
"""

from __future__ import annotations

import numpy as np

from .base import ClassDistribution, FeatureRegistry, OnlineClassifier, Sample, UNIFORM

_LOG_2PI = float(np.log(2.0 * np.pi))


class GaussianNaiveBayes(OnlineClassifier):
    def __init__(self, var_smoothing: float = 1e-9):
        self.var_smoothing = var_smoothing
        self.registry = FeatureRegistry()
        self.counts = {False: 0, True: 0}
        self._mean = {False: np.zeros(0), True: np.zeros(0)}
        self._m2 = {False: np.zeros(0), True: np.zeros(0)}

    def _grow(self, size: int) -> None:
        for c in (False, True):
            if len(self._mean[c]) < size:
                pad = size - len(self._mean[c])
                self._mean[c] = np.concatenate([self._mean[c], np.zeros(pad)])
                self._m2[c] = np.concatenate([self._m2[c], np.zeros(pad)])

    def learn_one(self, x: Sample, y: bool) -> None:
        xv = self.registry.vectorize(x)
        self._grow(len(xv))
        y = bool(y)
        self.counts[y] += 1
        n = self.counts[y]
        mean, m2 = self._mean[y], self._m2[y]
        delta = xv - mean
        mean += delta / n
        m2 += delta * (xv - mean)

    def class_mean(self, y: bool, feature: str) -> float:
        i = self.registry.index.get(feature)
        if i is None:
            return 0.0
        return float(self._mean[bool(y)][i])

    def class_variance(self, y: bool, feature: str) -> float:
        i = self.registry.index.get(feature)
        n = self.counts[bool(y)]
        if i is None or n < 2:
            return 0.0
        return float(self._m2[bool(y)][i] / (n - 1))

    def _variances(self, y: bool) -> np.ndarray:
        n = self.counts[y]
        if n < 2:
            return np.zeros(len(self._mean[y]))
        return self._m2[y] / (n - 1)

    def predict_proba_one(self, x: Sample) -> ClassDistribution:
        total = self.counts[False] + self.counts[True]
        if total == 0:
            return dict(UNIFORM)
        xv = self.registry.vectorize(x)
        self._grow(len(xv))

        var_f = self._variances(False)
        var_t = self._variances(True)
        max_var = max(var_f.max(initial=0.0), var_t.max(initial=0.0))
        eps = self.var_smoothing * max_var if max_var > 0 else self.var_smoothing

        log_post = {}
        for c, var in ((False, var_f), (True, var_t)):
            n = self.counts[c]
            if n == 0:
                continue
            v = var + eps
            ll = -0.5 * np.sum(_LOG_2PI + np.log(v) + (xv - self._mean[c]) ** 2 / v)
            log_post[c] = np.log(n / total) + ll
        if len(log_post) == 1:
            (c,) = log_post
            return {c: 1.0, not c: 0.0}
        m = max(log_post.values())
        w = {c: float(np.exp(lp - m)) for c, lp in log_post.items()}
        z = w[False] + w[True]
        return {False: w[False] / z, True: w[True] / z}
