"""Streaming variance-threshold feature selection.

Per-feature running variance is maintained with Welford accumulators over the
whole stream (a feature absent from a sample counts as 0, so one global
sample counter serves every feature).  The threshold is the configurable
percentile of the per-feature variances observed over a cold-start prefix of
the stream and is frozen afterwards; the running variances keep updating and
filtering is re-evaluated on every sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .encoding import EncodedSample


class VarianceTracker:
    """Running per-feature mean / M2 with dense-zero semantics.

    A feature first seen at sample k is treated as having been 0 for the
    previous k-1 samples, which is exactly what zero-initialized Welford
    accumulators give.
    """

    def __init__(self):
        self.n = 0
        self._index: dict[str, int] = {}
        self._mean = np.zeros(0)
        self._m2 = np.zeros(0)

    def _ensure(self, names: Iterable[str]) -> None:
        new = [f for f in names if f not in self._index]
        if new:
            for f in new:
                self._index[f] = len(self._index)
            grow = len(new)
            self._mean = np.concatenate([self._mean, np.zeros(grow)])
            self._m2 = np.concatenate([self._m2, np.zeros(grow)])

    def update(self, sample: EncodedSample) -> None:
        self._ensure(sample)
        self.n += 1
        x = np.zeros(len(self._index))
        for f, v in sample.items():
            x[self._index[f]] = v
        delta = x - self._mean
        self._mean += delta / self.n
        self._m2 += delta * (x - self._mean)

    @property
    def features(self) -> list[str]:
        return list(self._index)

    def variance(self, feature: str) -> float:
        """Sample variance (divisor n-1); 0 when fewer than two samples."""
        if self.n < 2:
            return 0.0
        i = self._index.get(feature)
        if i is None:
            return 0.0
        return float(self._m2[i] / (self.n - 1))

    def variances(self) -> dict[str, float]:
        if self.n < 2:
            return {f: 0.0 for f in self._index}
        v = self._m2 / (self.n - 1)
        return {f: float(v[i]) for f, i in self._index.items()}


@dataclass
class SelectorConfig:
    """Knobs for the cold-start threshold computation."""

    percentile: float = 5.0
    cold_start_fraction: float = 0.10
    threshold: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.percentile <= 100.0:
            raise ValueError("percentile must be in [0, 100]")
        if not 0.0 < self.cold_start_fraction <= 1.0:
            raise ValueError("cold_start_fraction must be in (0, 1]")
        if self.threshold is not None and self.threshold < 0:
            raise ValueError("threshold must be non-negative")


def cold_start_size(n_total: int, fraction: float) -> int:
    return math.ceil(fraction * n_total)


def percentile_linear(values: Sequence[float], q: float) -> float:
    """Linear-interpolation (inclusive) percentile of a value list."""
    if len(values) == 0:
        raise ValueError("empty value list")
    return float(np.percentile(np.asarray(values, dtype=float), q, method="linear"))


def compute_threshold(
    cold_start: Iterable[EncodedSample], config: SelectorConfig
) -> float:
    """Percentile of per-feature variances over the cold-start samples."""
    tracker = VarianceTracker()
    count = 0
    for sample in cold_start:
        tracker.update(sample)
        count += 1
    if count == 0:
        raise ValueError("cold start segment is empty")
    return percentile_linear(list(tracker.variances().values()), config.percentile)


def select_features(
    sample: EncodedSample, tracker: VarianceTracker, threshold: float
) -> EncodedSample:
    """Drop features whose current running variance is below the threshold."""
    return {f: v for f, v in sample.items() if tracker.variance(f) >= threshold}


@dataclass
class StreamSelector:
    """Stateful wrapper used by replay and live sessions.

    Feed every sample through :meth:`transform`; call :meth:`freeze` once the
    cold-start segment ends.  Before the threshold is frozen, samples pass
    through unfiltered.
    """

    config: SelectorConfig = field(default_factory=SelectorConfig)
    tracker: VarianceTracker = field(default_factory=VarianceTracker)
    threshold: Optional[float] = None
    _cold_samples: list = field(default_factory=list)

    def __post_init__(self):
        if self.config.threshold is not None and self.threshold is None:
            self.threshold = self.config.threshold

    def transform(self, sample: EncodedSample) -> EncodedSample:
        self.tracker.update(sample)
        if self.threshold is None:
            self._cold_samples.append(sample)
            return dict(sample)
        return select_features(sample, self.tracker, self.threshold)

    def freeze(self) -> float:
        if self.threshold is None:
            self.threshold = compute_threshold(self._cold_samples, self.config)
            self._cold_samples = []
        return self.threshold
