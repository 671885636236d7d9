"""Prequential (test-then-train) evaluation and streaming metrics.

The harness walks a record stream in order.  The cold-start prefix (first
10% by default) feeds the variance tracker and trains the learner but is not
scored; after the threshold is frozen, each sample is encoded, filtered,
scored against the current model, and only then used for training.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .encoding import encode_record
from .learners import (
    DEFAULT_CONFIGS,
    GRIDS,
    LearnerConfig,
    OnlineClassifier,
    make_learner,
)
from .records import ScreeningRecord
from .selection import SelectorConfig, StreamSelector, cold_start_size


@dataclass
class MetricsState:
    """Streaming confusion counts plus retained (score, truth) pairs."""

    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    scores: list[float] = field(default_factory=list)
    truths: list[bool] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def update(self, truth: bool, predicted: bool, score: float) -> None:
        if not 0.0 <= score <= 1.0:
            raise ValueError("score must be in [0, 1]")
        if truth and predicted:
            self.tp += 1
        elif truth and not predicted:
            self.fn += 1
        elif not truth and predicted:
            self.fp += 1
        else:
            self.tn += 1
        self.scores.append(score)
        self.truths.append(bool(truth))


def update_metrics(state: MetricsState, truth: bool, predicted: bool, score: float) -> MetricsState:
    state.update(truth, predicted, score)
    return state


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f


def auc_from_scores(scores: Sequence[float], truths: Sequence[bool]) -> float:
    """Rank-based AUC; ties contribute one half.  0.5 when a class is absent."""
    y = np.asarray(truths, dtype=bool)
    s = np.asarray(scores, dtype=float)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        return 0.5
    ranks = rankdata(s, method="average")
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass(frozen=True)
class MetricsReport:
    """Final streaming metrics; all rates are fractions in [0, 1]."""

    accuracy: float
    auc: float
    precision_macro: float
    precision_neg: float
    precision_pos: float
    recall_macro: float
    recall_neg: float
    recall_pos: float
    f_macro: float
    f_neg: float
    f_pos: float
    runtime_seconds: float
    samples_processed: int

    def row(self, name: str) -> list[str]:
        pct = lambda v: f"{100 * v:.2f}"
        return [
            name, pct(self.accuracy), pct(self.auc),
            pct(self.precision_macro), pct(self.precision_neg), pct(self.precision_pos),
            pct(self.recall_macro), pct(self.recall_neg), pct(self.recall_pos),
            pct(self.f_macro), pct(self.f_neg), pct(self.f_pos),
            f"{self.runtime_seconds:.2f}",
        ]


REPORT_COLUMNS = [
    "Model", "Acc.", "AUC",
    "Precision (Macro)", "Precision (#0)", "Precision (#1)",
    "Recall (Macro)", "Recall (#0)", "Recall (#1)",
    "F-measure (Macro)", "F-measure (#0)", "F-measure (#1)",
    "Time (s)",
]


def finalize_metrics(state: MetricsState, runtime_seconds: float = 0.0) -> MetricsReport:
    n = state.n
    accuracy = (state.tp + state.tn) / n if n else 0.0
    p1, r1, f1 = _prf(state.tp, state.fp, state.fn)
    # class #0 (absence) treats negatives as the positive class
    p0, r0, f0 = _prf(state.tn, state.fn, state.fp)
    return MetricsReport(
        accuracy=accuracy,
        auc=auc_from_scores(state.scores, state.truths),
        precision_macro=(p0 + p1) / 2,
        precision_neg=p0,
        precision_pos=p1,
        recall_macro=(r0 + r1) / 2,
        recall_neg=r0,
        recall_pos=r1,
        f_macro=(f0 + f1) / 2,
        f_neg=f0,
        f_pos=f1,
        runtime_seconds=runtime_seconds,
        samples_processed=n,
    )


@dataclass
class PrequentialResult:
    report: MetricsReport
    learner: OnlineClassifier
    selector: StreamSelector
    threshold: float


def prequential_run(
    stream: Sequence[ScreeningRecord],
    learner: OnlineClassifier,
    selector_config: Optional[SelectorConfig] = None,
    *,
    score_cold_start: bool = False,
) -> PrequentialResult:
    """Run the test-then-train protocol over an ordered record stream.

    Every scored sample is predicted before the learner sees its label.
    """
    if not stream:
        raise ValueError("stream is empty")
    config = selector_config or SelectorConfig()
    selector = StreamSelector(config=config)
    n_cold = cold_start_size(len(stream), config.cold_start_fraction)
    if n_cold >= len(stream) and not score_cold_start:
        raise ValueError("no samples remain after the cold-start segment")

    metrics = MetricsState()
    start = time.perf_counter()
    for i, record in enumerate(stream):
        if record.label is None:
            raise ValueError(f"record {i} has no label; prequential replay needs labels")
        sample = selector.transform(encode_record(record))
        scored = score_cold_start or i >= n_cold
        if scored:
            proba = learner.predict_proba_one(sample)
            predicted = proba[True] > proba[False]
            metrics.update(record.label, predicted, proba[True])
        learner.learn_one(sample, record.label)
        if i == n_cold - 1:
            selector.freeze()
    runtime = time.perf_counter() - start
    threshold = selector.freeze()
    return PrequentialResult(
        report=finalize_metrics(metrics, runtime),
        learner=learner,
        selector=selector,
        threshold=threshold,
    )


def balanced_downsample(
    records: Sequence[ScreeningRecord], seed: Optional[int] = None
) -> list[ScreeningRecord]:
    """Randomly subsample the majority class down to the minority count.

    Sampling is without replacement and the original relative order of the
    survivors is preserved.
    """
    labels = [r.label for r in records]
    if any(l is None for l in labels):
        raise ValueError("balanced downsampling needs labeled records")
    pos = [i for i, l in enumerate(labels) if l]
    neg = [i for i, l in enumerate(labels) if not l]
    if not pos or not neg:
        raise ValueError("input contains a single class")
    rng = np.random.default_rng(seed)
    if len(pos) > len(neg):
        majority, target = pos, len(neg)
    else:
        majority, target = neg, len(pos)
    keep_major = set(rng.choice(majority, size=target, replace=False).tolist())
    minority = set(pos if len(pos) <= len(neg) else neg)
    return [r for i, r in enumerate(records) if i in keep_major or i in minority]


@dataclass
class GridPoint:
    config: LearnerConfig
    report: MetricsReport


def grid_search(
    kind: str,
    stream: Sequence[ScreeningRecord],
    seed: Optional[int] = None,
    grid: Optional[Sequence[LearnerConfig]] = None,
    selector_config: Optional[SelectorConfig] = None,
) -> tuple[LearnerConfig, list[GridPoint]]:
    """One prequential run per grid point.

    Best = highest accuracy; ties break by macro F-measure, then by grid
    order.  GNB has no grid and is rejected.
    """
    kind = kind.lower()
    if grid is None:
        if kind not in GRIDS:
            raise ValueError(f"no hyperparameter grid for {kind!r} (baseline model)")
        grid = GRIDS[kind]
    if not grid:
        raise ValueError("empty grid")
    points = []
    for config in grid:
        learner = make_learner(kind, config, seed)
        result = prequential_run(stream, learner, selector_config)
        points.append(GridPoint(config, result.report))
    best = max(
        range(len(points)),
        key=lambda i: (points[i].report.accuracy, points[i].report.f_macro, -i),
    )
    return points[best].config, points
