"""Five incremental classifiers behind one learn/predict contract.

``make_learner`` builds a fresh learner from a kind string and an optional
config; defaults are the tuned selections used for the benchmark tables.
``GRIDS`` holds the hyperparameter search ranges per kind (GNB is the
baseline and has no grid).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Union

from .base import ClassDistribution, FeatureRegistry, OnlineClassifier, Sample, UNIFORM
from .gnb import GaussianNaiveBayes
from .linear import ALMAClassifier, LogisticRegression
from .adwin import Adwin
from .hoeffding import HoeffdingAdaptiveTree
from .forest import AdaptiveRandomForest

KINDS = ("gnb", "lr", "alma", "hatc", "arfc")


@dataclass(frozen=True)
class GNBConfig:
    var_smoothing: float = 1e-9


@dataclass(frozen=True)
class LRConfig:
    l2: float = 0.0
    intercept_lr: float = 0.01


@dataclass(frozen=True)
class ALMAConfig:
    alpha: float = 0.5
    b: float = 0.6
    c: float = 1.4


@dataclass(frozen=True)
class HATCConfig:
    depth: Optional[int] = None
    tie_threshold: float = 0.05
    max_size: float = 50.0


@dataclass(frozen=True)
class ARFCConfig:
    n_models: int = 100
    features_per_split: Union[int, str] = "sqrt"
    lam: float = 100.0


LearnerConfig = Union[GNBConfig, LRConfig, ALMAConfig, HATCConfig, ARFCConfig]

DEFAULT_CONFIGS: dict[str, LearnerConfig] = {
    "gnb": GNBConfig(),
    "lr": LRConfig(),
    "alma": ALMAConfig(),
    "hatc": HATCConfig(),
    "arfc": ARFCConfig(),
}

#: Hyperparameter search ranges; the defaults above are the winning points.
GRIDS: dict[str, list[LearnerConfig]] = {
    "lr": [
        LRConfig(l2=l2, intercept_lr=ilr)
        for l2, ilr in product((0.0, 0.1, 1.0), (0.001, 0.01, 0.1))
    ],
    "alma": [
        ALMAConfig(alpha=a, b=b, c=c)
        for a, b, c in product((0.5, 0.7, 0.9), (0.6, 1.0, 1.4), (1.0, 1.4, 1.8))
    ],
    "hatc": [
        HATCConfig(depth=d, tie_threshold=t, max_size=s)
        for d, t, s in product((None, 50, 200), (0.5, 0.05, 0.005), (50, 100, 200))
    ],
    "arfc": [
        ARFCConfig(n_models=n, features_per_split=f, lam=lam)
        for n, f, lam in product((10, 50, 100), ("sqrt", 5, 50), (10, 50, 100))
    ],
}


def make_learner(
    kind: str,
    config: Optional[LearnerConfig] = None,
    seed: Optional[int] = None,
) -> OnlineClassifier:
    """Fresh deterministic learner; all randomness derives from ``seed``."""
    kind = kind.lower()
    if kind not in KINDS:
        raise ValueError(f"unknown learner kind {kind!r}; expected one of {KINDS}")
    if config is None:
        config = DEFAULT_CONFIGS[kind]
    if kind == "gnb":
        assert isinstance(config, GNBConfig)
        return GaussianNaiveBayes(var_smoothing=config.var_smoothing)
    if kind == "lr":
        assert isinstance(config, LRConfig)
        return LogisticRegression(l2=config.l2, intercept_lr=config.intercept_lr)
    if kind == "alma":
        assert isinstance(config, ALMAConfig)
        return ALMAClassifier(alpha=config.alpha, b=config.b, c=config.c)
    if kind == "hatc":
        assert isinstance(config, HATCConfig)
        import numpy as np

        return HoeffdingAdaptiveTree(
            max_depth=config.depth,
            tie_threshold=config.tie_threshold,
            max_size=config.max_size,
            rng=np.random.default_rng(seed),
        )
    assert isinstance(config, ARFCConfig)
    return AdaptiveRandomForest(
        n_models=config.n_models,
        features_per_split=config.features_per_split,
        lam=config.lam,
        seed=seed,
    )


__all__ = [
    "Adwin",
    "ALMAClassifier",
    "ALMAConfig",
    "ARFCConfig",
    "AdaptiveRandomForest",
    "ClassDistribution",
    "DEFAULT_CONFIGS",
    "FeatureRegistry",
    "GNBConfig",
    "GRIDS",
    "GaussianNaiveBayes",
    "HATCConfig",
    "HoeffdingAdaptiveTree",
    "KINDS",
    "LRConfig",
    "LearnerConfig",
    "LogisticRegression",
    "OnlineClassifier",
    "Sample",
    "UNIFORM",
    "make_learner",
]
