"""Adaptive random forest: online bagging over Hoeffding trees.

Each member tree sees the sample with a Poisson(lambda) weight and considers
only a random feature subset at every split attempt.  A per-member warning
detector spawns a background tree that trains in parallel; the paired drift
detector replaces the member with its background tree (or a fresh one) when
it fires.  Predictions average the member probability estimates, which for
hard-voting members reduces to a normalized vote count.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .adwin import Adwin
from .base import ClassDistribution, FeatureRegistry, OnlineClassifier, Sample, UNIFORM
from .hoeffding import HoeffdingAdaptiveTree


class _Member:
    __slots__ = ("tree", "background", "warning", "drift", "rng")

    def __init__(self, tree: HoeffdingAdaptiveTree, warning_delta: float,
                 drift_delta: float, rng: np.random.Generator):
        self.tree = tree
        self.background: Optional[HoeffdingAdaptiveTree] = None
        self.warning = Adwin(warning_delta)
        self.drift = Adwin(drift_delta)
        self.rng = rng


class AdaptiveRandomForest(OnlineClassifier):
    def __init__(
        self,
        n_models: int = 100,
        features_per_split: int | str = "sqrt",
        lam: float = 100.0,
        seed: Optional[int] = None,
        max_depth: Optional[int] = None,
        tie_threshold: float = 0.05,
        max_size: float = 50.0,
        grace_period: int = 200,
        warning_delta: float = 0.01,
        drift_delta: float = 0.001,
    ):
        if n_models < 1:
            raise ValueError("n_models must be >= 1")
        self.n_models = n_models
        self.features_per_split = features_per_split
        self.lam = lam
        self.seed = seed
        self.registry = FeatureRegistry()
        self._tree_kwargs = dict(
            max_depth=max_depth,
            tie_threshold=tie_threshold,
            max_size=max_size,
            grace_period=grace_period,
            adaptive=False,  # drift is handled per member, not inside the tree
            subspace_size=features_per_split,
            registry=self.registry,
        )
        self._warning_delta = warning_delta
        self._drift_delta = drift_delta
        root = np.random.default_rng(seed)
        self.rng = root  # drives the per-sample Poisson weights
        self.members = [
            self._fresh_member(np.random.default_rng(root.integers(2**63)))
            for _ in range(n_models)
        ]
        # member votes from the most recent predict call, reused by learn_one
        # when it receives the same sample (the prequential predict/learn pair)
        self._vote_cache: Optional[tuple[np.ndarray, list[bool]]] = None

    def _fresh_member(self, rng: np.random.Generator) -> _Member:
        tree = HoeffdingAdaptiveTree(rng=rng, **self._tree_kwargs)
        return _Member(tree, self._warning_delta, self._drift_delta, rng)

    def _fresh_tree(self, rng: np.random.Generator) -> HoeffdingAdaptiveTree:
        return HoeffdingAdaptiveTree(rng=rng, **self._tree_kwargs)

    def _vectorize(self, x: Sample) -> np.ndarray:
        for name in x:
            if name not in self.registry.index:
                self.registry.add(name)
        xv = np.zeros(len(self.registry), dtype=np.intp)
        for name, value in x.items():
            if value:
                xv[self.registry.index[name]] = 1
        return xv

    def learn_one(self, x: Sample, y: bool) -> None:
        xv = self._vectorize(x)
        yi = int(y)
        cache = self._vote_cache
        self._vote_cache = None
        if cache is not None and np.array_equal(cache[0], xv):
            votes = cache[1]
        else:
            votes = [m.tree.predict_vec(xv) for m in self.members]
        weights = self.rng.poisson(self.lam, size=self.n_models)
        for member, k, vote in zip(self.members, weights, votes):
            err = 0.0 if int(vote) == yi else 1.0
            warn = member.warning.update(err)
            drifted = member.drift.update(err)

            k = float(k)
            if k > 0:
                member.tree.learn_vec(xv, bool(y), k)
                if member.background is not None:
                    member.background.learn_vec(xv, bool(y), k)

            if drifted:
                if member.background is not None:
                    member.tree = member.background
                    member.background = None
                else:
                    member.tree = self._fresh_tree(member.rng)
                member.warning = Adwin(self._warning_delta)
                member.drift = Adwin(self._drift_delta)
            elif warn and member.background is None:
                member.background = self._fresh_tree(member.rng)

    def member_probas(self, x: Sample) -> list[ClassDistribution]:
        xv = self._vectorize(x)
        return [m.tree.proba_vec(xv) for m in self.members]

    def predict_proba_one(self, x: Sample) -> ClassDistribution:
        xv = self._vectorize(x)
        acc_false = acc_true = 0.0
        votes: list[bool] = []
        for member in self.members:
            p = member.tree.proba_vec(xv)
            votes.append(p[True] > p[False])
            acc_false += p[False]
            acc_true += p[True]
        self._vote_cache = (xv, votes)
        total = acc_false + acc_true
        if total <= 0:
            return dict(UNIFORM)
        return {False: acc_false / total, True: acc_true / total}
