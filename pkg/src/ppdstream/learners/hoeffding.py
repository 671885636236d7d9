"""Hoeffding adaptive tree for sparse Boolean samples.

Leaves accumulate per-feature, per-value class counts; a leaf splits once the
information-gain gap between the best and second-best feature exceeds the
Hoeffding bound eps = sqrt(R^2 ln(1/delta) / (2 n)) (R = log2(#classes) = 1
for binary labels), or once eps falls below the tie threshold.  Every split
node carries an ADWIN monitoring its subtree's prediction error; on detected
change an alternate subtree starts growing and replaces the original when its
error estimate becomes lower.

Leaf prediction is naive-Bayes-adaptive by default: each leaf tracks whether
majority-class or naive-Bayes prediction has been more accurate on the
samples it absorbed and answers with the better of the two.

The memory budget is expressed in MB and enforced through an approximate
node-count cap using a documented bytes-per-node constant.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .adwin import Adwin
from .base import ClassDistribution, FeatureRegistry, OnlineClassifier, Sample, UNIFORM

#: Approximate in-memory footprint of one tree node, used to translate the
#: max_size (MB) hyperparameter into a node budget.
BYTES_PER_NODE = 2048

_ARANGE_CACHE: dict[int, np.ndarray] = {}


def _arange(n: int) -> np.ndarray:
    a = _ARANGE_CACHE.get(n)
    if a is None:
        a = np.arange(n)
        _ARANGE_CACHE[n] = a
    return a


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    """Binary entropy (bits) along the last axis of a count array."""
    n = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(n > 0, counts / np.where(n > 0, n, 1), 0.0)
        logs = np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -(p * logs).sum(axis=-1)


class _Leaf:
    __slots__ = ("counts", "stats", "feature_totals", "depth", "samples_seen",
                 "samples_at_last_attempt", "mc_correct", "nb_correct")

    def __init__(self, depth: int, n_features: int, counts: Optional[np.ndarray] = None):
        self.counts = counts if counts is not None else np.zeros(2)
        # stats[feature, value(0/1), class(0/1)] = observed weight
        self.stats = np.zeros((n_features, 2, 2))
        # running stats.sum(axis=1), maintained incrementally
        self.feature_totals = np.zeros((n_features, 2))
        self.depth = depth
        self.samples_seen = 0
        self.samples_at_last_attempt = 0
        self.mc_correct = 0.0
        self.nb_correct = 0.0

    def grow(self, n_features: int) -> None:
        if self.stats.shape[0] < n_features:
            pad = n_features - self.stats.shape[0]
            self.stats = np.concatenate([self.stats, np.zeros((pad, 2, 2))])
            self.feature_totals = np.concatenate([self.feature_totals, np.zeros((pad, 2))])

    # -- leaf predictions ---------------------------------------------------

    def proba_mc(self) -> tuple[float, float]:
        total = self.counts[0] + self.counts[1]
        if total <= 0:
            return 0.5, 0.5
        return float(self.counts[0] / total), float(self.counts[1] / total)

    def _nb_log_posterior(self, xv: np.ndarray) -> Optional[np.ndarray]:
        total = self.counts[0] + self.counts[1]
        if total <= 0:
            return None
        f = min(self.stats.shape[0], len(xv))
        if f == 0:
            return None
        sel = self.stats[_arange(f), xv[:f], :]      # (f, 2)
        tot = self.feature_totals[:f]                # (f, 2)
        ll = np.log((sel + 1.0) / (tot + 2.0)).sum(axis=0)
        with np.errstate(divide="ignore"):
            return ll + np.log(self.counts / total)

    def proba_nb(self, xv: np.ndarray) -> tuple[float, float]:
        log_post = self._nb_log_posterior(xv)
        if log_post is None:
            return self.proba_mc()
        w = np.exp(log_post - log_post.max())
        z = w[0] + w[1]
        return float(w[0] / z), float(w[1] / z)

    def proba(self, xv: np.ndarray, mode: str) -> tuple[float, float]:
        if mode == "mc":
            return self.proba_mc()
        if mode == "nb":
            return self.proba_nb(xv)
        # adaptive: whichever predictor has been more accurate here
        if self.nb_correct > self.mc_correct:
            return self.proba_nb(xv)
        return self.proba_mc()

    def predict(self, xv: np.ndarray, mode: str) -> bool:
        """Hard decision; skips normalization where only the argmax matters."""
        if mode == "mc" or (mode == "nba" and self.nb_correct <= self.mc_correct):
            return bool(self.counts[1] > self.counts[0])
        log_post = self._nb_log_posterior(xv)
        if log_post is None:
            return bool(self.counts[1] > self.counts[0])
        return bool(log_post[1] > log_post[0])

    def update(self, xv: np.ndarray, y: int, w: float, mode: str) -> None:
        self.grow(len(xv))
        if mode == "nba" and self.counts[0] + self.counts[1] > 0:
            if (self.counts[1] > self.counts[0]) == bool(y):
                self.mc_correct += w
            log_post = self._nb_log_posterior(xv)
            if log_post is not None and (log_post[1] > log_post[0]) == bool(y):
                self.nb_correct += w
        self.counts[y] += w
        self.stats[_arange(len(xv)), xv, y] += w
        self.feature_totals[:len(xv), y] += w
        self.samples_seen += 1


class _Split:
    __slots__ = ("feature", "children", "depth", "adwin", "alt", "alt_adwin")

    def __init__(self, feature: int, children: list, depth: int, drift_delta: float,
                 adaptive: bool):
        self.feature = feature
        self.children = children
        self.depth = depth
        self.adwin = Adwin(drift_delta) if adaptive else None
        self.alt = None
        self.alt_adwin: Optional[Adwin] = None


class HoeffdingAdaptiveTree(OnlineClassifier):
    def __init__(
        self,
        max_depth: Optional[int] = None,
        tie_threshold: float = 0.05,
        max_size: float = 50.0,
        delta: float = 1e-7,
        grace_period: int = 200,
        adaptive: bool = True,
        drift_delta: float = 0.002,
        subspace_size: Optional[int | str] = None,
        leaf_prediction: str = "nba",
        rng: Optional[np.random.Generator] = None,
        registry: Optional[FeatureRegistry] = None,
    ):
        if leaf_prediction not in ("mc", "nb", "nba"):
            raise ValueError("leaf_prediction must be 'mc', 'nb' or 'nba'")
        self.max_depth = math.inf if max_depth is None else max_depth
        self.tie_threshold = tie_threshold
        self.max_size = max_size
        self.max_nodes = int(max_size * 1024 * 1024 / BYTES_PER_NODE)
        self.delta = delta
        self.grace_period = grace_period
        self.adaptive = adaptive
        self.drift_delta = drift_delta
        self.subspace_size = subspace_size
        self.leaf_prediction = leaf_prediction
        self.rng = rng if rng is not None else np.random.default_rng()
        self.registry = registry if registry is not None else FeatureRegistry()
        self.root: _Leaf | _Split = _Leaf(0, len(self.registry))
        self.node_count = 1
        self.max_depth_seen = 0

    # -- public contract ----------------------------------------------------

    def learn_one(self, x: Sample, y: bool) -> None:
        xv = self._vectorize(x)
        self.learn_vec(xv, bool(y), 1.0)

    def predict_proba_one(self, x: Sample) -> ClassDistribution:
        return self.proba_vec(self._vectorize(x))

    # -- dense-vector path (shared with the forest) -------------------------

    def _vectorize(self, x: Sample) -> np.ndarray:
        for name in x:
            if name not in self.registry.index:
                self.registry.add(name)
        xv = np.zeros(len(self.registry), dtype=np.intp)
        for name, value in x.items():
            if value:
                xv[self.registry.index[name]] = 1
        return xv

    def learn_vec(self, xv: np.ndarray, y: bool, w: float) -> None:
        if self.adaptive:
            self._learn_at(self.root, xv, int(y), w, self._set_root)
        else:
            self._learn_fast(xv, int(y), w)

    def proba_vec(self, xv: np.ndarray) -> ClassDistribution:
        leaf = self._descend(self.root, xv)
        p0, p1 = leaf.proba(xv, self.leaf_prediction)
        return {False: p0, True: p1}

    def predict_vec(self, xv: np.ndarray) -> bool:
        return self._descend(self.root, xv).predict(xv, self.leaf_prediction)

    # -- internals ----------------------------------------------------------

    def _set_root(self, node) -> None:
        self.root = node

    def _descend(self, node, xv: np.ndarray) -> _Leaf:
        while isinstance(node, _Split):
            v = xv[node.feature] if node.feature < len(xv) else 0
            node = node.children[v]
        return node

    def _subtree_predict(self, node, xv: np.ndarray) -> bool:
        return self._descend(node, xv).predict(xv, self.leaf_prediction)

    def _learn_fast(self, xv: np.ndarray, y: int, w: float) -> None:
        """Iterative learn path used when subtree drift handling is off."""
        node = self.root
        parent: Optional[_Split] = None
        branch = 0
        while isinstance(node, _Split):
            parent = node
            branch = xv[node.feature] if node.feature < len(xv) else 0
            node = node.children[branch]
        node.update(xv, y, w, self.leaf_prediction)
        if self._should_attempt(node):
            split = self._attempt_split(node)
            if split is not None:
                if parent is None:
                    self.root = split
                else:
                    parent.children[branch] = split

    def _learn_at(self, node, xv: np.ndarray, y: int, w: float, setter) -> None:
        if isinstance(node, _Split):
            if self._monitor(node, xv, y, w, setter):
                # subtree was swapped for its alternate, which already
                # consumed this sample inside the monitor
                return
            v = xv[node.feature] if node.feature < len(xv) else 0

            def set_child(new, _node=node, _v=v):
                _node.children[_v] = new

            self._learn_at(node.children[v], xv, y, w, set_child)
        else:
            node.update(xv, y, w, self.leaf_prediction)
            if self._should_attempt(node):
                split = self._attempt_split(node)
                if split is not None:
                    setter(split)

    def _should_attempt(self, leaf: _Leaf) -> bool:
        # grace spacing counts observations, not sample weight, so weighted
        # replay (online bagging) does not trigger split attempts every step
        if (
            leaf.samples_seen - leaf.samples_at_last_attempt >= self.grace_period
            and leaf.depth < self.max_depth
            and self.node_count < self.max_nodes
        ):
            leaf.samples_at_last_attempt = leaf.samples_seen
            return True
        return False

    def _monitor(self, node: _Split, xv: np.ndarray, y: int, w: float, setter) -> bool:
        """Drift bookkeeping for one split node; True if it was replaced."""
        if node.adwin is None:
            node.adwin = Adwin(self.drift_delta)
        err = 0.0 if int(self._subtree_predict(node, xv)) == y else 1.0
        changed = node.adwin.update(err)
        if changed and node.alt is None:
            node.alt = _Leaf(node.depth, len(self.registry))
            node.alt_adwin = Adwin(self.drift_delta)
            self.node_count += 1
        if node.alt is not None:
            alt_err = 0.0 if int(self._subtree_predict(node.alt, xv)) == y else 1.0
            node.alt_adwin.update(alt_err)

            def set_alt(new, _node=node):
                _node.alt = new

            self._learn_at(node.alt, xv, y, w, set_alt)
            if (
                node.alt_adwin.width >= 4 * self.grace_period
                and node.adwin.width >= 4 * self.grace_period
            ):
                if node.alt_adwin.estimate < node.adwin.estimate:
                    setter(node.alt)  # alternate wins: replace the subtree
                    node.alt = None
                    return True
                elif node.alt_adwin.estimate > node.adwin.estimate + 0.05:
                    node.alt = None  # alternate is clearly worse: discard
        return False

    def _candidate_features(self, n_features: int) -> np.ndarray:
        if self.subspace_size is None or n_features == 0:
            return _arange(n_features)
        if self.subspace_size == "sqrt":
            m = max(1, round(math.sqrt(n_features)))
        else:
            m = min(int(self.subspace_size), n_features)
        return self.rng.choice(n_features, size=m, replace=False)

    def _attempt_split(self, leaf: _Leaf) -> Optional[_Split]:
        leaf.grow(len(self.registry))
        n_features = leaf.stats.shape[0]
        if n_features == 0:
            return None
        candidates = self._candidate_features(n_features)
        stats = leaf.stats[candidates]               # (m, 2, 2)
        branch_n = stats.sum(axis=2)                 # (m, 2)
        totals = branch_n.sum(axis=1)                # (m,)
        if not (totals > 0).any():
            return None
        parent_h = _entropy_rows(stats.sum(axis=1))  # (m,)
        child_h = _entropy_rows(stats)               # (m, 2)
        with np.errstate(invalid="ignore"):
            weights = branch_n / np.where(totals > 0, totals, 1)[:, None]
        gains = np.where(totals > 0, parent_h - (weights * child_h).sum(axis=1), 0.0)

        order = np.argsort(gains)[::-1]
        best = float(gains[order[0]])
        second = float(gains[order[1]]) if len(order) > 1 else 0.0
        n_total = float(leaf.counts.sum())
        eps = math.sqrt(math.log(1.0 / self.delta) / (2.0 * n_total))
        if best <= 1e-12:
            return None
        if (best - second > eps) or (eps < self.tie_threshold):
            feature = int(candidates[order[0]])
            children = [
                _Leaf(leaf.depth + 1, n_features, counts=leaf.stats[feature, v].copy())
                for v in (0, 1)
            ]
            split = _Split(feature, children, leaf.depth, self.drift_delta, self.adaptive)
            self.node_count += 2  # one leaf became a split plus two leaves
            self.max_depth_seen = max(self.max_depth_seen, leaf.depth + 1)
            return split
        return None
