"""Versioned model checkpoints.

A checkpoint bundles the trained learner with the frozen selector threshold
and variance tracker, so a live session reproduces replay-time behavior
exactly.  The format is a small binary envelope (magic + version) around a
pickled payload; weight-based learners round-trip exactly, trees round-trip
structurally.
"""

from __future__ import annotations

import pickle
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .encoding import EncodedSample
from .learners import OnlineClassifier
from .selection import StreamSelector, VarianceTracker, select_features

MAGIC = b"PPDCKPT"
VERSION = 1


class CheckpointError(RuntimeError):
    pass


@dataclass
class Checkpoint:
    model_kind: str
    learner: OnlineClassifier
    tracker: VarianceTracker
    threshold: float

    def transform(self, sample: EncodedSample) -> EncodedSample:
        """Apply the frozen variance filter (without updating the tracker)."""
        return select_features(sample, self.tracker, self.threshold)


def save_checkpoint(path: str | Path, checkpoint: Checkpoint) -> None:
    payload = pickle.dumps(
        {
            "model_kind": checkpoint.model_kind,
            "learner": checkpoint.learner,
            "tracker": checkpoint.tracker,
            "threshold": checkpoint.threshold,
        },
        protocol=pickle.HIGHEST_PROTOCOL,
    )
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(VERSION.to_bytes(2, "big"))
        fh.write(payload)


def load_checkpoint(path: str | Path) -> Checkpoint:
    with open(path, "rb") as fh:
        header = fh.read(len(MAGIC))
        if header != MAGIC:
            raise CheckpointError(f"{path}: not a checkpoint file")
        version = int.from_bytes(fh.read(2), "big")
        if version != VERSION:
            raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
        data = pickle.loads(fh.read())
    return Checkpoint(
        model_kind=data["model_kind"],
        learner=data["learner"],
        tracker=data["tracker"],
        threshold=data["threshold"],
    )


def checkpoint_from_selector(
    model_kind: str, learner: OnlineClassifier, selector: StreamSelector
) -> Checkpoint:
    if selector.threshold is None:
        raise CheckpointError("selector threshold not frozen yet")
    return Checkpoint(model_kind, learner, selector.tracker, selector.threshold)
