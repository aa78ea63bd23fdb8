"""Utterance-level features: temporal mean pooling of frame embeddings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UsageError
from .store import EmbeddingRecord, Label, LayerDataset


@dataclass(frozen=True)
class PooledVector:
    """A single utterance embedding: the mean over frames of one layer."""

    utt_id: str
    layer: int
    values: np.ndarray  # float64, shape (dim,)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def mean_pool(record: EmbeddingRecord) -> PooledVector:
    """Average the frame axis. Accumulation is float64 regardless of input."""
    pooled = record.values.astype(np.float64).mean(axis=0)
    return PooledVector(record.utt_id, record.layer, pooled)


def pool_records(records: Sequence[EmbeddingRecord]) -> list[PooledVector]:
    return [mean_pool(r) for r in records]


def design_matrix(dataset: LayerDataset) -> tuple[np.ndarray, np.ndarray]:
    """Stack a pooled LayerDataset into (X, y) float64/int8 training arrays.

    y uses the label encoding 0 = spoof, 1 = bonafide; every item must be
    labeled (eval sets with unknown labels are scored, not fitted).
    """
    if len(dataset) == 0:
        raise UsageError("empty dataset")
    rows = []
    for item in dataset.items:
        vec = item.features
        if not isinstance(vec, PooledVector):
            raise UsageError(
                f"{item.utt_id}: expected pooled features, got {type(vec).__name__}")
        rows.append(vec.values)
    X = np.vstack(rows)
    if any(it.label is Label.UNKNOWN for it in dataset.items):
        bad = [it.utt_id for it in dataset.items if it.label is Label.UNKNOWN]
        raise UsageError(f"unlabeled items in design matrix: {bad[:5]}")
    y = np.array([int(it.label) for it in dataset.items], dtype=np.int8)
    return X, y
