"""Detection metrics: DET curve, equal error rate, F1.

Conventions used throughout:

* bonafide is the positive class (label 1), spoof is negative (label 0);
* an utterance is accepted as bonafide iff its score >= threshold;
* fpr(t) = fraction of spoof scores >= t, fnr(t) = fraction of bonafide
  scores < t.

The EER is read off the DET curve traced over the threshold sequence
(-inf, each distinct score ascending, +inf). Along that sequence
d(t) = fnr(t) - fpr(t) is non-decreasing from -1 to +1; the EER sits where
d crosses zero, linearly interpolated between the bracketing curve points
when no point hits zero exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError


@dataclass(frozen=True)
class ScoredSet:
    """Scores plus ground-truth labels for one evaluation set."""

    scores: np.ndarray
    labels: np.ndarray
    utt_ids: tuple[str, ...] = field(default=())

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        labels = np.asarray(self.labels)
        if scores.ndim != 1 or labels.shape != scores.shape:
            raise UsageError("scores and labels must be matching 1-D arrays")
        if not np.isfinite(scores).all():
            raise UsageError("non-finite scores")
        if not np.isin(labels, (0, 1)).all():
            raise UsageError("labels must be 0 (spoof) or 1 (bonafide)")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels.astype(np.int8))

    def eer(self) -> float:
        return eer(self.scores, self.labels)

    def f1(self, threshold: float) -> float:
        return f1_score(self.scores, self.labels, threshold)


@dataclass(frozen=True)
class DetCurve:
    thresholds: np.ndarray  # ascending, first -inf, last +inf
    fpr: np.ndarray         # non-increasing, fpr[0] = 1, fpr[-1] = 0
    fnr: np.ndarray         # non-decreasing, fnr[0] = 0, fnr[-1] = 1


def det_curve(scores: np.ndarray, labels: np.ndarray) -> DetCurve:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    bona = np.sort(scores[labels == 1])
    spoof = np.sort(scores[labels == 0])
    if bona.size == 0 or spoof.size == 0:
        raise UsageError("DET curve needs at least one score from each class")

    inner = np.unique(scores)
    thresholds = np.concatenate(([-np.inf], inner, [np.inf]))
    # Counts via binary search on the per-class sorted score arrays:
    # spoof >= t accepted (false positives), bonafide < t rejected (misses).
    fp = spoof.size - np.searchsorted(spoof, thresholds, side="left")
    fn = np.searchsorted(bona, thresholds, side="left")
    return DetCurve(thresholds, fp / spoof.size, fn / bona.size)


def eer(scores: np.ndarray, labels: np.ndarray) -> float:
    """Equal error rate as a fraction in [0, 1]."""
    curve = det_curve(scores, labels)
    d = curve.fnr - curve.fpr
    idx = int(np.searchsorted(d, 0.0, side="left"))
    # d[0] = -1, d[-1] = +1, so 1 <= idx <= len(d) - 1 always.
    if d[idx] == 0.0:
        return float(curve.fpr[idx])
    lam = -d[idx - 1] / (d[idx] - d[idx - 1])
    return float(curve.fpr[idx - 1] + lam * (curve.fpr[idx] - curve.fpr[idx - 1]))


def confusion(scores: np.ndarray, labels: np.ndarray,
              threshold: float) -> tuple[int, int, int, int]:
    """(tp, fp, fn, tn) under accept-iff-score>=threshold."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    accept = scores >= threshold
    tp = int(np.sum(accept & (labels == 1)))
    fp = int(np.sum(accept & (labels == 0)))
    fn = int(np.sum(~accept & (labels == 1)))
    tn = int(np.sum(~accept & (labels == 0)))
    return tp, fp, fn, tn


def f1_score(scores: np.ndarray, labels: np.ndarray, threshold: float) -> float:
    """F1 for the bonafide class; 0.0 when the denominator is empty."""
    tp, fp, fn, _ = confusion(scores, labels, threshold)
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 2 * tp / denom
