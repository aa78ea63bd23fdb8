"""Shared classifier interface, registry, and small numeric helpers."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from ..errors import UsageError


def expit(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function for float arrays."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def pairwise_sq_dists(A: np.ndarray, B: np.ndarray, *, same: bool = False) -> np.ndarray:
    """Squared euclidean distances between rows of A and rows of B.

    Computed via the expanded form, so tiny negatives from cancellation are
    clipped to zero; with same=True (B is A) the diagonal is forced to zero.
    """
    a2 = np.einsum("ij,ij->i", A, A)
    b2 = a2 if same else np.einsum("ij,ij->i", B, B)
    d = a2[:, None] + b2[None, :] - 2.0 * (A @ B.T)
    np.maximum(d, 0.0, out=d)
    if same:
        np.fill_diagonal(d, 0.0)
    return d


def check_training_set(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] < 2:
        raise UsageError("training X must be 2-D with at least two rows")
    if y.shape != (X.shape[0],):
        raise UsageError("y must be 1-D and aligned with X rows")
    if not np.isin(y, (0, 1)).all():
        raise UsageError("training labels must be 0 (spoof) or 1 (bonafide)")
    if len(np.unique(y)) < 2:
        raise UsageError("training set needs both classes")
    return X, y.astype(np.int8)


class Classifier(ABC):
    """Binary spoof/bonafide classifier over utterance embedding vectors.

    `decision_scores` returns higher-is-more-bonafide values and
    `default_threshold` is the accept threshold those scores are calibrated
    against (0.5 for probability-like scores, 0.0 for margins).
    """

    name: str = ""
    default_threshold: float = 0.5

    def __init__(self, seed: int = 0):
        self.seed = int(seed)

    @abstractmethod
    def fit(self, X: np.ndarray, y: np.ndarray,
            dev: Optional[tuple[np.ndarray, np.ndarray]] = None) -> "Classifier":
        """Train on (X, y); `dev` is an optional held-out set some models
        monitor for early stopping. Returns self."""

    @abstractmethod
    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        """Score each row of X; higher means more bonafide."""

    @abstractmethod
    def param_count(self) -> int:
        """Number of learned parameters held by the fitted model."""

    @abstractmethod
    def get_params(self) -> dict:
        """Hyperparameters as a plain JSON-compatible dict."""

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision_scores(X) >= self.default_threshold).astype(np.int8)


ALGORITHMS: dict[str, type] = {}


def register(cls):
    """Class decorator adding a Classifier subclass to the registry."""
    if not cls.name:
        raise ValueError(f"{cls.__name__} has no name")
    ALGORITHMS[cls.name] = cls
    return cls


def make_classifier(algo: str, params: dict, seed: int = 0) -> Classifier:
    try:
        cls = ALGORITHMS[algo]
    except KeyError:
        raise UsageError(
            f"unknown algorithm {algo!r}; known: {sorted(ALGORITHMS)}") from None
    try:
        return cls(seed=seed, **params)
    except TypeError as exc:
        raise UsageError(f"bad parameters for {algo}: {exc}") from None
