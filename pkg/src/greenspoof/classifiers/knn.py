"""k-nearest-neighbour classifier (brute force, euclidean)."""

from __future__ import annotations

import numpy as np

from ..errors import UsageError
from .base import Classifier, check_training_set, pairwise_sq_dists, register


@register
class KNeighbors(Classifier):
    """Memorizes the training set; scores by the bonafide fraction among the
    k nearest training points. Distance ties resolve to the lower training
    index, which keeps predictions independent of chunking."""

    name = "knn"
    default_threshold = 0.5

    def __init__(self, k: int = 5, chunk_size: int = 256, seed: int = 0):
        super().__init__(seed)
        if k < 1:
            raise UsageError("k must be >= 1")
        self.k = int(k)
        self.chunk_size = int(chunk_size)
        self._X = None
        self._y = None

    def fit(self, X, y, dev=None):
        X, y = check_training_set(X, y)
        if self.k > X.shape[0]:
            raise UsageError(f"k={self.k} exceeds {X.shape[0]} training points")
        self._X = X
        self._y = y
        return self

    def decision_scores(self, X):
        if self._X is None:
            raise UsageError("decision_scores before fit")
        X = np.ascontiguousarray(X, dtype=np.float64)
        k = self.k
        scores = np.empty(X.shape[0], dtype=np.float64)
        for start in range(0, X.shape[0], self.chunk_size):
            block = X[start:start + self.chunk_size]
            d2 = pairwise_sq_dists(block, self._X)
            kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
            for r in range(block.shape[0]):
                cand = np.nonzero(d2[r] <= kth[r])[0]
                # Stable sort on distance keeps candidates in ascending
                # training index within each tie group.
                order = np.argsort(d2[r][cand], kind="stable")
                nearest = cand[order[:k]]
                scores[start + r] = float(np.mean(self._y[nearest]))
        return scores

    def param_count(self):
        # Nothing is learned; the model is the training data itself.
        return 0

    def get_params(self):
        return {"k": self.k}
