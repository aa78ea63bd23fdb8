"""Binary CART decision tree with exact boundary scans."""

from __future__ import annotations

import numpy as np

from .._kernels import tree_best_split
from ..errors import UsageError
from .base import Classifier, check_training_set, register

_CRITERIA = {"gini": 0, "entropy": 1}


@register
class DecisionTree(Classifier):
    """Greedy impurity-minimizing tree on presorted feature columns.

    Every impure node is split as long as depth allows and some feature
    varies, even when the best split leaves the weighted impurity unchanged;
    equal-impurity splits resolve to the lowest feature index, then the
    lowest threshold. Thresholds are midpoints between consecutive distinct
    values and the predicate x <= threshold routes left. Leaves score the
    bonafide fraction of their training rows.
    """

    name = "tree"
    default_threshold = 0.5

    def __init__(self, criterion: str = "gini", max_depth: int | None = None,
                 seed: int = 0):
        super().__init__(seed)
        if criterion not in _CRITERIA:
            raise UsageError(f"criterion must be one of {sorted(_CRITERIA)}")
        if max_depth is not None and max_depth < 1:
            raise UsageError("max_depth must be >= 1")
        self.criterion = criterion
        self.max_depth = max_depth
        self.feature = None    # int32, -1 at leaves
        self.threshold = None  # float64, nan at leaves
        self.left = None
        self.right = None
        self.value = None      # bonafide fraction at every node

    def fit(self, X, y, dev=None):
        X, y = check_training_set(X, y)
        labels = y.astype(np.uint8)
        crit = _CRITERIA[self.criterion]
        if crit == 1:
            # One log2 table for the whole fit; both kernel backends index
            # it instead of calling their own log2, which keeps them aligned.
            table = np.empty(X.shape[0] + 1, dtype=np.float64)
            table[0] = 0.0
            table[1:] = np.log2(np.arange(1, X.shape[0] + 1, dtype=np.float64))
        else:
            table = np.empty(0, dtype=np.float64)
        depth_cap = self.max_depth if self.max_depth is not None else np.inf

        feature, threshold, left, right, value = [], [], [], [], []
        # Preorder build; the stack holds (row indices, depth, parent slot).
        stack = [(np.arange(X.shape[0]), 0, -1, False)]
        while stack:
            idx, depth, parent, is_right = stack.pop()
            node_id = len(feature)
            if parent >= 0:
                (right if is_right else left)[parent] = node_id
            pos = int(labels[idx].sum())
            m = idx.shape[0]
            feature.append(-1)
            threshold.append(np.nan)
            left.append(-1)
            right.append(-1)
            value.append(pos / m)
            if depth >= depth_cap or pos == 0 or pos == m:
                continue
            Xn = X[idx]
            order = np.argsort(Xn, axis=0, kind="stable")
            vals = np.ascontiguousarray(np.take_along_axis(Xn, order, axis=0))
            labs = np.ascontiguousarray(labels[idx][order])
            f, t, _score = tree_best_split(vals, labs, crit, table)
            if f < 0:  # every feature constant on this node
                continue
            v0 = float(vals[t, f])
            v1 = float(vals[t + 1, f])
            thr = v0 + (v1 - v0) / 2.0
            if thr >= v1:  # midpoint rounded up between adjacent floats
                thr = v0
            go_left = Xn[:, f] <= thr
            feature[node_id] = f
            threshold[node_id] = thr
            stack.append((idx[~go_left], depth + 1, node_id, True))
            stack.append((idx[go_left], depth + 1, node_id, False))

        self.feature = np.array(feature, dtype=np.int32)
        self.threshold = np.array(threshold, dtype=np.float64)
        self.left = np.array(left, dtype=np.int32)
        self.right = np.array(right, dtype=np.int32)
        self.value = np.array(value, dtype=np.float64)
        return self

    def decision_scores(self, X):
        if self.feature is None:
            raise UsageError("decision_scores before fit")
        X = np.asarray(X, dtype=np.float64)
        cur = np.zeros(X.shape[0], dtype=np.int32)
        while True:
            at_internal = np.nonzero(self.feature[cur] >= 0)[0]
            if at_internal.size == 0:
                break
            nodes = cur[at_internal]
            go_left = X[at_internal, self.feature[nodes]] <= self.threshold[nodes]
            cur[at_internal] = np.where(go_left, self.left[nodes], self.right[nodes])
        return self.value[cur]

    @property
    def node_count(self) -> int:
        return int(self.feature.shape[0])

    def param_count(self):
        internal = int(np.sum(self.feature >= 0))
        leaves = self.node_count - internal
        return 2 * internal + leaves

    def get_params(self):
        return {"criterion": self.criterion, "max_depth": self.max_depth}
