"""Soft-margin SVM with an RBF kernel, trained by SMO."""

from __future__ import annotations

from collections import OrderedDict

import numpy as np

from .._kernels import numpy_backend, smo_solve
from ..errors import RunError, UsageError
from .base import Classifier, check_training_set, pairwise_sq_dists, register


def resolve_gamma(gamma, X: np.ndarray) -> float:
    """'scale' maps to 1 / (dim * mean per-dimension population variance)."""
    if gamma == "scale":
        mean_var = float(np.mean(X.var(axis=0)))
        if mean_var <= 0:
            raise UsageError("gamma='scale' needs non-constant features")
        return 1.0 / (X.shape[1] * mean_var)
    gamma = float(gamma)
    if gamma <= 0:
        raise UsageError("gamma must be positive")
    return gamma


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float, *,
               same: bool = False) -> np.ndarray:
    d = pairwise_sq_dists(A, B, same=same)
    np.multiply(d, -gamma, out=d)
    np.exp(d, out=d)
    return d


class _RowCache:
    """LRU cache of kernel rows for training sets whose full Gram matrix
    does not fit the cache budget."""

    def __init__(self, X, gamma, max_rows):
        self._X = X
        self._sq = np.einsum("ij,ij->i", X, X)
        self._gamma = gamma
        self._max_rows = max(2, max_rows)
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()

    def row(self, i: int) -> np.ndarray:
        cached = self._rows.get(i)
        if cached is not None:
            self._rows.move_to_end(i)
            return cached
        d = self._sq[i] + self._sq - 2.0 * (self._X @ self._X[i])
        np.maximum(d, 0.0, out=d)
        d[i] = 0.0
        np.multiply(d, -self._gamma, out=d)
        np.exp(d, out=d)
        while len(self._rows) >= self._max_rows:
            self._rows.popitem(last=False)
        self._rows[i] = d
        return d


def _smo_solve_rows(row, n, y, C, tol, max_iter):
    """Row-at-a-time variant of the SMO loop for out-of-budget kernels.

    Follows the same update arithmetic as the dense backends, but fetches
    kernel rows lazily (`row(i)`), so results can differ from the dense
    path in the last bits: matrix-vector and matrix-matrix kernel
    evaluations round differently.
    """
    alpha = np.zeros(n, dtype=np.float64)
    F = -y
    diag = np.ones(n)  # RBF kernel diagonal
    iters = 0
    converged = False
    while True:
        up = ((y > 0.0) & (alpha < C)) | ((y < 0.0) & (alpha > 0.0))
        low = ((y > 0.0) & (alpha > 0.0)) | ((y < 0.0) & (alpha < C))
        if not up.any() or not low.any():
            converged = True
            break
        i = int(np.argmin(np.where(up, F, np.inf)))
        j = int(np.argmax(np.where(low, F, -np.inf)))
        if F[j] - F[i] <= tol:
            converged = True
            break
        if iters >= max_iter:
            break
        Ki = row(i)
        Kj = row(j)
        Fi = float(F[i])
        Fj = float(F[j])
        yi = float(y[i])
        yj = float(y[j])
        ai_old = float(alpha[i])
        aj_old = float(alpha[j])
        eta = float(diag[i]) + float(diag[j]) - 2.0 * float(Ki[j])
        if eta < 1e-12:
            eta = 1e-12
        aj = aj_old + yj * (Fi - Fj) / eta
        # Same exact-bound handling as the dense backends: a clipped step
        # must leave the binding variable exactly on 0 or C.
        if yi == yj:
            total = ai_old + aj_old
            lo = max(0.0, total - C)
            hi = min(C, total)
            if aj >= hi:
                aj = hi
                ai = total - C if hi == C else 0.0
            elif aj <= lo:
                aj = lo
                ai = C if lo > 0.0 else total
            else:
                ai = total - aj
        else:
            dd = aj_old - ai_old
            lo = max(0.0, dd)
            hi = min(C, C + dd)
            if aj >= hi:
                aj = hi
                ai = C - dd if hi == C else C
            elif aj <= lo:
                aj = lo
                ai = 0.0 if lo > 0.0 else -dd
            else:
                ai = aj - dd
        if aj == aj_old:
            break
        alpha[i] = ai
        alpha[j] = aj
        F += (yi * (ai - ai_old)) * Ki + (yj * (aj - aj_old)) * Kj
        iters += 1
    return alpha, F, iters, converged


def kkt_violation(F: np.ndarray, y: np.ndarray, alpha: np.ndarray,
                  C: float) -> float:
    """Max-violating-pair gap b_low - b_up; <= tol at an accepted solution."""
    up = ((y > 0.0) & (alpha < C)) | ((y < 0.0) & (alpha > 0.0))
    low = ((y > 0.0) & (alpha > 0.0)) | ((y < 0.0) & (alpha < C))
    if not up.any() or not low.any():
        return 0.0
    return float(np.max(F[low]) - np.min(F[up]))


@register
class SVC(Classifier):
    """RBF-kernel SVM solved by maximally-violating-pair SMO.

    When the full Gram matrix fits within cache_mb the dense kernel backend
    runs (compiled when available); otherwise a row-cached loop computes
    kernel rows on demand. tol bounds the final KKT violation.
    """

    name = "svm"
    default_threshold = 0.0

    def __init__(self, C: float = 1.0, gamma="scale", tol: float = 1e-3,
                 max_iter: int = 10_000_000, cache_mb: int = 1024, seed: int = 0):
        super().__init__(seed)
        if C <= 0:
            raise UsageError("C must be positive")
        self.C = float(C)
        self.gamma = gamma
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.cache_mb = int(cache_mb)
        self.gamma_ = None
        self.support_ = None
        self.support_vectors_ = None
        self.dual_coef_ = None  # alpha_i * y_i on the support set
        self.bias_ = 0.0
        self.n_iter = 0
        self.converged = False
        self._last_F = None
        self._last_alpha = None
        self._y_pm = None

    def fit(self, X, y, dev=None):
        X, y01 = check_training_set(X, y)
        n = X.shape[0]
        self.gamma_ = resolve_gamma(self.gamma, X)
        y_pm = (2.0 * y01 - 1.0).astype(np.float64)

        budget = self.cache_mb * (1 << 20)
        if n * n * 8 <= budget:
            K = rbf_kernel(X, X, self.gamma_, same=True)
            alpha, F, iters, converged = smo_solve(
                K, y_pm, self.C, self.tol, self.max_iter)
        else:
            cache = _RowCache(X, self.gamma_, budget // (n * 8))
            alpha, F, iters, converged = _smo_solve_rows(
                cache.row, n, y_pm, self.C, self.tol, self.max_iter)
        if not converged:
            raise RunError(f"SMO did not converge within {self.max_iter} updates")

        self.n_iter = iters
        self.converged = converged
        self._last_F = F
        self._last_alpha = alpha
        self._y_pm = y_pm
        self.bias_ = self._compute_bias(F, y_pm, alpha)
        sv = np.nonzero(alpha > 0.0)[0]
        self.support_ = sv
        self.support_vectors_ = X[sv]
        self.dual_coef_ = alpha[sv] * y_pm[sv]
        return self

    def _compute_bias(self, F, y, alpha):
        # Unbounded support vectors pin the bias exactly; if every alpha sits
        # at a bound, take the midpoint of the optimality interval.
        unbounded = (alpha > 0.0) & (alpha < self.C)
        if unbounded.any():
            return float(-np.mean(F[unbounded]))
        up = ((y > 0.0) & (alpha < self.C)) | ((y < 0.0) & (alpha > 0.0))
        low = ((y > 0.0) & (alpha > 0.0)) | ((y < 0.0) & (alpha < self.C))
        b_up = float(np.min(F[up])) if up.any() else 0.0
        b_low = float(np.max(F[low])) if low.any() else 0.0
        return -(b_up + b_low) / 2.0

    def decision_scores(self, X):
        if self.support_vectors_ is None:
            raise UsageError("decision_scores before fit")
        X = np.ascontiguousarray(X, dtype=np.float64)
        scores = np.full(X.shape[0], self.bias_)
        chunk = max(1, (64 << 20) // max(1, 8 * self.support_vectors_.shape[0]))
        for start in range(0, X.shape[0], chunk):
            block = X[start:start + chunk]
            K = rbf_kernel(block, self.support_vectors_, self.gamma_)
            scores[start:start + chunk] += K @ self.dual_coef_
        return scores

    def dual_objective(self) -> float:
        """sum(alpha) - 0.5 * alpha^T Q alpha, from the cached margin errors.

        Uses the identity sum_t a_t y_t (F_t + y_t) = alpha^T Q alpha, since
        F_t + y_t is the unbiased decision value at training point t.
        """
        a, F = self._last_alpha, self._last_F
        if a is None:
            raise UsageError("dual_objective before fit")
        return float(a.sum() - 0.5 * np.sum(a * self._y_pm * (F + self._y_pm)))

    def param_count(self):
        return int(self.support_.shape[0]) + 1

    def get_params(self):
        return {"C": self.C, "gamma": self.gamma, "tol": self.tol,
                "cache_mb": self.cache_mb}
