"""L2-regularized logistic regression, trained by full-batch descent."""

from __future__ import annotations

import numpy as np

from ..errors import UsageError
from .base import Classifier, check_training_set, expit, register


def _loss_grad(w, b, X, y, inv_c):
    """Summed logistic loss + (1/(2C))||w||^2, with its exact gradient.

    The per-sample loss is log(1 + exp(-m z)) with m = +/-1 and z = Xw + b;
    logaddexp keeps the large-|z| tails finite. The bias is not penalized.
    """
    z = X @ w + b
    m = 2.0 * y - 1.0
    loss = float(np.logaddexp(0.0, -m * z).sum()) + 0.5 * inv_c * float(w @ w)
    r = expit(z) - y  # d loss / d z
    gw = X.T @ r + inv_c * w
    gb = float(r.sum())
    return loss, gw, gb


@register
class LogisticRegression(Classifier):
    """Full-batch gradient descent with Armijo backtracking line search.

    Stops when the gradient norm (weights and bias jointly) drops to `tol`
    or after `max_iter` steps. The regularizer is (1/(2C))||w||^2 on the
    summed loss, so larger C means a weaker pull toward zero.
    """

    name = "logreg"
    default_threshold = 0.5

    def __init__(self, C: float = 1.0, tol: float = 1e-6, max_iter: int = 10_000,
                 seed: int = 0):
        super().__init__(seed)
        if C <= 0:
            raise UsageError("C must be positive")
        self.C = float(C)
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.w = None
        self.b = 0.0
        self.n_iter = 0
        self.grad_norm = np.inf

    def fit(self, X, y, dev=None):
        X, y = check_training_set(X, y)
        y = y.astype(np.float64)
        inv_c = 1.0 / self.C
        w = np.zeros(X.shape[1])
        b = 0.0
        loss, gw, gb = _loss_grad(w, b, X, y, inv_c)
        step = 1.0
        for it in range(self.max_iter):
            gnorm2 = float(gw @ gw) + gb * gb
            self.grad_norm = gnorm2 ** 0.5
            self.n_iter = it
            if self.grad_norm <= self.tol:
                break
            # Armijo backtracking: shrink until the sufficient-decrease
            # condition holds, reusing twice the accepted step next round.
            step = min(2.0 * step, 1.0)
            for _ in range(60):
                w_try = w - step * gw
                b_try = b - step * gb
                loss_try, gw_try, gb_try = _loss_grad(w_try, b_try, X, y, inv_c)
                if loss_try <= loss - 1e-4 * step * gnorm2:
                    break
                step *= 0.5
            else:
                break  # no acceptable step at float resolution
            w, b, loss, gw, gb = w_try, b_try, loss_try, gw_try, gb_try
        else:
            gnorm2 = float(gw @ gw) + gb * gb
            self.grad_norm = gnorm2 ** 0.5
            self.n_iter = self.max_iter
        self.w = w
        self.b = b
        return self

    def decision_scores(self, X):
        if self.w is None:
            raise UsageError("decision_scores before fit")
        X = np.asarray(X, dtype=np.float64)
        return expit(X @ self.w + self.b)

    def param_count(self):
        return int(self.w.shape[0]) + 1

    def get_params(self):
        return {"C": self.C, "tol": self.tol, "max_iter": self.max_iter}
