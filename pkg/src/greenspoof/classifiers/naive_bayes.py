"""Gaussian naive Bayes with variance smoothing."""

from __future__ import annotations

import numpy as np

from ..errors import UsageError
from .base import Classifier, check_training_set, register


@register
class GaussianNB(Classifier):
    """Per-class diagonal Gaussians fit by maximum likelihood.

    Variances are population variances (ddof 0), lifted by
    var_smoothing * max over dimensions of the overall population variance
    so that constant dimensions stay finite. The decision score is the
    bonafide-vs-spoof log-likelihood ratio including the class priors.
    """

    name = "gnb"
    default_threshold = 0.0

    def __init__(self, var_smoothing: float = 1e-9, seed: int = 0):
        super().__init__(seed)
        if var_smoothing < 0:
            raise UsageError("var_smoothing must be >= 0")
        self.var_smoothing = float(var_smoothing)
        self.theta = None   # (2, dim) class means
        self.var = None     # (2, dim) smoothed class variances
        self.log_prior = None

    def fit(self, X, y, dev=None):
        X, y = check_training_set(X, y)
        eps = self.var_smoothing * float(X.var(axis=0).max())
        theta = np.empty((2, X.shape[1]))
        var = np.empty((2, X.shape[1]))
        prior = np.empty(2)
        for c in (0, 1):
            Xc = X[y == c]
            theta[c] = Xc.mean(axis=0)
            var[c] = Xc.var(axis=0) + eps
            prior[c] = Xc.shape[0] / X.shape[0]
        if np.any(var <= 0):
            raise UsageError("zero variance; increase var_smoothing")
        self.theta = theta
        self.var = var
        self.log_prior = np.log(prior)
        return self

    def _joint_log_likelihood(self, X, c):
        dev = X - self.theta[c]
        ll = -0.5 * np.sum(np.log(2.0 * np.pi * self.var[c]))
        ll = ll - 0.5 * np.sum(dev * dev / self.var[c], axis=1)
        return ll + self.log_prior[c]

    def decision_scores(self, X):
        if self.theta is None:
            raise UsageError("decision_scores before fit")
        X = np.asarray(X, dtype=np.float64)
        return self._joint_log_likelihood(X, 1) - self._joint_log_likelihood(X, 0)

    def param_count(self):
        # Means and variances for both classes plus the two priors.
        return 4 * int(self.theta.shape[1]) + 2

    def get_params(self):
        return {"var_smoothing": self.var_smoothing}
