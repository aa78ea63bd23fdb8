"""Independent reference implementations used to cross-check the library.

Everything here is deliberately built from different primitives than the
package: direct counting sweeps instead of searchsorted, scipy closed forms,
and explicit Python loops instead of vectorized linear algebra. Keep these
frozen; if a library change disagrees with an oracle, suspect the library.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import norm


def eer_midpoint_oracle(scores, labels) -> float:
    """Brute-force EER: sweep thresholds below, between, and above the
    distinct scores, count errors directly, then interpolate the first
    fnr/fpr crossing."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    distinct = sorted(set(scores.tolist()))
    thresholds = [distinct[0] - 1.0]
    for a, b in zip(distinct[:-1], distinct[1:]):
        thresholds.append((a + b) / 2.0)
    thresholds.append(distinct[-1] + 1.0)

    n_spoof = int(np.sum(labels == 0))
    n_bona = int(np.sum(labels == 1))
    points = []
    for thr in thresholds:
        fp = int(np.sum((labels == 0) & (scores >= thr)))
        fn = int(np.sum((labels == 1) & (scores < thr)))
        points.append((fp / n_spoof, fn / n_bona))

    prev_fpr, prev_fnr = points[0]
    for fpr, fnr in points[1:]:
        d = fnr - fpr
        if d >= 0.0:
            if d == 0.0:
                return fpr
            d_prev = prev_fnr - prev_fpr
            lam = -d_prev / (d - d_prev)
            return prev_fpr + lam * (fpr - prev_fpr)
        prev_fpr, prev_fnr = fpr, fnr
    return 1.0  # unreachable for valid inputs: the last point has d = 1


def gnb_score_oracle(Xtr, ytr, Xte, var_smoothing: float) -> np.ndarray:
    """Closed-form naive-Bayes log-likelihood ratio via scipy's normal pdf."""
    Xtr = np.asarray(Xtr, dtype=np.float64)
    eps = var_smoothing * float(np.var(Xtr, axis=0).max())
    out = np.zeros(len(Xte))
    for c, sign in ((1, +1.0), (0, -1.0)):
        Xc = Xtr[ytr == c]
        mean = Xc.mean(axis=0)
        std = np.sqrt(Xc.var(axis=0) + eps)
        prior = Xc.shape[0] / Xtr.shape[0]
        ll = norm.logpdf(Xte, loc=mean, scale=std).sum(axis=1) + math.log(prior)
        out += sign * ll
    return out


def svm_score_oracle(support_vectors, dual_coef, bias, gamma, X) -> np.ndarray:
    """Decision scores by explicit per-pair kernel summation."""
    out = np.empty(len(X))
    for r, x in enumerate(np.asarray(X, dtype=np.float64)):
        acc = bias
        for sv, coef in zip(support_vectors, dual_coef):
            diff = sv - x
            acc += coef * math.exp(-gamma * float(diff @ diff))
        out[r] = acc
    return out


def central_difference(f, x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient of scalar f at flat vector x."""
    grad = np.empty_like(x)
    for i in range(x.size):
        x[i] += eps
        hi = f()
        x[i] -= 2 * eps
        lo = f()
        x[i] += eps
        grad[i] = (hi - lo) / (2 * eps)
    return grad


def make_gaussian_task(seed: int, n_train: int, n_dev: int, n_eval: int,
                       dim: int = 768, bayes_z: float = 2.326,
                       sigma: float = 0.2):
    """Two isotropic Gaussians at +/-mu with Bayes error Phi(-bayes_z).

    sigma sets the feature scale (Bayes error is scale-free); 0.2 puts the
    default C grids in a sensible regularization range for this geometry.
    """
    rng = np.random.default_rng(seed)
    mu = np.full(dim, bayes_z * sigma / np.sqrt(dim))

    def draw(n):
        y = rng.integers(0, 2, n)
        X = sigma * rng.normal(size=(n, dim))
        X += np.where(y[:, None] == 1, mu, -mu)
        return X, y.astype(np.int8)

    return draw(n_train), draw(n_dev), draw(n_eval)
