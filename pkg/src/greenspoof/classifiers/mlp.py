"""Single-hidden-layer perceptron trained with minibatch SGD."""

from __future__ import annotations

import numpy as np

from ..errors import UsageError
from .base import Classifier, check_training_set, expit, register

_SCHEDULES = ("constant", "invscaling")


@register
class MLP(Classifier):
    """ReLU hidden layer; one sigmoid output or a two-way softmax head.

    Plain SGD (no momentum), minibatches reshuffled each epoch, L2 penalty
    `alpha` on the weight matrices scaled by the batch size, and a Glorot
    uniform seeded init. The 'invscaling' schedule decays the step as
    lr0 / sqrt(update_count). Training stops after `max_epochs`, or earlier
    once the monitored loss (held-out when `dev` is passed to fit, else the
    running training loss) has not improved by `tol` for `patience` epochs;
    with a held-out monitor the best-epoch weights are restored.
    """

    name = "mlp"
    default_threshold = 0.5

    def __init__(self, hidden: int = 100, batch_size: int = 32,
                 learning_rate: str = "constant", lr0: float = 0.001,
                 alpha: float = 1e-4, n_outputs: int = 2,
                 max_epochs: int = 200, patience: int = 10, tol: float = 1e-4,
                 seed: int = 0):
        super().__init__(seed)
        if hidden < 1:
            raise UsageError("hidden must be >= 1")
        if batch_size < 1:
            raise UsageError("batch_size must be >= 1")
        if learning_rate not in _SCHEDULES:
            raise UsageError(f"learning_rate must be one of {_SCHEDULES}")
        if n_outputs not in (1, 2):
            raise UsageError("n_outputs must be 1 or 2")
        self.hidden = int(hidden)
        self.batch_size = int(batch_size)
        self.learning_rate = learning_rate
        self.lr0 = float(lr0)
        self.alpha = float(alpha)
        self.n_outputs = int(n_outputs)
        self.max_epochs = int(max_epochs)
        self.patience = int(patience)
        self.tol = float(tol)
        self.W1 = self.b1 = self.W2 = self.b2 = None
        self.n_epochs = 0

    # -- forward / backward ------------------------------------------------

    def _data_loss(self, Z2, y):
        """Mean cross-entropy of output activations against 0/1 labels."""
        if self.n_outputs == 1:
            z = Z2[:, 0]
            return float(np.mean(np.logaddexp(0.0, z) - y * z))
        zmax = Z2.max(axis=1, keepdims=True)
        lse = zmax[:, 0] + np.log(np.exp(Z2 - zmax).sum(axis=1))
        return float(np.mean(lse - Z2[np.arange(Z2.shape[0]), y]))

    def _forward(self, X):
        Z1 = X @ self.W1 + self.b1
        A1 = np.maximum(Z1, 0.0)
        Z2 = A1 @ self.W2 + self.b2
        return Z1, A1, Z2

    def batch_loss(self, X, y) -> float:
        """Training objective on one batch: cross-entropy plus the scaled
        L2 penalty alpha/(2m) * (||W1||^2 + ||W2||^2)."""
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        _, _, Z2 = self._forward(X)
        penalty = 0.5 * self.alpha / X.shape[0] * (
            float(np.sum(self.W1 * self.W1)) + float(np.sum(self.W2 * self.W2)))
        return self._data_loss(Z2, y) + penalty

    def batch_grad(self, X, y) -> dict[str, np.ndarray]:
        """Exact gradient of batch_loss with respect to every weight array."""
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        m = X.shape[0]
        Z1, A1, Z2 = self._forward(X)
        if self.n_outputs == 1:
            dZ2 = (expit(Z2[:, 0]) - y)[:, None] / m
        else:
            zmax = Z2.max(axis=1, keepdims=True)
            e = np.exp(Z2 - zmax)
            probs = e / e.sum(axis=1, keepdims=True)
            probs[np.arange(m), y] -= 1.0
            dZ2 = probs / m
        gW2 = A1.T @ dZ2 + (self.alpha / m) * self.W2
        gb2 = dZ2.sum(axis=0)
        dZ1 = (dZ2 @ self.W2.T) * (Z1 > 0.0)
        gW1 = X.T @ dZ1 + (self.alpha / m) * self.W1
        gb1 = dZ1.sum(axis=0)
        return {"W1": gW1, "b1": gb1, "W2": gW2, "b2": gb2}

    # -- training ----------------------------------------------------------

    def _init_weights(self, dim, rng):
        bound1 = np.sqrt(6.0 / (dim + self.hidden))
        bound2 = np.sqrt(6.0 / (self.hidden + self.n_outputs))
        self.W1 = rng.uniform(-bound1, bound1, size=(dim, self.hidden))
        self.b1 = np.zeros(self.hidden)
        self.W2 = rng.uniform(-bound2, bound2, size=(self.hidden, self.n_outputs))
        self.b2 = np.zeros(self.n_outputs)

    def fit(self, X, y, dev=None):
        X, y = check_training_set(X, y)
        y = y.astype(np.int64)
        if dev is not None:
            Xd = np.asarray(dev[0], dtype=np.float64)
            yd = np.asarray(dev[1], dtype=np.int64)
        rng = np.random.default_rng(self.seed)
        self._init_weights(X.shape[1], rng)

        best = np.inf
        best_state = None
        stale = 0
        updates = 0
        for epoch in range(self.max_epochs):
            perm = rng.permutation(X.shape[0])
            epoch_losses = []
            for start in range(0, X.shape[0], self.batch_size):
                batch = perm[start:start + self.batch_size]
                Xb, yb = X[batch], y[batch]
                grads = self.batch_grad(Xb, yb)
                epoch_losses.append(self.batch_loss(Xb, yb))
                updates += 1
                if self.learning_rate == "constant":
                    lr = self.lr0
                else:
                    lr = self.lr0 / np.sqrt(updates)
                self.W1 -= lr * grads["W1"]
                self.b1 -= lr * grads["b1"]
                self.W2 -= lr * grads["W2"]
                self.b2 -= lr * grads["b2"]
            self.n_epochs = epoch + 1

            if dev is not None:
                _, _, Z2 = self._forward(Xd)
                monitored = self._data_loss(Z2, yd)
            else:
                monitored = float(np.mean(epoch_losses))
            if monitored < best - self.tol:
                best = monitored
                stale = 0
                if dev is not None:
                    best_state = (self.W1.copy(), self.b1.copy(),
                                  self.W2.copy(), self.b2.copy())
            else:
                stale += 1
                if stale >= self.patience:
                    break
        if best_state is not None:
            self.W1, self.b1, self.W2, self.b2 = best_state
        return self

    def decision_scores(self, X):
        if self.W1 is None:
            raise UsageError("decision_scores before fit")
        X = np.asarray(X, dtype=np.float64)
        _, _, Z2 = self._forward(X)
        if self.n_outputs == 1:
            return expit(Z2[:, 0])
        zmax = Z2.max(axis=1, keepdims=True)
        e = np.exp(Z2 - zmax)
        return e[:, 1] / e.sum(axis=1)

    def param_count(self):
        dim = int(self.W1.shape[0])
        return dim * self.hidden + self.hidden \
            + self.hidden * self.n_outputs + self.n_outputs

    def get_params(self):
        return {"hidden": self.hidden, "batch_size": self.batch_size,
                "learning_rate": self.learning_rate, "lr0": self.lr0,
                "alpha": self.alpha, "n_outputs": self.n_outputs}
