"""Save/load fitted classifiers as .npz archives (no pickle)."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import numpy as np

from ..errors import FormatError
from .base import Classifier, make_classifier

_STATE_KEYS = {
    "knn": ("_X", "_y"),
    "logreg": ("w", "b"),
    "svm": ("support_", "support_vectors_", "dual_coef_", "bias_", "gamma_"),
    "gnb": ("theta", "var", "log_prior"),
    "tree": ("feature", "threshold", "left", "right", "value"),
    "mlp": ("W1", "b1", "W2", "b2"),
}


def save_model(model: Classifier, path: Union[str, Path]) -> None:
    if model.name not in _STATE_KEYS:
        raise FormatError(f"no serializer for algorithm {model.name!r}")
    meta = {"format": "greenspoof-model", "version": 1, "algo": model.name,
            "seed": model.seed, "params": model.get_params()}
    arrays = {"__meta__": np.frombuffer(
        json.dumps(meta, sort_keys=True).encode("utf-8"), dtype=np.uint8)}
    for key in _STATE_KEYS[model.name]:
        val = getattr(model, key)
        if val is None:
            raise FormatError(f"cannot save unfitted model (missing {key})")
        arrays[key] = np.asarray(val)
    np.savez(path, **arrays)


def load_model(path: Union[str, Path]) -> Classifier:
    with np.load(path, allow_pickle=False) as archive:
        if "__meta__" not in archive:
            raise FormatError(f"{path}: not a model archive")
        try:
            meta = json.loads(bytes(archive["__meta__"]).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"{path}: bad model metadata: {exc}") from None
        if meta.get("format") != "greenspoof-model" or meta.get("version") != 1:
            raise FormatError(f"{path}: unsupported model format")
        algo = meta["algo"]
        if algo not in _STATE_KEYS:
            raise FormatError(f"{path}: unknown algorithm {algo!r}")
        model = make_classifier(algo, meta["params"], seed=meta.get("seed", 0))
        for key in _STATE_KEYS[algo]:
            if key not in archive:
                raise FormatError(f"{path}: missing state array {key}")
            val = archive[key]
            if val.ndim == 0:
                setattr(model, key, float(val))
            else:
                setattr(model, key, val)
    return model
