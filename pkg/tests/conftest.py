"""Shared fixtures: synthetic GAIE datasets written to disk."""

from __future__ import annotations

import numpy as np
import pytest

from greenspoof.store import EmbeddingRecord, Label, write_embeddings


def utt_name(partition: str, index: int) -> str:
    return f"{partition[0].upper()}_{index:07d}"


def write_embedding_split(root, partition, layer, X, y) -> None:
    """One pooled (single-frame) GAIE file for a partition/layer pair."""
    records = [
        EmbeddingRecord(utt_name(partition, i), layer,
                        np.asarray(row, dtype=np.float32)[None, :],
                        Label(int(label)))
        for i, (row, label) in enumerate(zip(X, y))]
    write_embeddings(records, root / f"{partition}_{layer}.gaie")


def write_protocol_file(root, partition, y) -> None:
    lines = []
    for i, label in enumerate(y):
        utt = utt_name(partition, i)
        speaker = f"SPK{i % 20:02d}"
        if int(label) == 1:
            lines.append(f"{speaker} {utt} - - bonafide")
        else:
            lines.append(f"{speaker} {utt} - A{(i % 6) + 1:02d} spoof")
    path = root / f"{partition}.protocol.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def build_dataset_dir(root, dim=16, counts=(120, 60, 80), layers=(0,),
                      seed=9, separation=1.8):
    """Synthetic two-Gaussian GAIE dataset laid out the way sweep expects."""
    rng = np.random.default_rng(seed)
    mu = np.full(dim, separation / np.sqrt(dim))
    root.mkdir(parents=True, exist_ok=True)
    for partition, count in zip(("train", "dev", "eval"), counts):
        y = rng.integers(0, 2, count)
        y[0], y[1] = 0, 1  # both classes present regardless of draw
        X = rng.normal(size=(count, dim)) + np.where(y[:, None] == 1, mu, -mu)
        write_protocol_file(root, partition, y)
        for layer in layers:
            # small deterministic shift so layers are distinguishable
            write_embedding_split(root, partition, layer, X + 0.01 * layer, y)
    return root


@pytest.fixture
def dataset_dir(tmp_path):
    """Factory fixture returning a fresh on-disk dataset directory."""
    def build(**kwargs):
        return build_dataset_dir(tmp_path / "data", **kwargs)
    return build
