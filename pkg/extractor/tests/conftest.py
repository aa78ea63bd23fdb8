"""Shared fixtures: a random-weight base-geometry checkpoint saved to disk
once per session, plus extraction runs over the bundled clips that several
conformance tests inspect."""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.io import wavfile

CLIPS_DIR = Path(__file__).resolve().parent.parent / "clips"
MANIFEST = CLIPS_DIR / "manifest.txt"
ALL_LAYERS = tuple(range(13))


def run_cli(*args: object) -> subprocess.CompletedProcess:
    cmd = [sys.executable, "-m", "w2v2dump", *map(str, args)]
    return subprocess.run(cmd, capture_output=True, text=True)


def clip_sample_counts() -> dict[str, int]:
    counts = {}
    for line in MANIFEST.read_text().splitlines():
        wav, utt_id = line.split()
        _, data = wavfile.read(CLIPS_DIR / wav)
        counts[utt_id] = data.shape[0]
    return counts


def write_wav(path: Path, data: np.ndarray, rate: int = 16_000) -> Path:
    wavfile.write(path, rate, data)
    return path


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory) -> Path:
    import torch
    from transformers import Wav2Vec2Config, Wav2Vec2Model

    out = tmp_path_factory.mktemp("ckpt") / "base"
    torch.manual_seed(0)
    Wav2Vec2Model(Wav2Vec2Config()).save_pretrained(out)
    return out


@pytest.fixture(scope="session")
def frame_dumps(checkpoint, tmp_path_factory) -> tuple[Path, Path]:
    """The bundled clips extracted twice via the CLI, all 13 layers."""
    dirs = []
    for tag in ("a", "b"):
        out = tmp_path_factory.mktemp(f"dump_{tag}")
        proc = run_cli("extract", "--manifest", MANIFEST, "--out-dir", out,
                       "--checkpoint", checkpoint, "--partition", "clips")
        assert proc.returncode == 0, proc.stderr
        dirs.append(out)
    return tuple(dirs)


@pytest.fixture(scope="session")
def pooled_dump(checkpoint, tmp_path_factory) -> Path:
    """Mean-pooled extraction of layers 2 and 9, written via the API."""
    from w2v2dump.extract import ExtractionJob, extract, read_manifest

    out = tmp_path_factory.mktemp("dump_pooled")
    job = ExtractionJob(entries=read_manifest(MANIFEST), out_dir=out,
                        layers=(2, 9), checkpoint=str(checkpoint),
                        pooled=True, partition="clips")
    result = extract(job)
    assert result.written == 5 and not result.skipped
    return out
