"""Batch extraction of wav2vec2 hidden states into GAIE files.

An extraction job reads a manifest ("audio_path utt_id" per line), runs the
frozen encoder over each clip on CPU, and streams one GAIE file per
requested layer, records sorted by utt_id. Files that cannot be used
(wrong rate, stereo, empty, unreadable) are skipped with a logged reason;
a checkpoint that fails to load aborts the whole job.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy.io import wavfile

from .frames import conv_frame_count
from .gaie import LABEL_UNKNOWN, GaieWriter

log = logging.getLogger("w2v2dump")

SAMPLE_RATE = 16_000
MAX_LAYER = 12


class ManifestError(Exception):
    """Malformed manifest file."""


class CheckpointError(Exception):
    """Encoder checkpoint could not be loaded; aborts the whole job."""


class SkipFile(Exception):
    """Single clip unusable; carries the reason for the log."""


@dataclass
class ManifestEntry:
    path: Path
    utt_id: str


@dataclass
class ExtractionJob:
    entries: list[ManifestEntry]
    out_dir: Path
    layers: tuple[int, ...]
    checkpoint: str = "facebook/wav2vec2-base"
    device: str = "cpu"
    pooled: bool = False
    partition: str = "data"

    def __post_init__(self):
        if not self.layers:
            raise ValueError("at least one layer required")
        bad = [l for l in self.layers if not 0 <= l <= MAX_LAYER]
        if bad:
            raise ValueError(f"layers out of range [0, {MAX_LAYER}]: {bad}")
        if len(set(self.layers)) != len(self.layers):
            raise ValueError("duplicate layers requested")


@dataclass
class ExtractionResult:
    files: list[Path]
    written: int
    skipped: list[tuple[str, str]] = field(default_factory=list)


def read_manifest(path: Union[str, Path]) -> list[ManifestEntry]:
    """Parse "audio_path utt_id" lines; blank lines and #-comments are
    ignored, relative audio paths resolve against the manifest's folder."""
    path = Path(path)
    entries = []
    seen = set()
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.rsplit(maxsplit=1)
        if len(parts) != 2:
            raise ManifestError(
                f"{path}:{lineno}: expected 'audio_path utt_id'")
        audio, utt_id = parts
        if utt_id in seen:
            raise ManifestError(f"{path}:{lineno}: duplicate utt_id "
                                f"{utt_id!r}")
        seen.add(utt_id)
        audio_path = Path(audio)
        if not audio_path.is_absolute():
            audio_path = path.parent / audio_path
        entries.append(ManifestEntry(audio_path, utt_id))
    if not entries:
        raise ManifestError(f"{path}: no usable entries")
    return entries


def load_waveform(path: Path) -> np.ndarray:
    """Read a 16 kHz mono WAV as float32 in [-1, 1]; SkipFile otherwise."""
    try:
        rate, data = wavfile.read(path)
    except (OSError, ValueError) as exc:
        raise SkipFile(f"unreadable: {exc}") from None
    if rate != SAMPLE_RATE:
        raise SkipFile(f"sample rate {rate}, expected {SAMPLE_RATE}")
    if data.ndim != 1:
        raise SkipFile(f"{data.shape[1]} channels, expected mono")
    if data.shape[0] == 0:
        raise SkipFile("empty audio")
    if data.dtype == np.int16:
        wave = data.astype(np.float32) / 32768.0
    elif data.dtype == np.float32:
        wave = data
    else:
        raise SkipFile(f"unsupported sample format {data.dtype}")
    if conv_frame_count(wave.shape[0]) < 1:
        raise SkipFile(f"too short ({wave.shape[0]} samples) to produce "
                       f"one encoder frame")
    return wave


def load_model(checkpoint: str, device: str = "cpu"):
    """Load the frozen encoder; any failure here is fatal by design."""
    import torch
    from transformers import Wav2Vec2Model

    try:
        model = Wav2Vec2Model.from_pretrained(checkpoint)
    except Exception as exc:
        raise CheckpointError(
            f"cannot load checkpoint {checkpoint!r}: {exc}") from exc
    model.to(device)
    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    return model


def extract(job: ExtractionJob) -> ExtractionResult:
    """Run the job; returns the written file paths plus skip bookkeeping."""
    import torch

    model = load_model(job.checkpoint, job.device)
    dim = int(model.config.hidden_size)
    n_states = int(model.config.num_hidden_layers) + 1
    too_deep = [l for l in job.layers if l >= n_states]
    if too_deep:
        raise ValueError(f"checkpoint exposes layers 0..{n_states - 1}, "
                         f"requested {too_deep}")

    job.out_dir.mkdir(parents=True, exist_ok=True)
    writers = {}
    for layer in job.layers:
        out = job.out_dir / f"{job.partition}_{layer}.gaie"
        writers[layer] = GaieWriter(out, dim=dim, layer=layer)

    result = ExtractionResult(files=[w.path for w in writers.values()],
                              written=0)
    try:
        for entry in sorted(job.entries, key=lambda e: e.utt_id):
            try:
                wave = load_waveform(entry.path)
            except SkipFile as exc:
                log.warning("skipping %s (%s): %s",
                            entry.utt_id, entry.path, exc)
                result.skipped.append((entry.utt_id, str(exc)))
                continue
            batch = torch.from_numpy(wave).unsqueeze(0).to(job.device)
            with torch.no_grad():
                states = model(batch, output_hidden_states=True).hidden_states
            for layer, writer in writers.items():
                values = states[layer].squeeze(0).cpu().numpy()
                values = np.ascontiguousarray(values, dtype=np.float32)
                if job.pooled:
                    values = values.mean(axis=0, keepdims=True,
                                         dtype=np.float32)
                writer.add(entry.utt_id, values, label=LABEL_UNKNOWN)
            result.written += 1
            log.info("wrote %s: %d frames x %d layers",
                     entry.utt_id, states[0].shape[1], len(writers))
    finally:
        for writer in writers.values():
            writer.close()
    return result
