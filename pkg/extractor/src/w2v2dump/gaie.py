"""Reader/writer for the GAIE embedding container.

Little-endian layout: magic "GAIE", version u32 (1), dim u32, layer u16,
record_count u64; then per record utt_id_len u16, the UTF-8 utterance id,
label u8 (0 spoof / 1 bonafide / 255 unknown), frames u32, and frames*dim
float32 values row-major. This module is self-contained on purpose: the
file format is the contract shared with downstream training tools.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

MAGIC = b"GAIE"
VERSION = 1
LABEL_UNKNOWN = 255
_VALID_LABELS = frozenset((0, 1, 255))

_HEADER = struct.Struct("<4sIIHQ")
_UTT_LEN = struct.Struct("<H")
_REC_META = struct.Struct("<BI")


class GaieError(Exception):
    """Structural problem in a GAIE file."""


@dataclass
class GaieRecord:
    utt_id: str
    label: int
    values: np.ndarray  # (frames, dim) float32


class GaieWriter:
    """Streams records into one GAIE file; call close() to finalize.

    The record count is back-patched on close, so the number of records
    need not be known up front (utterances can be skipped mid-run).
    """

    def __init__(self, path: Union[str, Path], dim: int, layer: int):
        self.path = Path(path)
        self.dim = int(dim)
        self.layer = int(layer)
        self.count = 0
        self._fh = open(self.path, "wb")
        self._fh.write(_HEADER.pack(MAGIC, VERSION, self.dim, self.layer, 0))

    def add(self, utt_id: str, values: np.ndarray,
            label: int = LABEL_UNKNOWN) -> None:
        values = np.ascontiguousarray(values, dtype=np.float32)
        if values.ndim != 2 or values.shape[1] != self.dim:
            raise GaieError(
                f"{utt_id}: expected (frames, {self.dim}) values, "
                f"got {values.shape}")
        if values.shape[0] < 1:
            raise GaieError(f"{utt_id}: at least one frame required")
        if not np.isfinite(values).all():
            raise GaieError(f"{utt_id}: non-finite embedding values")
        if label not in _VALID_LABELS:
            raise GaieError(f"{utt_id}: invalid label {label}")
        name = utt_id.encode("utf-8")
        self._fh.write(_UTT_LEN.pack(len(name)))
        self._fh.write(name)
        self._fh.write(_REC_META.pack(label, values.shape[0]))
        self._fh.write(values.tobytes())
        self.count += 1

    def close(self) -> None:
        if self._fh.closed:
            return
        self._fh.seek(0)
        self._fh.write(_HEADER.pack(MAGIC, VERSION, self.dim, self.layer,
                                    self.count))
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_gaie(path: Union[str, Path]) -> tuple[int, int, list[GaieRecord]]:
    """Read a whole file; returns (dim, layer, records). Raises GaieError
    with the failing record index on any structural violation."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise GaieError("file shorter than header")
    magic, version, dim, layer, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise GaieError(f"bad magic {magic!r}")
    if version != VERSION:
        raise GaieError(f"unsupported version {version}")
    off = _HEADER.size
    records = []
    for idx in range(count):
        try:
            (name_len,) = _UTT_LEN.unpack_from(data, off)
            off += _UTT_LEN.size
            utt_id = data[off:off + name_len].decode("utf-8")
            off += name_len
            label, frames = _REC_META.unpack_from(data, off)
            off += _REC_META.size
            nbytes = frames * dim * 4
            if off + nbytes > len(data):
                raise struct.error("values truncated")
            values = np.frombuffer(
                data, dtype="<f4", count=frames * dim, offset=off
            ).reshape(frames, dim)
            off += nbytes
        except struct.error as exc:
            raise GaieError(f"record {idx}: truncated ({exc})") from None
        if label not in _VALID_LABELS:
            raise GaieError(f"record {idx}: invalid label byte {label}")
        if not np.isfinite(values).all():
            raise GaieError(f"record {idx}: non-finite values")
        records.append(GaieRecord(utt_id, label, values))
    if off != len(data):
        raise GaieError(f"{len(data) - off} trailing bytes after "
                        f"record {count - 1}")
    return dim, layer, records


def verify_gaie(path: Union[str, Path]) -> str:
    """Validate a file and return a one-paragraph summary for eyeballing."""
    dim, layer, records = read_gaie(path)
    frames = np.array([r.values.shape[0] for r in records])
    if len(records):
        flat_mean = float(np.mean([r.values.mean() for r in records]))
        flat_std = float(np.mean([r.values.std() for r in records]))
    else:
        flat_mean = flat_std = float("nan")
    pooled = " (pooled)" if len(records) and frames.max() == 1 else ""
    return (f"{path}: valid, layer {layer}, dim {dim}, "
            f"{len(records)} records{pooled}, "
            f"frames min/max {frames.min() if len(records) else 0}/"
            f"{frames.max() if len(records) else 0}, "
            f"value mean {flat_mean:.4f} sd {flat_std:.4f}")
