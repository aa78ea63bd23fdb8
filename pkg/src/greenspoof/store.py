"""Embedding storage: the GAIE file format, protocol parsing, dataset assembly.

GAIE ("Green Audio Inference Embeddings") is a little-endian binary container
holding per-utterance frame-embedding matrices for one encoder layer:

    magic  "GAIE"      4 bytes
    version            u32  (currently 1)
    dim                u32  (columns per frame, 768 for the BASE encoder)
    layer              u16  (0 = feature-encoder output, 1..12 = transformers)
    record_count       u64
    per record:
        utt_id_len     u16
        utt_id         UTF-8 bytes
        label          u8   (0 = spoof, 1 = bonafide, 255 = unknown)
        frames         u32
        values         frames * dim float32, row-major

Labels embedded in GAIE files are transport metadata only; `assemble` takes
labels exclusively from protocol files.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import BinaryIO, Iterable, Sequence, Union

import numpy as np

from .errors import AssemblyError, FormatError, ProtocolError, UsageError

GAIE_MAGIC = b"GAIE"
GAIE_VERSION = 1

_HEADER = struct.Struct("<4sIIHQ")
_UTT_LEN = struct.Struct("<H")
_REC_META = struct.Struct("<BI")

PARTITIONS = ("train", "dev", "eval")


class Label(IntEnum):
    SPOOF = 0
    BONAFIDE = 1
    UNKNOWN = 255


@dataclass(frozen=True)
class ProtocolEntry:
    speaker_id: str
    utt_id: str
    attack_id: str | None
    label: Label


def parse_protocol(source: Union[str, Iterable[str]]) -> list[ProtocolEntry]:
    """Parse an ASVspoof-style protocol: SPEAKER UTT - ATTACK|- KEY per line.

    Raises ProtocolError (with the 1-based line number) on a wrong field
    count, an unknown key, or an attack field inconsistent with the key.
    """
    if isinstance(source, str):
        source = source.splitlines()
    entries = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 5:
            raise ProtocolError(lineno, f"expected 5 fields, got {len(fields)}")
        speaker, utt_id, _placeholder, attack, key = fields
        if key == "bonafide":
            label = Label.BONAFIDE
        elif key == "spoof":
            label = Label.SPOOF
        else:
            raise ProtocolError(lineno, f"unknown key {key!r}")
        attack_id = None if attack == "-" else attack
        if (attack_id is None) != (label is Label.BONAFIDE):
            raise ProtocolError(
                lineno, f"attack field {attack!r} inconsistent with key {key!r}")
        entries.append(ProtocolEntry(speaker, utt_id, attack_id, label))
    return entries


@dataclass(frozen=True)
class EmbeddingRecord:
    """One utterance's frame-level embeddings (frames x dim) for one layer."""

    utt_id: str
    layer: int
    values: np.ndarray  # float32, shape (frames, dim)
    label: Label = Label.UNKNOWN

    @property
    def frames(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def _check_record(rec: EmbeddingRecord) -> None:
    if not rec.utt_id:
        raise UsageError("record has empty utt_id")
    if rec.values.ndim != 2 or rec.values.shape[0] < 1 or rec.values.shape[1] < 1:
        raise UsageError(f"record {rec.utt_id}: values must be a non-empty 2-D matrix")
    if not 0 <= rec.layer <= 0xFFFF:
        raise UsageError(f"record {rec.utt_id}: layer {rec.layer} out of range")
    if not np.isfinite(rec.values).all():
        raise UsageError(f"record {rec.utt_id}: non-finite values rejected before write")


def write_embeddings(records: Sequence[EmbeddingRecord],
                     file: Union[str, Path, BinaryIO],
                     *, dim: int | None = None, layer: int | None = None) -> None:
    """Write records to a GAIE file; all records must share dim and layer.

    `dim`/`layer` are only needed when `records` is empty.
    """
    if records:
        dims = {r.values.shape[1] if r.values.ndim == 2 else -1 for r in records}
        layers = {r.layer for r in records}
        if len(dims) != 1:
            raise UsageError(f"mixed dims in one file: {sorted(dims)}")
        if len(layers) != 1:
            raise UsageError(f"mixed layers in one file: {sorted(layers)}")
        for rec in records:
            _check_record(rec)
        dim = records[0].dim
        layer = records[0].layer
    elif dim is None or layer is None:
        raise UsageError("writing an empty file requires explicit dim and layer")

    if hasattr(file, "write"):
        _write_stream(records, file, dim, layer)
    else:
        with open(file, "wb") as fh:
            _write_stream(records, fh, dim, layer)


def _write_stream(records, fh, dim, layer):
    fh.write(_HEADER.pack(GAIE_MAGIC, GAIE_VERSION, dim, layer, len(records)))
    for rec in records:
        utt = rec.utt_id.encode("utf-8")
        if len(utt) > 0xFFFF:
            raise UsageError(f"utt_id too long: {rec.utt_id[:32]}...")
        fh.write(_UTT_LEN.pack(len(utt)))
        fh.write(utt)
        fh.write(_REC_META.pack(int(rec.label), rec.frames))
        payload = np.ascontiguousarray(rec.values, dtype="<f4")
        fh.write(payload.tobytes())


def read_embeddings(file: Union[str, Path, BinaryIO]) -> list[EmbeddingRecord]:
    """Read all records from a GAIE file, in file order."""
    if hasattr(file, "read"):
        return _read_stream(file)
    with open(file, "rb") as fh:
        return _read_stream(fh)


def _read_exact(fh, n, context):
    buf = fh.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated file while reading {context}")
    return buf


def _read_stream(fh) -> list[EmbeddingRecord]:
    head = fh.read(_HEADER.size)
    if len(head) < _HEADER.size:
        raise FormatError("truncated file while reading header")
    magic, version, dim, layer, count = _HEADER.unpack(head)
    if magic != GAIE_MAGIC:
        raise FormatError(f"bad magic {magic!r}, not a GAIE file")
    if version != GAIE_VERSION:
        raise FormatError(f"unsupported GAIE version {version}")
    if dim < 1:
        raise FormatError(f"invalid dim {dim}")
    records = []
    for idx in range(count):
        ctx = f"record {idx}"
        (utt_len,) = _UTT_LEN.unpack(_read_exact(fh, _UTT_LEN.size, ctx))
        utt_id = _read_exact(fh, utt_len, ctx).decode("utf-8")
        label_byte, frames = _REC_META.unpack(_read_exact(fh, _REC_META.size, ctx))
        if label_byte not in (0, 1, 255):
            raise FormatError(f"record {idx} ({utt_id}): invalid label byte {label_byte}")
        if frames < 1:
            raise FormatError(f"record {idx} ({utt_id}): frames must be >= 1")
        raw = _read_exact(fh, 4 * frames * dim, f"record {idx} ({utt_id}) payload")
        values = np.frombuffer(raw, dtype="<f4").reshape(frames, dim)
        if not np.isfinite(values).all():
            raise FormatError(f"record {idx} ({utt_id}): non-finite values")
        records.append(EmbeddingRecord(utt_id, layer, values, Label(label_byte)))
    if fh.read(1):
        raise FormatError(f"trailing bytes after the {count} declared records")
    return records


@dataclass(frozen=True)
class DatasetItem:
    utt_id: str
    features: object  # EmbeddingRecord or features.PooledVector
    label: Label


@dataclass(frozen=True)
class LayerDataset:
    """Immutable labeled dataset for one (layer, partition) pair."""

    layer: int
    partition: str
    items: tuple[DatasetItem, ...]

    def __len__(self) -> int:
        return len(self.items)

    @property
    def labels(self) -> np.ndarray:
        return np.array([int(it.label) for it in self.items], dtype=np.int16)

    @property
    def utt_ids(self) -> list[str]:
        return [it.utt_id for it in self.items]

    def is_fully_labeled(self) -> bool:
        return all(it.label is not Label.UNKNOWN for it in self.items)


def _find_duplicates(ids: Iterable[str]) -> list[str]:
    seen, dupes = set(), []
    for i in ids:
        if i in seen:
            dupes.append(i)
        seen.add(i)
    return dupes


def assemble(records: Sequence, entries: Sequence[ProtocolEntry],
             partition: str, *, allow_unlabeled: bool = False) -> LayerDataset:
    """Join feature records with protocol labels into a LayerDataset.

    Records may be EmbeddingRecord or PooledVector objects (anything with a
    `utt_id` and `layer`). Items come out sorted by utt_id, so the result is
    independent of input ordering. In train/dev every record must be labeled;
    in eval, records without a protocol entry are admitted with Label.UNKNOWN
    when allow_unlabeled is set and rejected otherwise.
    """
    if partition not in PARTITIONS:
        raise UsageError(f"unknown partition {partition!r}")
    dupes = _find_duplicates(r.utt_id for r in records)
    if dupes:
        raise AssemblyError(f"duplicate record utt_ids: {sorted(set(dupes))}")
    dupes = _find_duplicates(e.utt_id for e in entries)
    if dupes:
        raise AssemblyError(f"duplicate protocol utt_ids: {sorted(set(dupes))}")

    by_utt = {e.utt_id: e for e in entries}
    missing = sorted(r.utt_id for r in records if r.utt_id not in by_utt)
    if missing and not (partition == "eval" and allow_unlabeled):
        raise AssemblyError(
            f"{partition} records without a protocol entry: {missing}")

    layers = {r.layer for r in records}
    if len(layers) > 1:
        raise AssemblyError(f"records from multiple layers: {sorted(layers)}")
    layer = layers.pop() if layers else -1

    items = []
    for rec in sorted(records, key=lambda r: r.utt_id):
        entry = by_utt.get(rec.utt_id)
        label = entry.label if entry is not None else Label.UNKNOWN
        items.append(DatasetItem(rec.utt_id, rec, label))
    return LayerDataset(layer=layer, partition=partition, items=tuple(items))
