"""greenspoof: CPU-only spoofed-speech detection on frozen SSL embeddings.

Pipeline: frame embeddings in GAIE files -> mean pooling -> classical
classifiers trained from scratch -> DET/EER + F1 reporting, with an exact
parameter/MAC budget model for truncating the upstream encoder.
"""

__version__ = "0.1.0"

from .budget import BASE_ENCODER, EncoderConfig, slice_macs, slice_params
from .features import PooledVector, mean_pool, pool_records
from .metrics import ScoredSet, det_curve, eer, f1_score
from .store import (EmbeddingRecord, Label, ProtocolEntry, assemble,
                    parse_protocol, read_embeddings, write_embeddings)

__all__ = [
    "__version__",
    "BASE_ENCODER", "EncoderConfig", "slice_macs", "slice_params",
    "PooledVector", "mean_pool", "pool_records",
    "ScoredSet", "det_curve", "eer", "f1_score",
    "EmbeddingRecord", "Label", "ProtocolEntry", "assemble",
    "parse_protocol", "read_embeddings", "write_embeddings",
]
