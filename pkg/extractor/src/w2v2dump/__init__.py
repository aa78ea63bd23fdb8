"""Dump frozen wav2vec 2.0 hidden states into GAIE embedding files."""

__version__ = "0.1.0"

from .frames import conv_frame_count
from .gaie import GaieWriter, read_gaie, verify_gaie

__all__ = ["GaieWriter", "conv_frame_count", "read_gaie", "verify_gaie",
           "__version__"]
