"""Frame-count arithmetic for the wav2vec2 convolutional feature encoder."""

from __future__ import annotations

# (kernel, stride) pairs of the seven temporal convolutions in the
# feature encoder of the base model, applied in order, no padding.
CONV_LAYERS = ((10, 5), (3, 2), (3, 2), (3, 2), (3, 2), (2, 2), (2, 2))


def conv_frame_count(n_samples: int) -> int:
    """Number of encoder frames produced for a waveform of n_samples.

    Each conv layer maps length L to floor((L - kernel) / stride) + 1;
    a result of zero means the clip is too short to produce any frame.
    """
    length = int(n_samples)
    for kernel, stride in CONV_LAYERS:
        if length < kernel:
            return 0
        length = (length - kernel) // stride + 1
    return length
