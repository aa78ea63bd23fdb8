"""Parameter and MAC cost model for a truncated SSL speech encoder.

Counts cover the weight-bearing blocks a forward pass up to transformer
layer k must execute: the strided conv feature extractor, the 512->768
feature projection, the grouped positional convolution, the encoder-input
layer norm, and k transformer layers. MACs are multiply-accumulates of the
convolutions, projections, attention score/context products, and FFN
matmuls; layer-norm arithmetic, softmax, activations, and bias adds are
excluded (they are linear-time and amount to well under 1% here).

All counts are exact integers; lengths follow the usual conv formula
floor((len - kernel) / stride) + 1, so doubling the input duration does
not exactly double frame counts or MACs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UsageError


@dataclass(frozen=True)
class EncoderConfig:
    """Shapes of the frozen encoder whose truncation is being costed."""

    conv_channels: tuple[int, ...] = (512,) * 7
    conv_kernels: tuple[int, ...] = (10, 3, 3, 3, 3, 2, 2)
    conv_strides: tuple[int, ...] = (5, 2, 2, 2, 2, 2, 2)
    d_model: int = 768
    n_heads: int = 12
    ffn_dim: int = 3072
    n_layers: int = 12
    pos_conv_kernel: int = 128
    pos_conv_groups: int = 16
    sample_rate: int = 16000

    def __post_init__(self):
        if not (len(self.conv_channels) == len(self.conv_kernels)
                == len(self.conv_strides)):
            raise UsageError("conv channel/kernel/stride lengths differ")
        if self.d_model % self.n_heads or self.d_model % self.pos_conv_groups:
            raise UsageError("d_model must divide evenly into heads and groups")


BASE_ENCODER = EncoderConfig()


def conv_output_lengths(cfg: EncoderConfig, n_samples: int) -> list[int]:
    """Sequence length after each conv layer (no padding, floor division)."""
    lengths = []
    length = n_samples
    for kernel, stride in zip(cfg.conv_kernels, cfg.conv_strides):
        length = (length - kernel) // stride + 1
        if length < 1:
            raise UsageError(f"input of {n_samples} samples is too short")
        lengths.append(length)
    return lengths


def frame_count(cfg: EncoderConfig, n_samples: int) -> int:
    return conv_output_lengths(cfg, n_samples)[-1]


def conv_macs(cfg: EncoderConfig, n_samples: int) -> int:
    total = 0
    in_ch = 1
    for out_len, out_ch, kernel in zip(conv_output_lengths(cfg, n_samples),
                                       cfg.conv_channels, cfg.conv_kernels):
        total += out_len * out_ch * in_ch * kernel
        in_ch = out_ch
    return total


def conv_params(cfg: EncoderConfig) -> int:
    total = 0
    in_ch = 1
    for i, (out_ch, kernel) in enumerate(zip(cfg.conv_channels, cfg.conv_kernels)):
        total += out_ch * in_ch * kernel  # conv weights carry no bias
        if i == 0:
            total += 2 * out_ch  # affine group norm after the first layer
        in_ch = out_ch
    return total


def projection_params(cfg: EncoderConfig) -> int:
    c = cfg.conv_channels[-1]
    return 2 * c + c * cfg.d_model + cfg.d_model  # LN + linear with bias


def projection_macs(cfg: EncoderConfig, frames: int) -> int:
    return frames * cfg.conv_channels[-1] * cfg.d_model


def pos_conv_params(cfg: EncoderConfig) -> int:
    d, g = cfg.d_model, cfg.pos_conv_groups
    return d * (d // g) * cfg.pos_conv_kernel + d


def pos_conv_macs(cfg: EncoderConfig, frames: int) -> int:
    d, g = cfg.d_model, cfg.pos_conv_groups
    return frames * d * (d // g) * cfg.pos_conv_kernel


def layer_params(cfg: EncoderConfig) -> int:
    d, f = cfg.d_model, cfg.ffn_dim
    attention = 4 * (d * d + d)           # Q, K, V, out projections
    norms = 2 * (2 * d)                   # two layer norms
    ffn = (d * f + f) + (f * d + d)
    return attention + norms + ffn


def layer_macs(cfg: EncoderConfig, frames: int) -> int:
    d, f, n = cfg.d_model, cfg.ffn_dim, frames
    projections = 4 * n * d * d
    attention = 2 * n * n * d             # QK^T scores plus context product
    ffn = 2 * n * d * f
    return projections + attention + ffn


def _check_k(cfg: EncoderConfig, k: int) -> None:
    if not 0 <= k <= cfg.n_layers:
        raise UsageError(f"k must be in [0, {cfg.n_layers}]")


def slice_params(cfg: EncoderConfig, k: int) -> int:
    """Learned parameters a truncation at transformer layer k must load."""
    _check_k(cfg, k)
    stem = (conv_params(cfg) + projection_params(cfg)
            + pos_conv_params(cfg) + 2 * cfg.d_model)
    return stem + k * layer_params(cfg)


def slice_macs(cfg: EncoderConfig, seconds: float, k: int) -> int:
    """MACs to embed `seconds` of audio through transformer layer k."""
    _check_k(cfg, k)
    n_samples = int(round(seconds * cfg.sample_rate))
    frames = frame_count(cfg, n_samples)
    stem = (conv_macs(cfg, n_samples) + projection_macs(cfg, frames)
            + pos_conv_macs(cfg, frames))
    return stem + k * layer_macs(cfg, frames)


def mac_reduction(cfg: EncoderConfig, seconds: float, k: int) -> float:
    """Fraction of full-stack MACs avoided by stopping at layer k."""
    full = slice_macs(cfg, seconds, cfg.n_layers)
    return 1.0 - slice_macs(cfg, seconds, k) / full


def energy_ratio(cfg: EncoderConfig, seconds: float, k: int) -> float:
    """MAC-proportional energy proxy relative to running the full stack."""
    return slice_macs(cfg, seconds, k) / slice_macs(cfg, seconds, cfg.n_layers)


def cost_table(cfg: EncoderConfig, seconds: float) -> list[dict]:
    """Per-k summary rows (k, gmacs, params, reductions) for reporting."""
    rows = []
    full_macs = slice_macs(cfg, seconds, cfg.n_layers)
    full_params = slice_params(cfg, cfg.n_layers)
    for k in range(cfg.n_layers + 1):
        macs = slice_macs(cfg, seconds, k)
        params = slice_params(cfg, k)
        rows.append({
            "k": k,
            "macs": macs,
            "gmacs": macs / 1e9,
            "params": params,
            "mac_reduction": 1.0 - macs / full_macs,
            "param_reduction": 1.0 - params / full_params,
        })
    return rows
