"""Regenerate the bundled test clips (16 kHz mono int16 WAV).

All clips are synthesized here from fixed formulas and a fixed seed, so
they carry no third-party rights and rebuild byte-identically:

    python3 make_clips.py [out_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import chirp

RATE = 16_000


def _env(n: int) -> np.ndarray:
    """Short linear fade-in/out to avoid clicks."""
    env = np.ones(n)
    edge = min(400, n // 4)
    env[:edge] = np.linspace(0.0, 1.0, edge)
    env[-edge:] = np.linspace(1.0, 0.0, edge)
    return env


def build() -> dict[str, np.ndarray]:
    rng = np.random.default_rng(20240 + 5)
    t = lambda sec: np.arange(int(RATE * sec)) / RATE

    clips = {}
    x = t(0.8)
    clips["sine_a4"] = 0.6 * np.sin(2 * np.pi * 440.0 * x)
    x = t(1.5)
    clips["chirp_up"] = 0.5 * chirp(x, f0=100.0, f1=4000.0, t1=x[-1],
                                    method="logarithmic")
    x = t(0.5)
    clips["white_noise"] = 0.3 * rng.uniform(-1.0, 1.0, x.shape[0])
    x = t(2.1)
    clips["am_tone"] = (0.5 * (1 + 0.8 * np.sin(2 * np.pi * 3.0 * x))
                        * np.sin(2 * np.pi * 600.0 * x) * 0.5)
    x = t(1.2)
    stack = sum((0.5 ** k) * np.sin(2 * np.pi * 220.0 * (k + 1) * x)
                for k in range(5))
    clips["harmonic_stack"] = 0.4 * stack / np.max(np.abs(stack))
    return {name: wave * _env(wave.shape[0]) for name, wave in clips.items()}


def main(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for name, wave in build().items():
        pcm = np.clip(wave * 32767.0, -32768, 32767).astype(np.int16)
        wavfile.write(out_dir / f"{name}.wav", RATE, pcm)
        lines.append(f"{name}.wav clip_{name}")
        print(f"{name}.wav: {pcm.shape[0]} samples "
              f"({pcm.shape[0] / RATE:.2f} s)")
    (out_dir / "manifest.txt").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent)
