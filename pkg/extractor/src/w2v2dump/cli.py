"""Command-line interface: `w2v2dump extract` and `w2v2dump verify`.

Exit codes: 0 ok, 1 fatal extraction failure (e.g. checkpoint load),
2 usage/input error, 3 format violations found by verify.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .extract import (CheckpointError, ExtractionJob, ManifestError,
                      extract, read_manifest)
from .gaie import GaieError, verify_gaie


def parse_layers(text: str) -> tuple[int, ...]:
    """'0-3,7,11-12' -> (0, 1, 2, 3, 7, 11, 12)."""
    layers: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            if sep:
                layers.update(range(int(lo), int(hi) + 1))
            else:
                layers.add(int(part))
        except ValueError:
            raise ManifestError(f"bad layer spec {part!r}") from None
    if not layers:
        raise ManifestError("empty layer list")
    return tuple(sorted(layers))


def cmd_extract(args: argparse.Namespace) -> int:
    entries = read_manifest(args.manifest)
    partition = args.partition or Path(args.manifest).stem
    job = ExtractionJob(
        entries=entries,
        out_dir=Path(args.out_dir),
        layers=parse_layers(args.layers),
        checkpoint=args.checkpoint,
        pooled=args.pooled,
        partition=partition,
    )
    result = extract(job)
    print(f"wrote {result.written} utterances x {len(job.layers)} layers "
          f"to {job.out_dir} ({len(result.skipped)} skipped)")
    for utt_id, reason in result.skipped:
        print(f"  skipped {utt_id}: {reason}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    failures = 0
    for path in args.files:
        try:
            print(verify_gaie(path))
        except GaieError as exc:
            print(f"{path}: INVALID: {exc}")
            failures += 1
    return 3 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="w2v2dump",
        description="Dump frozen wav2vec2 hidden states to GAIE files.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="run the encoder over a manifest")
    p.add_argument("--manifest", required=True,
                   help="text file, one 'audio_path utt_id' per line")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--layers", default="0-12", help="e.g. 0-12 or 1,2,5")
    p.add_argument("--checkpoint", default="facebook/wav2vec2-base",
                   help="HF identifier or local checkpoint directory")
    p.add_argument("--pooled", action="store_true",
                   help="emit one mean-pooled frame per utterance")
    p.add_argument("--partition",
                   help="output name prefix (default: manifest stem)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("verify", help="validate GAIE files, print summaries")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CheckpointError as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return 1
    except (ManifestError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GaieError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
