"""Command-line interface.

Subcommands: pool (frame -> utterance embeddings), train, eval, sweep
(grid search + reports), budget (encoder cost table), report (pretty-print
a finished run). Exit codes: 0 success, 2 usage, 3 data format, 4 runtime.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .budget import BASE_ENCODER, cost_table
from .classifiers import ALGORITHMS, load_model, make_classifier, save_model
from .errors import FormatError, RunError, UsageError
from .features import design_matrix, mean_pool, pool_records
from .manifest import RunManifest, sha256_file
from .metrics import eer, f1_score
from .reports import render_winners, write_all
from .selection import DEFAULT_GRIDS, DataSource, sweep
from .store import (EmbeddingRecord, assemble, parse_protocol,
                    read_embeddings, write_embeddings)

ENV_DATA_ROOT = "GREENSPOOF_DATA_ROOT"


# -- small parsing helpers --------------------------------------------------

def _parse_value(raw: str):
    """JSON if it parses, bare string otherwise ('gini' needs no quotes)."""
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _parse_kv(text: str) -> tuple[str, object]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise UsageError(f"expected key=value, got {text!r}")
    return key.strip(), _parse_value(raw.strip())


def parse_layers(text: str) -> list[int]:
    """'0-3,7,11-12' -> [0, 1, 2, 3, 7, 11, 12]."""
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
            raise UsageError(f"bad layer spec {part!r}") from None
    if not layers:
        raise UsageError("empty layer list")
    return sorted(layers)


def read_config(path: Path) -> dict:
    """Flat key=value file; values parse as JSON with a bare-string fallback."""
    config = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = _parse_kv(line)
        config[key.replace("-", "_")] = value
    return config


def _load_labeled(embeddings_path, protocol_path, partition,
                  allow_unlabeled=False):
    records = read_embeddings(embeddings_path)
    entries = parse_protocol(Path(protocol_path).read_text(encoding="utf-8"))
    dataset = assemble(pool_records(records), entries, partition,
                       allow_unlabeled=allow_unlabeled)
    return design_matrix(dataset)


# -- subcommands -------------------------------------------------------------

def cmd_pool(args) -> int:
    records = read_embeddings(args.input)
    if not records:
        raise FormatError(f"{args.input}: no records to pool")
    pooled = [
        EmbeddingRecord(
            rec.utt_id, rec.layer,
            mean_pool(rec).values.astype(np.float32)[None, :], rec.label)
        for rec in records]
    write_embeddings(pooled, args.output)
    print(f"pooled {len(pooled)} records -> {args.output}")
    return 0


def cmd_train(args) -> int:
    params = {}
    for kv in args.param or []:
        key, value = _parse_kv(kv)
        params[key] = value
    X, y = _load_labeled(args.embeddings, args.protocol, "train")
    dev = None
    if args.dev_embeddings:
        if not args.dev_protocol:
            raise UsageError("--dev-embeddings requires --dev-protocol")
        dev = _load_labeled(args.dev_embeddings, args.dev_protocol, "dev")
    model = make_classifier(args.algo, params, seed=args.seed)
    model.fit(X, y, dev=dev)
    save_model(model, args.model)
    print(f"trained {args.algo} on {X.shape[0]}x{X.shape[1]} "
          f"({model.param_count()} parameters) -> {args.model}")
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.model)
    records = read_embeddings(args.embeddings)
    pooled = pool_records(records)
    if args.protocol:
        entries = parse_protocol(Path(args.protocol).read_text(encoding="utf-8"))
        dataset = assemble(pooled, entries, "eval", allow_unlabeled=True)
        vectors = [item.features for item in dataset.items]
        labels = dataset.labels
        utt_ids = dataset.utt_ids
    else:
        vectors = sorted(pooled, key=lambda v: v.utt_id)
        labels = None
        utt_ids = [v.utt_id for v in vectors]
    X = np.vstack([v.values for v in vectors])
    scores = model.decision_scores(X)
    if args.scores:
        with open(args.scores, "w", encoding="utf-8", newline="") as fh:
            for utt_id, score in zip(utt_ids, scores):
                fh.write(f"{utt_id}\t{score:.12g}\n")
        print(f"wrote {len(scores)} scores -> {args.scores}")
    if labels is not None:
        known = labels != 255
        if known.sum() and len(set(labels[known])) == 2:
            y = labels[known].astype(np.int8)
            s = scores[known]
            print(f"eer_pct={100.0 * eer(s, y):.6f}")
            print(f"f1={f1_score(s, y, model.default_threshold):.12g} "
                  f"(threshold {model.default_threshold})")
        else:
            print("labels cover fewer than two classes; metrics skipped")
    return 0


def cmd_sweep(args) -> int:
    config = read_config(Path(args.config)) if args.config else {}
    unknown = set(config) - {"data_root", "layers", "algos", "out", "jobs",
                             "seed", "grids"}
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")

    def pick(flag, key, fallback):
        if flag is not None:
            return flag
        if key in config:
            return config[key]
        return fallback

    data_root = pick(args.data_root, "data_root",
                     os.environ.get(ENV_DATA_ROOT))
    if not data_root:
        raise UsageError(
            f"no data root: pass --data-root, set {ENV_DATA_ROOT}, "
            "or put data_root in the config file")
    layers_text = pick(args.layers, "layers", None)
    layers = parse_layers(str(layers_text)) if layers_text is not None else None
    algos_text = pick(args.algos, "algos", ",".join(sorted(ALGORITHMS)))
    algorithms = [a.strip() for a in str(algos_text).split(",") if a.strip()]
    out_dir = Path(pick(args.out, "out", "runs/sweep"))
    jobs = int(pick(args.jobs, "jobs", 1))
    seed = int(pick(args.seed, "seed", 1919))
    grids = config.get("grids")
    if args.grids_json:
        grids = json.loads(Path(args.grids_json).read_text(encoding="utf-8"))
    if grids is not None and not isinstance(grids, dict):
        raise UsageError("grids must be a JSON object")

    source = DataSource.from_directory(data_root, layers)
    result = sweep(source, algorithms, layers=layers, grids=grids,
                   master_seed=seed, jobs=jobs)
    paths = write_all(out_dir, result)

    inputs = {}
    for layer, files in sorted(source.embedding_files.items()):
        for part, path in sorted(files.items()):
            inputs[f"{part}_{layer}.gaie"] = sha256_file(path)
    for part, path in sorted(source.protocol_files.items()):
        inputs[f"{part}.protocol"] = sha256_file(path)
    manifest = RunManifest(
        command="sweep", master_seed=seed, algorithms=list(result.algorithms),
        layers=list(result.layers),
        grids=grids if grids is not None else DEFAULT_GRIDS,
        inputs=inputs, package_version=__version__,
        numpy_version=np.__version__, backend=BACKEND, jobs=jobs)
    manifest.write(out_dir / "manifest.json")

    print(render_winners(result), end="")
    print(f"\nreports under {out_dir} "
          f"(identity {manifest.identity_digest()[:12]})")
    return 0


def cmd_budget(args) -> int:
    rows = cost_table(BASE_ENCODER, args.seconds)
    if args.k is not None:
        rows = [row for row in rows if row["k"] == args.k]
        if not rows:
            raise UsageError(f"k must be in [0, {BASE_ENCODER.n_layers}]")
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    print(f"input {args.seconds:g} s @ {BASE_ENCODER.sample_rate} Hz")
    print(f"{'k':>2}  {'GMACs':>8}  {'params(M)':>9}  "
          f"{'mac_cut%':>8}  {'param_cut%':>10}")
    for row in rows:
        print(f"{row['k']:>2}  {row['gmacs']:>8.3f}  "
              f"{row['params'] / 1e6:>9.3f}  "
              f"{100 * row['mac_reduction']:>8.2f}  "
              f"{100 * row['param_reduction']:>10.2f}")
    return 0


def cmd_report(args) -> int:
    run_dir = Path(args.run)
    report_path = run_dir / "report.csv"
    if not report_path.exists():
        raise UsageError(f"{run_dir} has no report.csv")
    import csv as _csv
    with open(report_path, newline="", encoding="utf-8") as fh:
        rows = list(_csv.reader(fh))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    for idx, row in enumerate(rows):
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if idx == 0:
            print("  ".join("-" * w for w in widths))
    manifest_path = run_dir / "manifest.json"
    if manifest_path.exists():
        manifest = RunManifest.read(manifest_path)
        print(f"\nseed={manifest.master_seed} backend={manifest.backend} "
              f"identity={manifest.identity_digest()[:12]}")
    return 0


# -- wiring ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greenspoof",
        description="CPU-only spoofed-speech detection on frozen "
                    "self-supervised embeddings.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pool", help="mean-pool frame embeddings per utterance")
    p.add_argument("--input", required=True, help="frame-level .gaie file")
    p.add_argument("--output", required=True, help="pooled .gaie file")
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("train", help="fit one classifier")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--protocol", required=True)
    p.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="hyperparameter override; repeatable")
    p.add_argument("--dev-embeddings", help="held-out set for early stopping")
    p.add_argument("--dev-protocol")
    p.add_argument("--seed", type=int, default=1919)
    p.add_argument("--model", required=True, help="output .npz path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a set with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--protocol", help="labels; enables EER/F1 output")
    p.add_argument("--scores", help="write utt_id<TAB>score lines here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="grid-search all cells and report")
    p.add_argument("--data-root",
                   help=f"directory of .gaie/protocol files (${ENV_DATA_ROOT})")
    p.add_argument("--layers", help="e.g. 0-12 or 1,2,5")
    p.add_argument("--algos", help="comma list, default: all")
    p.add_argument("--out", help="report directory (default runs/sweep)")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p.add_argument("--seed", type=int, help="master seed (default 1919)")
    p.add_argument("--config", help="key=value file; flags win over it")
    p.add_argument("--grids-json", help="JSON file replacing the default grids")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("budget", help="encoder truncation cost table")
    p.add_argument("--seconds", type=float, default=3.5)
    p.add_argument("--k", type=int, help="single truncation depth")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("report", help="pretty-print a finished sweep")
    p.add_argument("--run", required=True, help="sweep output directory")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except RunError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        # unreadable/missing paths are caller mistakes, not data corruption
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
