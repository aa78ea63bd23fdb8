"""Deterministic CSV/text reports for sweep runs.

Metric files must come out byte-identical for equal-seed runs regardless of
worker count, so formats are pinned: percents print with six decimals,
other floats with 12 significant digits, rows are pre-sorted, and line
endings are always "\\n". Wall-clock timings are not deterministic and live
in their own sidecar (timings.csv), never in the metric files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Union

from .selection import SweepResult

_PCT = "{:.6f}"
_GEN = "{:.12g}"


def _params_json(params: dict) -> str:
    return json.dumps(params, separators=(",", ":"))


def _open_writer(path):
    fh = open(path, "w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def write_cells_csv(path: Union[str, Path], result: SweepResult) -> None:
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(["algorithm", "layer", "cell_idx", "params", "seed",
                         "param_count", "dev_f1", "dev_eer_pct"])
        for res in result.cells:
            cell = res.cell
            writer.writerow([
                cell.algorithm, cell.layer, cell.cell_idx,
                _params_json(cell.params), cell.seed, res.param_count,
                _GEN.format(res.dev_f1), _PCT.format(100.0 * res.dev_eer)])


def write_report_csv(path: Union[str, Path], result: SweepResult) -> None:
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(["algorithm", "layer", "cell_idx", "params", "seed",
                         "param_count", "dev_f1", "dev_eer_pct",
                         "eval_eer_pct", "eval_f1"])
        for win in result.winners:
            cell = win.cell
            writer.writerow([
                cell.algorithm, cell.layer, cell.cell_idx,
                _params_json(cell.params), cell.seed, win.param_count,
                _GEN.format(win.dev_f1), _PCT.format(100.0 * win.dev_eer),
                _PCT.format(100.0 * win.eval_eer), _GEN.format(win.eval_f1)])


def write_summary_csv(path: Union[str, Path], result: SweepResult) -> None:
    """Per-algorithm aggregate: best layer by eval EER plus the layer mean."""
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(["algorithm", "best_layer", "best_eval_eer_pct",
                         "mean_eval_eer_pct", "best_param_count"])
        for algorithm in result.algorithms:
            wins = [w for w in result.winners if w.cell.algorithm == algorithm]
            if not wins:
                continue
            best = min(wins, key=lambda w: (w.eval_eer, w.cell.layer))
            mean_eer = sum(w.eval_eer for w in wins) / len(wins)
            writer.writerow([
                algorithm, best.cell.layer,
                _PCT.format(100.0 * best.eval_eer),
                _PCT.format(100.0 * mean_eer), best.param_count])


def write_timings_csv(path: Union[str, Path], result: SweepResult) -> None:
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(["phase", "algorithm", "layer", "cell_idx",
                         "train_seconds"])
        for res in result.cells:
            writer.writerow(["grid", res.cell.algorithm, res.cell.layer,
                             res.cell.cell_idx, f"{res.train_seconds:.3f}"])
        for win in result.winners:
            writer.writerow(["winner", win.cell.algorithm, win.cell.layer,
                             win.cell.cell_idx, f"{win.train_seconds:.3f}"])


def render_winners(result: SweepResult) -> str:
    """Human-readable winner table for terminal output."""
    headers = ["algorithm", "layer", "params", "param_count",
               "dev_f1", "eval_eer_pct", "eval_f1"]
    rows = [[w.cell.algorithm, str(w.cell.layer), _params_json(w.cell.params),
             str(w.param_count), f"{w.dev_f1:.4f}",
             f"{100.0 * w.eval_eer:.3f}", f"{w.eval_f1:.4f}"]
            for w in result.winners]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def write_all(out_dir: Union[str, Path], result: SweepResult) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "cells": out_dir / "cells.csv",
        "report": out_dir / "report.csv",
        "summary": out_dir / "summary.csv",
        "timings": out_dir / "timings.csv",
    }
    write_cells_csv(paths["cells"], result)
    write_report_csv(paths["report"], result)
    write_summary_csv(paths["summary"], result)
    write_timings_csv(paths["timings"], result)
    return paths
