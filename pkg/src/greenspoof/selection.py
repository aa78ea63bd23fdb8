"""Grid enumeration, parallel cell training, and winner selection.

A *cell* is one (algorithm, layer, hyperparameter combination). Cells are
fitted on train, scored on dev, and the per-(algorithm, layer) winner —
best dev F1, ties to fewer parameters, then to the earlier grid position —
is refit and scored on eval exactly once. Eval data never influences
selection.

Every cell trains from its own seed derived by hashing
"{master_seed}:{algorithm}:{layer}:{cell_idx}", so results do not depend on
scheduling or worker count.
"""

from __future__ import annotations

import hashlib
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from multiprocessing import get_context
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .classifiers import make_classifier
from .errors import UsageError
from .features import design_matrix, pool_records
from .metrics import eer, f1_score
from .store import assemble, parse_protocol, read_embeddings

DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    "knn": {"k": [3, 5, 6]},
    "logreg": {"C": [0.2, 0.1, 10.0]},
    "svm": {"C": [0.2, 0.1, 1.0]},
    "gnb": {"var_smoothing": [1e-9]},
    "tree": {"criterion": ["gini", "entropy"], "max_depth": [50, 100, 150]},
    "mlp": {"hidden": [50, 100], "batch_size": [32, 64],
            "learning_rate": ["constant", "invscaling"]},
}


def expand_grid(grid: dict[str, list]) -> list[dict]:
    """Cartesian product over the grid's keys in their declared order."""
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*grid.values())]


def cell_seed(master_seed: int, algorithm: str, layer: int, cell_idx: int) -> int:
    text = f"{master_seed}:{algorithm}:{layer}:{cell_idx}"
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class Cell:
    algorithm: str
    layer: int
    cell_idx: int
    params: dict
    seed: int


@dataclass(frozen=True)
class CellResult:
    cell: Cell
    param_count: int
    dev_f1: float
    dev_eer: float
    train_seconds: float


@dataclass(frozen=True)
class WinnerResult:
    cell: Cell
    param_count: int
    dev_f1: float
    dev_eer: float
    eval_eer: float
    eval_f1: float
    train_seconds: float


class DataSource:
    """Pooled design matrices per (layer, partition), loaded from GAIE files.

    Only paths travel across process boundaries; each worker loads and
    caches the matrices it actually touches. Frame-level inputs are mean
    pooled on load, and single-frame (already pooled) inputs pass through
    unchanged.
    """

    def __init__(self, embedding_files: dict[int, dict[str, Path]],
                 protocol_files: dict[str, Path]):
        self.embedding_files = {
            int(layer): {p: Path(f) for p, f in files.items()}
            for layer, files in embedding_files.items()}
        self.protocol_files = {p: Path(f) for p, f in protocol_files.items()}
        self._cache: dict[tuple[int, str], tuple[np.ndarray, np.ndarray]] = {}

    @classmethod
    def from_directory(cls, root, layers: Optional[Sequence[int]] = None,
                       partitions: Sequence[str] = ("train", "dev", "eval")):
        """Expects {partition}_{layer}.gaie plus {partition}.protocol.txt."""
        root = Path(root)
        protocol_files = {}
        for part in partitions:
            path = root / f"{part}.protocol.txt"
            if not path.exists():
                raise UsageError(f"missing protocol file {path}")
            protocol_files[part] = path
        if layers is None:
            layers = sorted({
                int(p.stem.split("_")[-1]) for p in root.glob("*_*.gaie")})
            if not layers:
                raise UsageError(f"no embedding files under {root}")
        embedding_files = {}
        for layer in layers:
            files = {}
            for part in partitions:
                path = root / f"{part}_{layer}.gaie"
                if not path.exists():
                    raise UsageError(f"missing embedding file {path}")
                files[part] = path
            embedding_files[layer] = files
        return cls(embedding_files, protocol_files)

    @property
    def layers(self) -> list[int]:
        return sorted(self.embedding_files)

    def matrices(self, layer: int, partition: str) -> tuple[np.ndarray, np.ndarray]:
        key = (layer, partition)
        if key not in self._cache:
            try:
                emb_path = self.embedding_files[layer][partition]
            except KeyError:
                raise UsageError(f"no data for layer {layer} {partition}") from None
            records = read_embeddings(emb_path)
            entries = parse_protocol(
                self.protocol_files[partition].read_text(encoding="utf-8"))
            pooled = pool_records(records)
            dataset = assemble(pooled, entries, partition)
            self._cache[key] = design_matrix(dataset)
        return self._cache[key]


_WORKER_SOURCE: Optional[DataSource] = None


def _init_worker(source: DataSource) -> None:
    global _WORKER_SOURCE
    _WORKER_SOURCE = source


def _fit_cell(cell: Cell, source: DataSource):
    X, y = source.matrices(cell.layer, "train")
    dev = source.matrices(cell.layer, "dev")
    model = make_classifier(cell.algorithm, cell.params, seed=cell.seed)
    start = time.perf_counter()
    model.fit(X, y, dev=dev)
    elapsed = time.perf_counter() - start
    return model, dev, elapsed


def _run_cell(cell: Cell) -> CellResult:
    model, (Xd, yd), elapsed = _fit_cell(cell, _WORKER_SOURCE)
    scores = model.decision_scores(Xd)
    return CellResult(
        cell=cell,
        param_count=model.param_count(),
        dev_f1=f1_score(scores, yd, model.default_threshold),
        dev_eer=eer(scores, yd),
        train_seconds=elapsed,
    )


def _run_winner(cell: Cell) -> WinnerResult:
    model, (Xd, yd), elapsed = _fit_cell(cell, _WORKER_SOURCE)
    dev_scores = model.decision_scores(Xd)
    Xe, ye = _WORKER_SOURCE.matrices(cell.layer, "eval")
    eval_scores = model.decision_scores(Xe)
    return WinnerResult(
        cell=cell,
        param_count=model.param_count(),
        dev_f1=f1_score(dev_scores, yd, model.default_threshold),
        dev_eer=eer(dev_scores, yd),
        eval_eer=eer(eval_scores, ye),
        eval_f1=f1_score(eval_scores, ye, model.default_threshold),
        train_seconds=elapsed,
    )


def enumerate_cells(algorithms: Sequence[str], layers: Sequence[int],
                    grids: Optional[dict] = None,
                    master_seed: int = 1919) -> list[Cell]:
    if grids is None:
        grids = DEFAULT_GRIDS
    cells = []
    for algorithm in sorted(set(algorithms)):
        if algorithm not in grids:
            raise UsageError(f"no grid for algorithm {algorithm!r}")
        param_sets = expand_grid(grids[algorithm])
        for layer in sorted(set(layers)):
            for cell_idx, params in enumerate(param_sets):
                cells.append(Cell(
                    algorithm=algorithm, layer=int(layer), cell_idx=cell_idx,
                    params=params,
                    seed=cell_seed(master_seed, algorithm, layer, cell_idx)))
    return cells


def _map_tasks(fn, items, source: DataSource, jobs: int):
    if jobs <= 1:
        _init_worker(source)
        return [fn(item) for item in items]
    context = get_context("spawn")
    with ProcessPoolExecutor(max_workers=jobs, mp_context=context,
                             initializer=_init_worker,
                             initargs=(source,)) as pool:
        return list(pool.map(fn, items))


def select_winner(results: Sequence[CellResult]) -> CellResult:
    """Best dev F1; ties go to fewer parameters, then earlier grid order."""
    ordered = sorted(results, key=lambda r: r.cell.cell_idx)
    best = ordered[0]
    for cand in ordered[1:]:
        if cand.dev_f1 > best.dev_f1:
            best = cand
        elif cand.dev_f1 == best.dev_f1 and cand.param_count < best.param_count:
            best = cand
    return best


@dataclass(frozen=True)
class SweepResult:
    cells: tuple[CellResult, ...]
    winners: tuple[WinnerResult, ...]
    algorithms: tuple[str, ...]
    layers: tuple[int, ...]
    master_seed: int


def sweep(source: DataSource, algorithms: Sequence[str],
          layers: Optional[Sequence[int]] = None, grids: Optional[dict] = None,
          master_seed: int = 1919, jobs: int = 1) -> SweepResult:
    """Full grid over algorithms x layers, then winner evaluation."""
    if layers is None:
        layers = source.layers
    cells = enumerate_cells(algorithms, layers, grids, master_seed)
    results = _map_tasks(_run_cell, cells, source, jobs)

    groups: dict[tuple[str, int], list[CellResult]] = {}
    for res in results:
        groups.setdefault((res.cell.algorithm, res.cell.layer), []).append(res)
    winner_cells = [select_winner(group).cell
                    for key, group in sorted(groups.items())]
    winners = _map_tasks(_run_winner, winner_cells, source, jobs)

    ordered = sorted(results,
                     key=lambda r: (r.cell.algorithm, r.cell.layer, r.cell.cell_idx))
    return SweepResult(
        cells=tuple(ordered),
        winners=tuple(winners),
        algorithms=tuple(sorted(set(algorithms))),
        layers=tuple(sorted(set(layers))),
        master_seed=master_seed,
    )
