"""Evaluation harness: run algorithms over datasets and score the results.

Scores are relative within a dataset: 0 for the best algorithm, 0.5 at the
median, linear in between and capped at 1, so "how much worse than the
field" is comparable across datasets of very different difficulty.
"""

from __future__ import annotations

import csv
import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .baseline import build_baseline
from .classify import DataClass
from .geometry import Rect
from .metrics import (
    MetricRecord,
    StepMetrics,
    aspect_ratio,
    corner_travel,
    stability_excess,
    summarize,
)
from .stateful import advance, current_layout, init_state
from .stateless import STATELESS, lay_out_tree
from .tree import normalize_step

STATEFUL_ALGORITHMS = ("LM0", "LM4", "GIT")
ALL_ALGORITHMS = tuple(STATELESS) + STATEFUL_ALGORITHMS

DEFAULT_RECT = Rect(0.0, 0.0, 1000.0, 1000.0)

RESULTS_HEADER = (
    "dataset",
    "algorithm",
    "timestep",
    "mean_rho",
    "mean_ct",
    "mean_ct_baseline",
    "mean_sigma",
)
CLASSIFICATION_HEADER = ("dataset", "levels", "variance", "change", "insdel", "label")


def pair_seed(seed: int, dataset: str, algorithm: str) -> int:
    """Stable per-pair seed so runs are reproducible task by task."""
    digest = hashlib.sha256(f"{seed}|{dataset}|{algorithm}".encode()).hexdigest()
    return int(digest[:16], 16)


def evaluate_pair(
    tree,
    algorithm: str,
    rect: Rect = DEFAULT_RECT,
    seed: int = 0,
    collect_layouts: bool = False,
):
    """Metrics for one dataset under one algorithm.

    The seed is part of the interface for reproducibility; the shipped
    algorithms are deterministic and do not consume it.
    """
    alg = algorithm.upper()
    steps = [normalize_step(tree, t, rect.area) for t in range(tree.num_timesteps)]
    if alg in STATELESS:
        layouts = [lay_out_tree(tree, s, rect, alg) for s in steps]
    elif alg in STATEFUL_ALGORITHMS:
        state = init_state(tree, steps[0], rect, alg)
        layouts = [current_layout(state)]
        for s in steps[1:]:
            layouts.append(advance(state, s))
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")

    step_metrics = []
    for t, lay in enumerate(layouts):
        ratios = [aspect_ratio(r) for r in lay.cells.values()]
        mean_rho = sum(ratios) / len(ratios)
        mean_ct = mean_ctb = mean_sigma = None
        if t + 1 < len(layouts):
            nxt = layouts[t + 1]
            common = sorted(set(lay.cells) & set(nxt.cells))
            if common:
                ref = build_baseline(lay, dict(steps[t + 1].areas))
                ct, ctb, sig = [], [], []
                for cid in common:
                    d = corner_travel(lay.cells[cid], nxt.cells[cid], rect)
                    db = corner_travel(lay.cells[cid], ref.layout.cells[cid], rect)
                    ct.append(d)
                    ctb.append(db)
                    sig.append(stability_excess(d, db))
                mean_ct = sum(ct) / len(ct)
                mean_ctb = sum(ctb) / len(ctb)
                mean_sigma = sum(sig) / len(sig)
        step_metrics.append(
            StepMetrics(t, mean_rho, mean_ct, mean_ctb, mean_sigma)
        )
    record = summarize(tree.name, alg, step_metrics)
    return record, (layouts if collect_layouts else None)


def _run_one(task):
    tree, alg, rect, seed = task
    try:
        record, _ = evaluate_pair(tree, alg, rect, seed=seed)
        return tree.name, alg, record, None
    except Exception as exc:  # isolate failures per pair
        return tree.name, alg, None, f"{type(exc).__name__}: {exc}"


@dataclass
class MatrixResult:
    records: list = field(default_factory=list)
    failures: dict = field(default_factory=dict)


def run_matrix(trees, algorithms, rect: Rect = DEFAULT_RECT, seed: int = 0, jobs: int = 1) -> MatrixResult:
    tasks = [
        (tree, alg.upper(), rect, pair_seed(seed, tree.name, alg.upper()))
        for tree in trees
        for alg in algorithms
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            outcomes = list(ex.map(_run_one, tasks, chunksize=1))
    else:
        outcomes = [_run_one(t) for t in tasks]
    result = MatrixResult()
    for name, alg, record, err in outcomes:
        if err is None:
            result.records.append(record)
        else:
            result.failures[(name, alg)] = err
    return result


# -- scoring -----------------------------------------------------------------


def relative_scores(values: dict, higher_better: bool) -> dict:
    """0 at the best value, 0.5 at the median, linear, capped at 1.

    With the median equal to the best (no spread to speak of), the best
    scores 0 and everything else 1.
    """
    vals = sorted(values.values(), reverse=higher_better)
    best = vals[0]
    n = len(vals)
    med = vals[n // 2] if n % 2 == 1 else 0.5 * (vals[n // 2 - 1] + vals[n // 2])
    span = best - med if higher_better else med - best
    out = {}
    for k, v in values.items():
        d = best - v if higher_better else v - best
        if span <= 0.0:
            out[k] = 0.0 if d <= 0.0 else 1.0
        else:
            out[k] = min(1.0, 0.5 * d / span)
    return out


def score_table(records) -> dict:
    """Per dataset: quality and stability scores per algorithm.

    Quality scores come from mean aspect ratio (higher is better), stability
    scores from mean excess travel (lower is better).  Datasets without any
    stability figure (single step) get no stability entry.
    """
    by_ds = {}
    for rec in records:
        by_ds.setdefault(rec.dataset, {})[rec.algorithm] = rec
    table = {}
    for ds, recs in by_ds.items():
        quality = relative_scores(
            {alg: r.mean_rho for alg, r in recs.items()}, higher_better=True
        )
        sig = {alg: r.mean_sigma for alg, r in recs.items() if r.mean_sigma is not None}
        stability = relative_scores(sig, higher_better=False) if sig else {}
        table[ds] = {"quality": quality, "stability": stability}
    return table


def consistency(scores_by_dataset: dict, algorithms) -> float:
    """Sum over algorithms of the population variance of their scores."""
    total = 0.0
    for alg in algorithms:
        xs = [s[alg] for s in scores_by_dataset.values() if alg in s]
        if len(xs) < 2:
            continue
        mean = sum(xs) / len(xs)
        total += sum((x - mean) ** 2 for x in xs) / len(xs)
    return total


# -- delimited output --------------------------------------------------------


def _fmt(v) -> str:
    return "" if v is None else f"{v:.9g}"


def _num(s):
    return None if s == "" else float(s)


def write_results_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULTS_HEADER)
        for rec in records:
            for s in rec.steps:
                w.writerow(
                    [
                        rec.dataset,
                        rec.algorithm,
                        s.timestep,
                        _fmt(s.mean_rho),
                        _fmt(s.mean_ct),
                        _fmt(s.mean_ct_baseline),
                        _fmt(s.mean_sigma),
                    ]
                )
            w.writerow(
                [
                    rec.dataset,
                    rec.algorithm,
                    "ALL",
                    _fmt(rec.mean_rho),
                    _fmt(rec.mean_ct),
                    _fmt(rec.mean_ct_baseline),
                    _fmt(rec.mean_sigma),
                ]
            )


def read_results_csv(path) -> list:
    order = []
    steps = {}
    summaries = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RESULTS_HEADER:
            raise ValueError(f"unexpected results header: {header}")
        for ds, alg, t, rho, ct, ctb, sigma in reader:
            key = (ds, alg)
            if key not in steps:
                steps[key] = []
                order.append(key)
            if t == "ALL":
                summaries[key] = (_num(rho), _num(ct), _num(ctb), _num(sigma))
            else:
                steps[key].append(
                    StepMetrics(int(t), _num(rho), _num(ct), _num(ctb), _num(sigma))
                )
    records = []
    for key in order:
        ds, alg = key
        rho, ct, ctb, sigma = summaries.get(key, (None, None, None, None))
        records.append(
            MetricRecord(
                dataset=ds,
                algorithm=alg,
                steps=tuple(steps[key]),
                mean_rho=rho,
                mean_ct=ct,
                mean_ct_baseline=ctb,
                mean_sigma=sigma,
            )
        )
    return records


def write_classification_csv(rows, path) -> None:
    """rows: iterable of (dataset name, DataClass)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CLASSIFICATION_HEADER)
        for name, dc in rows:
            w.writerow([name, dc.levels, dc.variance, dc.change, dc.insdel, dc.label])


def read_classification_csv(path) -> dict:
    out = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CLASSIFICATION_HEADER:
            raise ValueError(f"unexpected classification header: {header}")
        for name, levels, variance, change, insdel, label in reader:
            dc = DataClass(levels, variance, change, insdel)
            if dc.label != label:
                raise ValueError(f"inconsistent class row for {name!r}")
            out[name] = dc
    return out
