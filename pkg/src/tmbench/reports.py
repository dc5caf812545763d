"""Figures and tables for an evaluation run.

Everything renders headless to SVG next to the delimited output, with the
hash salt and date metadata pinned so identical runs produce identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .classify import (  # noqa: E402
    CHANGE_CLASSES,
    INSDEL_CLASSES,
    LEVELS_CLASSES,
    VARIANCE_CLASSES,
)
from .harness import ALL_ALGORITHMS, consistency, score_table  # noqa: E402
from .synthetic import sanitize_label  # noqa: E402

plt.rcParams["svg.hashsalt"] = "tmbench"
_META = {"Date": None}
_CAPPED_COLOR = "#7e2f8e"   # scores capped at 1 stand out from the ramp

_FEATURES = (
    ("levels", LEVELS_CLASSES),
    ("variance", VARIANCE_CLASSES),
    ("change", CHANGE_CLASSES),
    ("insdel", INSDEL_CLASSES),
)


def _alg_order(records) -> list:
    present = {rec.algorithm for rec in records}
    ordered = [a for a in ALL_ALGORITHMS if a in present]
    ordered.extend(sorted(present - set(ordered)))
    return ordered


def _save(fig, path: Path) -> str:
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)
    return str(path)


def _matrix_plots(table, classes, algorithms, out_dir: Path) -> list:
    files = []
    by_class = {}
    for ds in table:
        label = classes.get(ds)
        if label is not None:
            by_class.setdefault(label.label, []).append(ds)
    for label in sorted(by_class):
        datasets = by_class[label]
        for metric in ("quality", "stability"):
            cols = [ds for ds in datasets if table[ds][metric]]
            if not cols:
                continue
            mean_by_ds = {
                ds: np.mean([table[ds][metric].get(a, np.nan) for a in algorithms])
                for ds in cols
            }
            cols.sort(key=lambda ds: (mean_by_ds[ds], ds))
            mean_by_alg = {
                a: np.nanmean([table[ds][metric].get(a, np.nan) for ds in cols])
                for a in algorithms
            }
            # worst algorithms on top, best along the bottom edge
            rows = sorted(algorithms, key=lambda a: (-mean_by_alg[a], a))
            m = np.full((len(rows), len(cols)), np.nan)
            for i, a in enumerate(rows):
                for j, ds in enumerate(cols):
                    m[i, j] = table[ds][metric].get(a, np.nan)
            cmap = plt.get_cmap("viridis").copy()
            cmap.set_bad(_CAPPED_COLOR)
            shown = np.ma.masked_greater_equal(m, 1.0)
            fig, ax = plt.subplots(
                figsize=(max(4.0, 0.28 * len(cols) + 2.0), 0.30 * len(rows) + 1.6)
            )
            im = ax.imshow(shown, cmap=cmap, vmin=0.0, vmax=1.0, aspect="auto")
            ax.set_yticks(range(len(rows)), rows, fontsize=7)
            ax.set_xticks(range(len(cols)), cols, fontsize=5, rotation=90)
            ax.set_title(f"{label}: {metric} scores (capped cells in purple)", fontsize=9)
            fig.colorbar(im, ax=ax, shrink=0.8)
            fig.tight_layout()
            out = out_dir / f"matrix_{sanitize_label(label)}_{metric}.svg"
            files.append(_save(fig, out))
    return files


def _mean_scores(table, algorithms, metric) -> dict:
    out = {}
    for a in algorithms:
        xs = [table[ds][metric][a] for ds in table if a in table[ds][metric]]
        if xs:
            out[a] = sum(xs) / len(xs)
    return out


def _ranking(table, algorithms, out_dir: Path) -> list:
    quality = _mean_scores(table, algorithms, "quality")
    stability = _mean_scores(table, algorithms, "stability")
    q_rank = sorted(quality, key=lambda a: (quality[a], a))
    s_rank = sorted(stability, key=lambda a: (stability[a], a))
    rows = []
    for i in range(max(len(q_rank), len(s_rank))):
        qa = q_rank[i] if i < len(q_rank) else ""
        sa = s_rank[i] if i < len(s_rank) else ""
        rows.append(
            [
                i + 1,
                qa,
                f"{quality[qa]:.4f}" if qa else "",
                sa,
                f"{stability[sa]:.4f}" if sa else "",
            ]
        )
    csv_path = out_dir / "ranking.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["rank", "quality_algorithm", "quality_score", "stability_algorithm", "stability_score"]
        )
        w.writerows(rows)

    fig, ax = plt.subplots(figsize=(7.0, 0.32 * len(rows) + 1.2))
    ax.axis("off")
    tbl = ax.table(
        cellText=[[str(c) for c in r] for r in rows],
        colLabels=["rank", "quality", "score", "stability", "score"],
        loc="center",
    )
    tbl.auto_set_font_size(False)
    tbl.set_fontsize(8)
    ax.set_title("Mean relative scores, both columns sorted best first", fontsize=9)
    fig.tight_layout()
    return [str(csv_path), _save(fig, out_dir / "ranking.svg")]


def _feature_lines(table, classes, algorithms, out_dir: Path) -> list:
    files = []
    for feature, values in _FEATURES:
        fig, ax = plt.subplots(figsize=(6.0, 5.0))
        drew = False
        for a in algorithms:
            xs, ys = [], []
            for value in values:
                class_q, class_s = [], []
                by_class = {}
                for ds, dc in classes.items():
                    if ds in table and getattr(dc, feature) == value:
                        by_class.setdefault(dc.label, []).append(ds)
                for members in by_class.values():
                    q = [table[ds]["quality"][a] for ds in members if a in table[ds]["quality"]]
                    s = [table[ds]["stability"][a] for ds in members if a in table[ds]["stability"]]
                    if q and s:
                        class_q.append(sum(q) / len(q))
                        class_s.append(sum(s) / len(s))
                if class_q:
                    xs.append(sum(class_s) / len(class_s))
                    ys.append(sum(class_q) / len(class_q))
            if len(xs) == len(values):
                ax.plot(xs, ys, marker="o", markersize=3, linewidth=1, label=a)
                drew = True
        if not drew:
            plt.close(fig)
            continue
        ax.set_xlabel("stability score (lower is better)")
        ax.set_ylabel("quality score (lower is better)")
        ax.set_title(f"Score drift across {feature} subclasses ({' > '.join(values)})", fontsize=9)
        ax.legend(fontsize=6, ncol=2)
        fig.tight_layout()
        files.append(_save(fig, out_dir / f"feature_{feature}.svg"))
    return files


def _consistency_report(table, classes, algorithms, out_dir: Path, seed, min_class_size) -> list:
    rng = np.random.default_rng(seed)
    by_class = {}
    for ds in table:
        dc = classes.get(ds)
        if dc is not None:
            by_class.setdefault(dc.label, []).append(ds)
    all_ds = sorted(ds for ds in table if table[ds]["stability"])
    rows = []
    for label in sorted(by_class):
        members = sorted(ds for ds in by_class[label] if table[ds]["stability"])
        if len(members) < min_class_size:
            continue
        k = min(50, len(members))
        sample = list(rng.choice(members, size=k, replace=False))
        c_q = consistency({ds: table[ds]["quality"] for ds in sample}, algorithms)
        c_s = consistency({ds: table[ds]["stability"] for ds in sample}, algorithms)
        rand_q, rand_s = [], []
        for _ in range(20):
            rsample = list(rng.choice(all_ds, size=min(k, len(all_ds)), replace=False))
            rand_q.append(consistency({ds: table[ds]["quality"] for ds in rsample}, algorithms))
            rand_s.append(consistency({ds: table[ds]["stability"] for ds in rsample}, algorithms))
        rows.append(
            [
                label,
                len(members),
                f"{c_q:.6f}",
                f"{np.mean(rand_q):.6f}",
                f"{c_s:.6f}",
                f"{np.mean(rand_s):.6f}",
            ]
        )
    csv_path = out_dir / "consistency.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "class",
                "datasets",
                "c_quality",
                "c_quality_random",
                "c_stability",
                "c_stability_random",
            ]
        )
        w.writerows(rows)
    files = [str(csv_path)]
    if rows:
        labels = [r[0] for r in rows]
        x = np.arange(len(rows))
        fig, ax = plt.subplots(figsize=(max(5.0, 0.5 * len(rows) + 2.0), 4.0))
        ax.bar(x - 0.2, [float(r[4]) for r in rows], width=0.4, label="class collection")
        ax.bar(x + 0.2, [float(r[5]) for r in rows], width=0.4, label="random collections")
        ax.set_xticks(x, labels, rotation=90, fontsize=6)
        ax.set_ylabel("stability score variance, summed over algorithms")
        ax.set_title("Within-class vs random consistency", fontsize=9)
        ax.legend(fontsize=7)
        fig.tight_layout()
        files.append(_save(fig, out_dir / "consistency.svg"))
    return files


def render_reports(
    records,
    classes: dict,
    out_dir,
    seed: int = 0,
    min_class_size: int = 50,
) -> list:
    """Write all figures and tables; returns the list of files produced."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = score_table(records)
    algorithms = _alg_order(records)
    files = []
    files.extend(_matrix_plots(table, classes, algorithms, out_dir))
    files.extend(_ranking(table, algorithms, out_dir))
    files.extend(_feature_lines(table, classes, algorithms, out_dir))
    files.extend(_consistency_report(table, classes, algorithms, out_dir, seed, min_class_size))
    return files
