"""Command line front end.

Subcommands cover the full pipeline: generate synthetic datasets, classify
datasets, lay out a single dataset, build a transition reference, evaluate a
dataset/algorithm matrix into CSV, and render report figures from CSVs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .baseline import build_baseline
from .classify import ALL_CLASSES, classify, parse_label
from .geometry import Rect
from .harness import (
    ALL_ALGORITHMS,
    evaluate_pair,
    pair_seed,
    run_matrix,
    write_classification_csv,
    write_results_csv,
)
from .stateful import advance, current_layout, init_state
from .stateless import STATELESS, lay_out_tree
from .synthetic import generate_synthetic, sanitize_label
from .tree import normalize_step, parse_dataset, serialize_dataset


def _parse_rect(text: str) -> Rect:
    try:
        w, h = text.lower().split("x")
        rect = Rect(0.0, 0.0, float(w), float(h))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from exc
    if rect.w <= 0 or rect.h <= 0:
        raise argparse.ArgumentTypeError("rect sides must be positive")
    return rect


def _parse_algorithms(text: str) -> list:
    if text.strip().upper() == "ALL":
        return list(ALL_ALGORITHMS)
    out = []
    for part in text.split(","):
        name = part.strip().upper()
        if not name:
            continue
        if name not in ALL_ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {part.strip()!r}")
        out.append(name)
    if not out:
        raise argparse.ArgumentTypeError("no algorithms given")
    return out


def _dataset_files(inputs) -> list:
    files = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")))
        elif p.exists():
            files.append(p)
        else:
            raise FileNotFoundError(f"no such dataset path: {item}")
    if not files:
        raise FileNotFoundError("no dataset files found")
    return files


def _load_datasets(inputs) -> list:
    return [parse_dataset(p.read_bytes()) for p in _dataset_files(inputs)]


def _rect_json(rect: Rect) -> dict:
    return {"x": rect.x, "y": rect.y, "w": rect.w, "h": rect.h}


def _cells_json(cells: dict) -> list:
    return [
        {"id": cid, "x": r.x, "y": r.y, "w": r.w, "h": r.h}
        for cid, r in sorted(cells.items())
    ]


def _layouts_for(tree, algorithm: str, rect: Rect):
    steps = [normalize_step(tree, t, rect.area) for t in range(tree.num_timesteps)]
    if algorithm in STATELESS:
        return steps, [lay_out_tree(tree, s, rect, algorithm) for s in steps]
    state = init_state(tree, steps[0], rect, algorithm)
    layouts = [current_layout(state)]
    for s in steps[1:]:
        layouts.append(advance(state, s))
    return steps, layouts


def _cmd_generate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.classes.strip().upper() == "ALL":
        labels = [dc.label for dc in ALL_CLASSES]
    else:
        labels = [parse_label(part.strip()).label for part in args.classes.split(",")]
    rows = []
    for label in labels:
        for i in range(args.per_class):
            seed_i = pair_seed(args.seed, label, str(i))
            name = f"syn-{sanitize_label(label)}-s{args.seed}-{i:02d}"
            tree = generate_synthetic(
                label,
                seed=seed_i,
                num_leaves=args.leaves,
                num_timesteps=args.steps,
                name=name,
            )
            path = out_dir / f"{tree.name}.json"
            path.write_bytes(serialize_dataset(tree))
            rows.append((tree.name, classify(tree)))
            print(f"wrote {path}")
    write_classification_csv(rows, out_dir / "classification.csv")
    print(f"wrote {out_dir / 'classification.csv'}")
    return 0


def _cmd_classify(args) -> int:
    rows = [(tree.name, classify(tree)) for tree in _load_datasets(args.input)]
    write_classification_csv(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} datasets)")
    return 0


def _cmd_layout(args) -> int:
    tree = parse_dataset(Path(args.input).read_bytes())
    alg = args.algorithms[0] if isinstance(args.algorithms, list) else args.algorithms
    _, layouts = _layouts_for(tree, alg, args.rect)
    doc = {
        "dataset": tree.name,
        "algorithm": alg,
        "rect": _rect_json(args.rect),
        "steps": [
            {"t": t, "cells": _cells_json(lay.cells)} for t, lay in enumerate(layouts)
        ],
    }
    Path(args.out).write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {args.out}")
    return 0


def _cmd_baseline(args) -> int:
    tree = parse_dataset(Path(args.input).read_bytes())
    if not 0 <= args.t < tree.num_timesteps - 1:
        raise SystemExit(f"--t must name a transition source step (0..{tree.num_timesteps - 2})")
    alg = args.algorithms[0] if isinstance(args.algorithms, list) else args.algorithms
    steps, layouts = _layouts_for(tree, alg, args.rect)
    ref = build_baseline(layouts[args.t], dict(steps[args.t + 1].areas))
    doc = {
        "dataset": tree.name,
        "algorithm": alg,
        "t": args.t,
        "rect": _rect_json(args.rect),
    }
    if ref is None:
        doc["degenerate"] = True   # nothing survives this transition
    else:
        doc.update(
            {
                "cells": _cells_json(ref.layout.cells),
                "walls": _cells_json(ref.walls),
                "deleted": list(ref.deleted),
                "inserted_area": ref.inserted_area,
                "converged": ref.converged,
                "max_rel_area_error": ref.max_rel_area_error,
                "sweeps": ref.sweeps,
            }
        )
    Path(args.out).write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    trees = _load_datasets(args.input)
    result = run_matrix(trees, args.algorithms, rect=args.rect, seed=args.seed, jobs=args.jobs)
    write_results_csv(result.records, args.out)
    print(f"wrote {args.out} ({len(result.records)} pairs)")
    for (ds, alg), msg in sorted(result.failures.items()):
        print(f"FAILED {ds} / {alg}: {msg}", file=sys.stderr)
    return 1 if result.failures else 0


def _cmd_report(args) -> int:
    from .harness import read_classification_csv, read_results_csv
    from .reports import render_reports

    records = read_results_csv(args.results)
    classes = read_classification_csv(args.classification)
    files = render_reports(
        records,
        classes,
        args.out,
        seed=args.seed,
        min_class_size=args.min_class_size,
    )
    for f in files:
        print(f"wrote {f}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tmbench",
        description="Benchmark harness for time-dependent rectangular treemaps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write synthetic datasets for requested classes")
    p.add_argument("--classes", default="ALL", help="comma separated class labels, or ALL")
    p.add_argument("--per-class", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--leaves", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("classify", help="classify datasets into the 54 classes")
    p.add_argument("--input", nargs="+", required=True, help="dataset files or directories")
    p.add_argument("--out", required=True, help="classification CSV path")
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("layout", help="lay out one dataset over all its timesteps")
    p.add_argument("--input", required=True)
    p.add_argument("--algorithms", type=_parse_algorithms, default=["SQR"], metavar="ALG")
    p.add_argument("--rect", type=_parse_rect, default=_parse_rect("1000x1000"))
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_layout)

    p = sub.add_parser("baseline", help="build the reference layout for one transition")
    p.add_argument("--input", required=True)
    p.add_argument("--algorithms", type=_parse_algorithms, default=["SQR"], metavar="ALG")
    p.add_argument("--t", type=int, default=0, help="transition source step")
    p.add_argument("--rect", type=_parse_rect, default=_parse_rect("1000x1000"))
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_baseline)

    p = sub.add_parser("evaluate", help="run the dataset x algorithm matrix into CSV")
    p.add_argument("--input", nargs="+", required=True)
    p.add_argument("--algorithms", type=_parse_algorithms, default=list(ALL_ALGORITHMS))
    p.add_argument("--rect", type=_parse_rect, default=_parse_rect("1000x1000"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_evaluate)

    p = sub.add_parser("report", help="render figures and tables from result CSVs")
    p.add_argument("--results", required=True)
    p.add_argument("--classification", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-class-size", type=int, default=50)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_report)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
