"""Benchmark harness for time-dependent rectangular treemap algorithms."""

from .baseline import BaselineResult, build_baseline
from .classify import ALL_CLASSES, DataClass, classify, parse_label
from .geometry import (
    Layout,
    Rect,
    ValidationReport,
    maximal_segments,
    order_equivalent,
    validate_layout,
)
from .harness import (
    ALL_ALGORITHMS,
    STATEFUL_ALGORITHMS,
    MatrixResult,
    evaluate_pair,
    relative_scores,
    run_matrix,
    score_table,
    write_classification_csv,
    write_results_csv,
)
from .metrics import aspect_ratio, corner_travel, stability_excess
from .stateful import LayoutState, advance, current_layout, init_state
from .stateless import STATELESS, lay_out_tree
from .structure import SupportStructure, hill_climb_realize
from .synthetic import generate_synthetic
from .tree import TimeVaryingTree, normalize_step, parse_dataset, serialize_dataset

__version__ = "0.1.0"

__all__ = [
    "ALL_ALGORITHMS",
    "ALL_CLASSES",
    "BaselineResult",
    "DataClass",
    "Layout",
    "LayoutState",
    "MatrixResult",
    "Rect",
    "STATEFUL_ALGORITHMS",
    "STATELESS",
    "SupportStructure",
    "TimeVaryingTree",
    "ValidationReport",
    "advance",
    "aspect_ratio",
    "build_baseline",
    "classify",
    "corner_travel",
    "current_layout",
    "evaluate_pair",
    "generate_synthetic",
    "hill_climb_realize",
    "init_state",
    "lay_out_tree",
    "maximal_segments",
    "normalize_step",
    "order_equivalent",
    "parse_dataset",
    "parse_label",
    "relative_scores",
    "run_matrix",
    "score_table",
    "serialize_dataset",
    "stability_excess",
    "validate_layout",
    "write_classification_csv",
    "write_results_csv",
]
