"""Visual quality and stability measures.

Aspect ratio is reported as short side over long side, so 1 is square and
values near 0 are slivers.  Corner travel between two placements of the same
leaf is the summed straight-line displacement of the four matched corners,
normalized by four root diagonals; no corner can travel farther than the
diagonal, so the value stays in [0, 1].  Stability compares a cell's actual
travel against its travel in the transition's reference layout and only
counts the excess, so motion forced by the data itself is not billed to the
algorithm.

Per-step values average over the rectangles present; per-dataset values
average over steps (transitions for the travel-based measures).  Transition
measures are recorded on their source step; the final step has none.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Rect


def aspect_ratio(rect: Rect) -> float:
    if rect.w <= 0.0 or rect.h <= 0.0:
        raise ValueError("degenerate rectangle")
    return min(rect.w, rect.h) / max(rect.w, rect.h)


def corner_travel(a: Rect, b: Rect, root: Rect) -> float:
    total = 0.0
    for (ax, ay), (bx, by) in zip(a.corners(), b.corners()):
        total += math.hypot(ax - bx, ay - by)
    return total / (4.0 * root.diagonal)


def stability_excess(travel: float, reference_travel: float) -> float:
    return max(0.0, travel - reference_travel)


@dataclass(frozen=True)
class StepMetrics:
    timestep: int
    mean_rho: float
    mean_ct: float | None = None
    mean_ct_baseline: float | None = None
    mean_sigma: float | None = None


@dataclass(frozen=True)
class MetricRecord:
    dataset: str
    algorithm: str
    steps: tuple
    mean_rho: float
    mean_ct: float | None
    mean_ct_baseline: float | None
    mean_sigma: float | None


def _mean(values) -> float | None:
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else None


def summarize(dataset: str, algorithm: str, steps) -> MetricRecord:
    steps = tuple(steps)
    return MetricRecord(
        dataset=dataset,
        algorithm=algorithm,
        steps=steps,
        mean_rho=_mean(s.mean_rho for s in steps),
        mean_ct=_mean(s.mean_ct for s in steps),
        mean_ct_baseline=_mean(s.mean_ct_baseline for s in steps),
        mean_sigma=_mean(s.mean_sigma for s in steps),
    )
