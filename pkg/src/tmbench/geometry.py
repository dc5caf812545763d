"""Rectangular layouts: validation, maximal segments, order-equivalence.

Screen coordinates throughout: origin at the top-left of the root rectangle,
y grows downward.  A cell's "top" side is its visually upper edge (smaller y),
its "bottom" side the lower edge (larger y).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

# Tolerances. Colinearity/adjacency snapping is relative to the root diagonal;
# area errors are relative to the root area.
EPS_FRAC = 1e-9
AREA_TOL = 1e-6
GEOM_TOL_FRAC = 1e-7


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def diagonal(self) -> float:
        return math.hypot(self.w, self.h)

    def corners(self) -> tuple[tuple[float, float], ...]:
        """(top-left, top-right, bottom-right, bottom-left)."""
        return (
            (self.x, self.y),
            (self.x2, self.y),
            (self.x2, self.y2),
            (self.x, self.y2),
        )

    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)


@dataclass
class Layout:
    """Cells keyed by leaf id; groups (optional) keyed by internal-node id."""

    root: Rect
    cells: dict[str, Rect]
    groups: dict[str, Rect] = field(default_factory=dict)


@dataclass
class ValidationReport:
    max_area_error: float        # relative to root area
    max_overlap: float           # length, same units as coordinates
    max_gap: float
    max_out_of_bounds: float
    area_errors: dict[str, float]
    missing: list[str]
    extra: list[str]

    def passes(self, root: Rect) -> bool:
        tol = GEOM_TOL_FRAC * root.diagonal
        return (
            not self.missing
            and not self.extra
            and self.max_area_error <= AREA_TOL
            and self.max_overlap <= tol
            and self.max_gap <= tol
            and self.max_out_of_bounds <= tol
        )


def validate_layout(layout: Layout, step) -> ValidationReport:
    """Check cell areas against step targets and cell tiling of the root.

    Coverage and disjointness are checked with a coordinate sweep: between
    consecutive distinct x coordinates the active cells' y intervals must
    tile the root's y extent.  Overlap/gap magnitudes are interval lengths.
    """
    root = layout.root
    expected = dict(step.areas)
    missing = sorted(set(expected) - set(layout.cells))
    extra = sorted(set(layout.cells) - set(expected))
    common = [cid for cid in layout.cells if cid in expected]

    area_errors = {
        cid: abs(layout.cells[cid].area - expected[cid]) / root.area for cid in common
    }
    max_area_error = max(area_errors.values(), default=0.0)

    rects = [layout.cells[cid] for cid in layout.cells]
    max_overlap = 0.0
    max_gap = 0.0
    max_oob = 0.0
    if rects:
        x0 = np.array([r.x for r in rects])
        x1 = np.array([r.x2 for r in rects])
        y0 = np.array([r.y for r in rects])
        y1 = np.array([r.y2 for r in rects])
        max_oob = max(
            0.0,
            float(np.max(root.x - x0)),
            float(np.max(x1 - root.x2)),
            float(np.max(root.y - y0)),
            float(np.max(y1 - root.y2)),
        )
        xs = np.unique(np.concatenate([x0, x1, [root.x, root.x2]]))
        xs = xs[(xs >= root.x - 1e-12 * root.w) & (xs <= root.x2 + 1e-12 * root.w)]
        # merge boundaries closer than the snapping tolerance, otherwise a
        # micro slab between two copies of "the same" edge has no active
        # cells and reports a phantom full-height gap
        eps = EPS_FRAC * root.diagonal
        merged = [float(xs[0])]
        for v in xs[1:]:
            if float(v) - merged[-1] > eps:
                merged.append(float(v))
        xs = np.array(merged)
        mids = (xs[:-1] + xs[1:]) / 2.0
        widths = xs[1:] - xs[:-1]
        for mid, width in zip(mids, widths):
            if width <= 0.0:
                continue
            active = np.nonzero((x0 <= mid) & (x1 > mid))[0]
            if active.size == 0:
                max_gap = max(max_gap, root.h)
                continue
            order = np.argsort(y0[active])
            ys = y0[active][order]
            ye = y1[active][order]
            cursor = root.y
            for a, b in zip(ys, ye):
                if a > cursor:
                    max_gap = max(max_gap, a - cursor)
                elif a < cursor:
                    max_overlap = max(max_overlap, cursor - a)
                cursor = max(cursor, b)
            if cursor < root.y2:
                max_gap = max(max_gap, root.y2 - cursor)

    return ValidationReport(
        max_area_error=max_area_error,
        max_overlap=max_overlap,
        max_gap=max_gap,
        max_out_of_bounds=max_oob,
        area_errors=area_errors,
        missing=missing,
        extra=extra,
    )


# ---------------------------------------------------------------------------
# maximal segments

BOUNDARY = {"left": -1, "right": -2, "top": -3, "bottom": -4}


@dataclass(frozen=True)
class MaximalSegment:
    orientation: str          # 'v' or 'h'
    position: float
    lo: float
    hi: float
    incident: frozenset       # of (cell_id, cell_side)

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass
class SegmentGraph:
    segments: list[MaximalSegment]
    order_h: set[tuple[int, int]]   # edges (segment under a cell -> segment above it)
    order_v: set[tuple[int, int]]   # edges (segment left of a cell -> segment right of it)


class ExtractionError(RuntimeError):
    """The cell set does not form a recognizable rectangular partition."""


def _cluster(values, eps):
    reps = []
    for v in sorted(values):
        if not reps or v - reps[-1] > eps:
            reps.append(v)
    return reps


def _snap(reps, v, eps):
    i = bisect_right(reps, v)
    best = None
    for j in (i - 1, i):
        if 0 <= j < len(reps) and abs(reps[j] - v) <= eps + 1e-300:
            if best is None or abs(reps[j] - v) < abs(reps[best] - v):
                best = j
    if best is None:
        raise ExtractionError(f"coordinate {v} does not snap to any cluster")
    return best


def _merge_intervals(intervals, eps):
    runs = []
    for lo, hi in sorted(intervals):
        if runs and lo <= runs[-1][1] + eps:
            runs[-1][1] = max(runs[-1][1], hi)
        else:
            runs.append([lo, hi])
    return runs


def extract_structure(root: Rect, cells: dict[str, Rect]):
    """Shared segment extraction.

    Returns (segments, refs) where segments is a list of
    [orientation, position, lo, hi] for interior maximal segments and refs
    maps cell id -> (left, right, top, bottom) support references.  A
    reference is an index into segments, or a negative BOUNDARY sentinel.

    Convention for degenerate junctions: collinear vertical pieces always
    merge into one maximal segment, while horizontal runs are broken wherever
    the interior of a vertical segment crosses them.  A 4-way crossing is
    therefore one continuous vertical plus two horizontal segments, which
    keeps symmetric grids area-universal under repositioning.
    """
    eps = EPS_FRAC * root.diagonal
    if not cells:
        return [], {}

    xs = {root.x, root.x2}
    ys = {root.y, root.y2}
    for r in cells.values():
        xs.update((r.x, r.x2))
        ys.update((r.y, r.y2))
    xreps = _cluster(xs, eps)
    yreps = _cluster(ys, eps)
    rl = _snap(xreps, root.x, eps)
    rr = _snap(xreps, root.x2, eps)
    rt = _snap(yreps, root.y, eps)
    rb = _snap(yreps, root.y2, eps)

    snapped = {}
    for cid, r in cells.items():
        if r.w <= 0 or r.h <= 0:
            raise ExtractionError(f"cell {cid!r} has a non-positive extent")
        snapped[cid] = (
            _snap(xreps, r.x, eps),
            _snap(xreps, r.x2, eps),
            _snap(yreps, r.y, eps),
            _snap(yreps, r.y2, eps),
        )

    v_intervals: dict[int, list] = {}
    h_intervals: dict[int, list] = {}
    for cid, (li, ri, ti, bi) in snapped.items():
        tv, bv = yreps[ti], yreps[bi]
        lv, rv = xreps[li], xreps[ri]
        for xi in (li, ri):
            if xi not in (rl, rr):
                v_intervals.setdefault(xi, []).append((tv, bv))
        for yi in (ti, bi):
            if yi not in (rt, rb):
                h_intervals.setdefault(yi, []).append((lv, rv))

    segments = []                # [orient, pos, lo, hi]
    v_runs: dict[int, list] = {}     # x-cluster -> list of (lo, hi, seg_index)
    all_v = []
    for xi, ivals in sorted(v_intervals.items()):
        runs = _merge_intervals(ivals, eps)
        lst = []
        for lo, hi in runs:
            idx = len(segments)
            segments.append(["v", xreps[xi], lo, hi])
            lst.append((lo, hi, idx))
            all_v.append((xreps[xi], lo, hi))
        v_runs[xi] = lst

    h_runs: dict[int, list] = {}
    for yi, ivals in sorted(h_intervals.items()):
        y = yreps[yi]
        for lo, hi in _merge_intervals(ivals, eps):
            # break the run at every vertical whose interior crosses it
            cuts = [
                vx
                for vx, vlo, vhi in all_v
                if vlo + eps < y < vhi - eps and lo + eps < vx < hi - eps
            ]
            pts = [lo] + sorted(cuts) + [hi]
            for a, b in zip(pts[:-1], pts[1:]):
                idx = len(segments)
                segments.append(["h", y, a, b])
                h_runs.setdefault(yi, []).append((a, b, idx))

    def find_run(runs, lo, hi, what):
        for a, b, idx in runs:
            if a - eps <= lo and hi <= b + eps:
                return idx
        raise ExtractionError(f"{what} side [{lo}, {hi}] lies on no maximal segment")

    refs = {}
    for cid, (li, ri, ti, bi) in snapped.items():
        tv, bv = yreps[ti], yreps[bi]
        lv, rv = xreps[li], xreps[ri]
        left = BOUNDARY["left"] if li == rl else find_run(v_runs.get(li, []), tv, bv, cid)
        right = BOUNDARY["right"] if ri == rr else find_run(v_runs.get(ri, []), tv, bv, cid)
        top = BOUNDARY["top"] if ti == rt else find_run(h_runs.get(ti, []), lv, rv, cid)
        bottom = BOUNDARY["bottom"] if bi == rb else find_run(h_runs.get(bi, []), lv, rv, cid)
        refs[cid] = (left, right, top, bottom)
    return segments, refs


def maximal_segments(layout: Layout) -> SegmentGraph:
    """Interior maximal segments of the leaf-cell partition, with incidences
    and the two partial orders used by order-equivalence."""
    segments, refs = extract_structure(layout.root, layout.cells)
    incident: list[set] = [set() for _ in segments]
    order_h: set[tuple[int, int]] = set()
    order_v: set[tuple[int, int]] = set()
    for cid, (l, r, t, b) in refs.items():
        if l >= 0:
            incident[l].add((cid, "left"))
        if r >= 0:
            incident[r].add((cid, "right"))
        if t >= 0:
            incident[t].add((cid, "top"))
        if b >= 0:
            incident[b].add((cid, "bottom"))
        if l >= 0 and r >= 0:
            order_v.add((l, r))
        if t >= 0 and b >= 0:
            order_h.add((b, t))
    segs = [
        MaximalSegment(
            orientation=o, position=p, lo=lo, hi=hi, incident=frozenset(incident[i])
        )
        for i, (o, p, lo, hi) in enumerate(segments)
    ]
    return SegmentGraph(segments=segs, order_h=order_h, order_v=order_v)


def _signature(graph: SegmentGraph):
    keys = [(s.orientation, tuple(sorted(s.incident))) for s in graph.segments]
    edges_h = sorted((keys[a], keys[b]) for a, b in graph.order_h)
    edges_v = sorted((keys[a], keys[b]) for a, b in graph.order_v)
    return sorted(keys), edges_h, edges_v


def order_equivalent(a: Layout, b: Layout) -> bool:
    """True iff there is an incidence-preserving bijection between the two
    layouts' maximal segments that also preserves both partial orders.

    Incidence sets are compared as (leaf id, side) pairs, so the bijection is
    forced by incidence matching whenever those sets are unique per segment.
    """
    if set(a.cells) != set(b.cells):
        raise ValueError("layouts cover different leaf ids")
    return _signature(maximal_segments(a)) == _signature(maximal_segments(b))
