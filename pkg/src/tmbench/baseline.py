"""Reference layouts for stability measurement.

For one transition the reference keeps the source layout's segment structure:
survivor cells are re-realized toward their next areas, deleted cells are
driven to near-zero area in place, and newly inserted mass is absorbed by
thickening every interior segment into a wall cell.  Corner travel against
this reference separates unavoidable motion, forced by the data change, from
churn the algorithm added on its own.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import BOUNDARY, Layout, Rect, extract_structure
from .structure import (
    DEFAULT_TOL_FRAC,
    MAX_SWEEPS,
    ZERO_AREA_CLAMP_FRAC,
    HillClimbError,
    SupportStructure,
)

_BL, _BR, _BT, _BB = BOUNDARY["left"], BOUNDARY["right"], BOUNDARY["top"], BOUNDARY["bottom"]

WALL_PREFIX = "__wall_"


@dataclass(frozen=True)
class BaselineResult:
    layout: Layout              # survivors plus near-zero cells for deleted leaves
    walls: dict
    deleted: tuple
    inserted_area: float
    converged: bool
    max_rel_area_error: float
    sweeps: int


def _thicken(root: Rect, segments, refs, cells, a_ins: float):
    """Expand every interior segment into a wall cell of shared thickness.

    Each segment index i becomes an offset pair (2i = near side at the old
    position, 2i+1 = far side); old cell references move to the offset facing
    them.  Vertical walls run continuously through crossings and own the
    intersection squares; horizontal walls are per extracted fragment, which
    already end at crossing verticals.
    """
    eps = 1e-9 * root.diagonal
    total_len = sum(hi - lo for _, _, lo, hi in segments)
    tau = a_ins / total_len
    min_ext = min(min(r.w, r.h) for r in cells.values())
    # initial offset kept small enough that no cell starts degenerate
    tau0 = min(tau, 0.45 * min_ext)

    orient, pos = [], []
    for o, p, _, _ in segments:
        orient.extend((o, o))
        pos.extend((p, p + tau0))

    new_cells = {}
    for cid, (l, r, t, b) in refs.items():
        new_cells[cid] = [
            2 * l + 1 if l >= 0 else l,
            2 * r if r >= 0 else r,
            2 * t + 1 if t >= 0 else t,
            2 * b if b >= 0 else b,
        ]

    by_orient = {"v": [], "h": []}
    for i, seg in enumerate(segments):
        by_orient[seg[0]].append(i)

    def find_perp(orientation, level, coordinate):
        # the segment of `orientation` at position `level` spanning `coordinate`
        loose = None
        for j in by_orient[orientation]:
            _, p, lo, hi = segments[j]
            if abs(p - level) <= eps and lo - eps <= coordinate <= hi + eps:
                if lo + eps < coordinate < hi - eps:
                    return j
                if loose is None:
                    loose = j
        if loose is None:
            raise HillClimbError("segment endpoint not supported by a perpendicular segment")
        return loose

    wall_targets = {}
    for i, (o, p, lo, hi) in enumerate(segments):
        if o == "v":
            top = _BT if abs(lo - root.y) <= eps else 2 * find_perp("h", lo, p) + 1
            bot = _BB if abs(hi - root.y2) <= eps else 2 * find_perp("h", hi, p)
            wall_refs = [2 * i, 2 * i + 1, top, bot]
        else:
            left = _BL if abs(lo - root.x) <= eps else 2 * find_perp("v", lo, p) + 1
            right = _BR if abs(hi - root.x2) <= eps else 2 * find_perp("v", hi, p)
            wall_refs = [left, right, 2 * i, 2 * i + 1]
        wid = f"{WALL_PREFIX}{i}__"
        new_cells[wid] = wall_refs
        wall_targets[wid] = tau * (hi - lo)

    return SupportStructure(root, orient, pos, new_cells), wall_targets


def build_baseline(
    prev_layout: Layout,
    next_areas: dict,
    tol_frac: float = DEFAULT_TOL_FRAC,
    max_sweeps: int = MAX_SWEEPS,
) -> BaselineResult | None:
    """Reference layout for the transition from `prev_layout` to `next_areas`.

    `next_areas` holds the next step's leaf areas in layout units (summing to
    the root area).  Returns None when no leaf survives the transition; with
    no survivors there is nothing to measure stability against.
    """
    root = prev_layout.root
    prev_ids = set(prev_layout.cells)
    next_ids = set(next_areas)
    for cid in prev_ids | next_ids:
        if cid.startswith(WALL_PREFIX):
            raise ValueError(f"leaf id {cid!r} collides with the reserved wall prefix")
    survivors = prev_ids & next_ids
    if not survivors:
        return None
    deleted = sorted(prev_ids - next_ids)
    inserted = sorted(next_ids - prev_ids)
    a_ins = float(sum(next_areas[i] for i in inserted))

    segments, refs = extract_structure(root, prev_layout.cells)

    if inserted and segments and a_ins > 0.0:
        st, wall_targets = _thicken(root, segments, refs, prev_layout.cells, a_ins)
    else:
        # no inserted mass, or nowhere to grow walls (single-cell layout):
        # survivors simply absorb everything
        st = SupportStructure(
            root,
            [s[0] for s in segments],
            [s[1] for s in segments],
            {cid: list(r) for cid, r in refs.items()},
        )
        wall_targets = {}

    clamp = ZERO_AREA_CLAMP_FRAC * root.area
    targets = {cid: float(next_areas[cid]) for cid in survivors}
    for cid in deleted:
        targets[cid] = clamp
    targets.update(wall_targets)
    scale = root.area / sum(targets.values())
    targets = {k: v * scale for k, v in targets.items()}

    res = st.realize(targets, tol_frac=tol_frac, max_sweeps=max_sweeps)

    cells, walls = {}, {}
    dead = set(deleted)
    for cid in st.cells:
        rect = st.cell_rect(cid)
        if cid.startswith(WALL_PREFIX):
            walls[cid] = rect
        elif cid in dead:
            # realized with a hairline clamp area; reported as truly gone
            if rect.w <= rect.h:
                cells[cid] = Rect(rect.x, rect.y, 0.0, rect.h)
            else:
                cells[cid] = Rect(rect.x, rect.y, rect.w, 0.0)
        else:
            cells[cid] = rect
    return BaselineResult(
        layout=Layout(root=root, cells=cells),
        walls=walls,
        deleted=tuple(deleted),
        inserted_area=a_ins,
        converged=res.converged,
        max_rel_area_error=res.max_rel_area_error,
        sweeps=res.sweeps,
    )
