"""Segment-supported rectangular partitions and the area hill climb.

A partition is stored as interior maximal segments (orientation + position)
plus, per cell, references to the four segments (or root boundary sides) its
edges lie on.  All geometry is a function of segment positions, so moving
segments changes cell sizes without touching the incidence structure; this is
exactly what keeps re-realized layouts order-equivalent to their source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BOUNDARY, Layout, Rect, extract_structure

# ref encoding: >= 0 segment index, negatives are root boundary sides
_BL, _BR, _BT, _BB = BOUNDARY["left"], BOUNDARY["right"], BOUNDARY["top"], BOUNDARY["bottom"]

DEFAULT_TOL_FRAC = 5e-7        # stop below this so callers' 1e-6 checks clear
MAX_SWEEPS = 10000
ZERO_AREA_CLAMP_FRAC = 1e-12   # clamp for driven-to-zero targets


class HillClimbError(RuntimeError):
    """Structural edit or realization could not be carried out."""


@dataclass(frozen=True)
class RealizeResult:
    converged: bool
    max_rel_area_error: float   # relative to the root area
    sweeps: int


class SupportStructure:
    def __init__(self, root: Rect, orient: list, pos: list, cells: dict):
        self.root = root
        self.orient = orient          # 'v' | 'h' | None (retired)
        self.pos = pos
        self.cells = cells            # id -> [left, right, top, bottom] refs

    # -- construction -------------------------------------------------------

    @classmethod
    def from_layout(cls, layout: Layout) -> "SupportStructure":
        segments, refs = extract_structure(layout.root, layout.cells)
        return cls(
            root=layout.root,
            orient=[s[0] for s in segments],
            pos=[s[1] for s in segments],
            cells={cid: list(r) for cid, r in refs.items()},
        )

    def clone(self) -> "SupportStructure":
        return SupportStructure(
            root=self.root,
            orient=list(self.orient),
            pos=list(self.pos),
            cells={cid: list(r) for cid, r in self.cells.items()},
        )

    # -- geometry -----------------------------------------------------------

    def coord_x(self, ref) -> float:
        if ref >= 0:
            return self.pos[ref]
        return self.root.x if ref == _BL else self.root.x2

    def coord_y(self, ref) -> float:
        if ref >= 0:
            return self.pos[ref]
        return self.root.y if ref == _BT else self.root.y2

    def cell_rect(self, cid: str) -> Rect:
        l, r, t, b = self.cells[cid]
        x, x2 = self.coord_x(l), self.coord_x(r)
        y, y2 = self.coord_y(t), self.coord_y(b)
        return Rect(x, y, x2 - x, y2 - y)

    def to_layout(self, groups=None) -> Layout:
        return Layout(
            root=self.root,
            cells={cid: self.cell_rect(cid) for cid in self.cells},
            groups=dict(groups) if groups else {},
        )

    def live_segments(self) -> list[int]:
        return [i for i, o in enumerate(self.orient) if o is not None]

    def mean_aspect(self) -> float:
        total = 0.0
        for cid in self.cells:
            r = self.cell_rect(cid)
            if r.w <= 0.0 or r.h <= 0.0:
                return -1.0
            total += min(r.w, r.h) / max(r.w, r.h)
        return total / len(self.cells)

    def new_segment(self, orientation: str, position: float) -> int:
        self.orient.append(orientation)
        self.pos.append(position)
        return len(self.orient) - 1

    # -- hill climb ---------------------------------------------------------

    def realize(
        self,
        targets: dict,
        tol_frac: float = DEFAULT_TOL_FRAC,
        max_sweeps: int = MAX_SWEEPS,
        order=None,
    ) -> RealizeResult:
        """Reposition segments until cell areas match targets.

        One sweep visits every live segment once, in a canonical order (by
        orientation, then coordinate at call time) unless an explicit order
        is given, and solves the one-dimensional balance problem for that
        segment: the position where both incident sides reach the same
        achieved/target area ratio.  Targets are clamped away from zero so
        deletions stay representable.
        """
        ids = list(self.cells)
        if set(targets) != set(ids):
            raise KeyError("targets must cover exactly the cells of the structure")
        root = self.root
        clamp = ZERO_AREA_CLAMP_FRAC * root.area
        n = len(self.orient)
        # positions with 4 trailing fixed slots for the root boundary sides
        P = list(self.pos) + [root.x, root.x2, root.y, root.y2]

        def remap(ref):
            return ref if ref >= 0 else n + (-ref - 1)

        cl, cr, ct, cb, tgt = [], [], [], [], []
        index = {}
        for i, cid in enumerate(ids):
            l, r, t, b = self.cells[cid]
            cl.append(remap(l))
            cr.append(remap(r))
            ct.append(remap(t))
            cb.append(remap(b))
            tgt.append(max(float(targets[cid]), clamp))
            index[cid] = i

        live = self.live_segments()
        if order is None:
            order = sorted(live, key=lambda s: (self.orient[s], self.pos[s], s))
        else:
            order = [s for s in order if self.orient[s] is not None]

        # per segment: cells on each side, plus static target sums
        side_a = {s: [] for s in live}   # 'v': cells left of s; 'h': cells above s
        side_b = {s: [] for s in live}
        for i, cid in enumerate(ids):
            l, r, t, b = self.cells[cid]
            if r >= 0:
                side_a[r].append(i)
            if l >= 0:
                side_b[l].append(i)
            if b >= 0:
                side_a[b].append(i)
            if t >= 0:
                side_b[t].append(i)
        ta = {s: sum(tgt[i] for i in side_a[s]) for s in live}
        tb = {s: sum(tgt[i] for i in side_b[s]) for s in live}

        def max_err():
            worst = 0.0
            for i in range(len(ids)):
                area = (P[cr[i]] - P[cl[i]]) * (P[cb[i]] - P[ct[i]])
                err = abs(area - tgt[i])
                if err > worst:
                    worst = err
            return worst / root.area

        ncells = len(ids)
        dead_cut = 8.0 * clamp
        glue_v = 1e-6 * root.w
        glue_h = 1e-6 * root.h
        dead_cells = [i for i in range(ncells) if tgt[i] <= dead_cut]

        def cluster_solve(off, sl, sr, qt, qb, glue, pglue, base):
            # Rigid-group variant of the balance solve.  A collapsed
            # near-zero-target cell couples its two bounding segments: each
            # one's own balance pins it a hair from the other, so imbalance
            # cannot cross the cell and the sweep stalls with region-sized
            # errors.  The group absorbs such couplings transitively, then one
            # balance equation positions its exterior sides while interior
            # cells keep their extents.  Only cells still wide on the other
            # axis couple: a doubly collapsed cell has no balance weight, and
            # welding its edges would starve any live cell sharing the pair.
            queue = list(off)
            while queue:
                m = queue.pop()
                for i in dead_cells:
                    rl, rr = sl[i], sr[i]
                    if P[rr] - P[rl] > glue or P[qb[i]] - P[qt[i]] <= pglue:
                        continue
                    if rr == m and rl not in off and rl < n:
                        off[rl] = P[rl] - base
                        queue.append(rl)
                    elif rl == m and rr not in off and rr < n:
                        off[rr] = P[rr] - base
                        queue.append(rr)
            ha = ca = hb = cbs = TA = TB = 0.0
            lo, hi = -math.inf, math.inf
            for m, om in off.items():
                for i in side_a[m]:
                    rl = sl[i]
                    if rl in off:
                        continue
                    h = P[qb[i]] - P[qt[i]]
                    edge = P[rl] - om
                    ha += h
                    ca += h * edge
                    TA += tgt[i]
                    if edge > lo:
                        lo = edge
                for i in side_b[m]:
                    rr = sr[i]
                    if rr in off:
                        continue
                    h = P[qb[i]] - P[qt[i]]
                    edge = P[rr] - om
                    hb += h
                    cbs += h * edge
                    TB += tgt[i]
                    if edge < hi:
                        hi = edge
            denom = ha * TB + hb * TA
            if denom <= 0.0 or hi <= lo:
                return
            x = (ca * TB + cbs * TA) / denom
            margin = 1e-8 * (hi - lo)
            if x < lo + margin:
                x = lo + margin
            elif x > hi - margin:
                x = hi - margin
            for j, o in off.items():
                P[j] = x + o

        def lstsq_once():
            # One damped linearized correction; True if it improved.
            group = list(range(n))

            def find(a):
                while group[a] != a:
                    group[a] = group[group[a]]
                    a = group[a]
                return a

            # Lockstep here is unconditional, unlike the sweep-side glue: a
            # doubly collapsed sliver left free would bind the damping at
            # its own microscopic extent and throttle the whole step.
            for i in dead_cells:
                for lo_r, hi_r, glue in (
                    (cl[i], cr[i], glue_v),
                    (ct[i], cb[i], glue_h),
                ):
                    if lo_r < n and hi_r < n and P[hi_r] - P[lo_r] <= glue:
                        group[find(hi_r)] = find(lo_r)
            col = {}
            for s in range(n):
                r = find(s)
                if r not in col:
                    col[r] = len(col)
            if not col:
                return False
            A = np.zeros((ncells, len(col)))
            f = np.empty(ncells)
            for i in range(ncells):
                w = P[cr[i]] - P[cl[i]]
                h = P[cb[i]] - P[ct[i]]
                f[i] = tgt[i] - w * h
                if cr[i] < n:
                    A[i, col[find(cr[i])]] += h
                if cl[i] < n:
                    A[i, col[find(cl[i])]] -= h
                if cb[i] < n:
                    A[i, col[find(cb[i])]] += w
                if ct[i] < n:
                    A[i, col[find(ct[i])]] -= w
            # truncate near-null directions: they trade huge segment moves
            # for negligible residual gains and defeat the damping
            delta = np.linalg.lstsq(A, f, rcond=1e-6)[0]
            move = [float(delta[col[find(s)]]) for s in range(n)]
            # Hairline pairs ride along in lockstep.  Their area rows are
            # microscopic, so the solve all but ignores them; left free they
            # would invert, or bind the damping at their own extent and
            # throttle the whole step.
            for _ in range(3):
                settled = True
                for i in range(ncells):
                    for lo_r, hi_r, eps in (
                        (cl[i], cr[i], glue_v),
                        (ct[i], cb[i], glue_h),
                    ):
                        if P[hi_r] - P[lo_r] > eps:
                            continue
                        ml = move[lo_r] if lo_r < n else 0.0
                        mh = move[hi_r] if hi_r < n else 0.0
                        if ml == mh:
                            continue
                        m = 0.5 * (ml + mh) if lo_r < n and hi_r < n else 0.0
                        if lo_r < n:
                            move[lo_r] = m
                        if hi_r < n:
                            move[hi_r] = m
                        settled = False
                if settled:
                    break
            step = 1.0
            for i in range(ncells):
                for lo_r, hi_r in ((cl[i], cr[i]), (ct[i], cb[i])):
                    e = P[hi_r] - P[lo_r]
                    de = (move[hi_r] if hi_r < n else 0.0) - (
                        move[lo_r] if lo_r < n else 0.0
                    )
                    if de < 0.0 and e + de * step < 0.1 * e:
                        step = 0.9 * e / -de
            if step <= 0.0:
                return False
            before = max_err()
            saved = P[:n]
            for s in range(n):
                P[s] = saved[s] + step * move[s]
            if max_err() >= before:
                P[:n] = saved
                return False
            return True

        def lstsq_step():
            # Global linearized correction.  Balance sweeps drain imbalance
            # one neighbour per sweep, so a long slice chain needs on the
            # order of chain-length-squared sweeps; solving the linearized
            # area system over every segment at once collapses that to a few
            # steps.  Collapsed-cell edge pairs move in lockstep and the step
            # is damped so no extent loses more than ninety percent, which on
            # sliver-laden structures limits each step; iterate until the
            # worst error stops shrinking by a tenth, then hand back to the
            # sweeps.
            err0 = max_err()
            for _ in range(12):
                if err0 <= tol or not lstsq_once():
                    return
                err1 = max_err()
                if err1 > 0.9 * err0:
                    return
                err0 = err1

        tol = tol_frac
        err = max_err()
        sweeps = 0
        while err > tol and sweeps < max_sweeps:
            # Alternate sweep direction: a fixed scan moves imbalance quickly
            # with the scan but only one segment per sweep against it, which
            # is ruinous on long slice chains.
            for s in order if sweeps % 2 == 0 else reversed(order):
                A = side_a[s]
                B = side_b[s]
                if not A or not B:
                    continue
                TA = ta[s]
                TB = tb[s]
                if self.orient[s] == "v":
                    sl, sr, qt, qb = cl, cr, ct, cb
                    glue, pglue = glue_v, glue_h
                else:
                    sl, sr, qt, qb = ct, cb, cl, cr
                    glue, pglue = glue_h, glue_v
                ps = P[s]
                coupled = False
                ha = ca = 0.0
                lo = -math.inf
                for i in A:
                    h = P[qb[i]] - P[qt[i]]
                    edge = P[sl[i]]
                    ha += h
                    ca += h * edge
                    if edge > lo:
                        lo = edge
                    if tgt[i] <= dead_cut and ps - edge <= glue and h > pglue:
                        coupled = True
                hb = cbs = 0.0
                hi = math.inf
                for i in B:
                    h = P[qb[i]] - P[qt[i]]
                    edge = P[sr[i]]
                    hb += h
                    cbs += h * edge
                    if edge < hi:
                        hi = edge
                    if tgt[i] <= dead_cut and edge - ps <= glue and h > pglue:
                        coupled = True
                if coupled:
                    cluster_solve({s: 0.0}, sl, sr, qt, qb, glue, pglue, ps)
                    continue
                denom = ha * TB + hb * TA
                if denom <= 0.0 or hi <= lo:
                    continue
                x = (ca * TB + cbs * TA) / denom
                margin = 1e-8 * (hi - lo)
                if x < lo + margin:
                    x = lo + margin
                elif x > hi - margin:
                    x = hi - margin
                P[s] = x
            # Joint pass: move each cell's two spanning segments as a rigid
            # pair.  Thin cells with firm targets (interior walls, slivers)
            # otherwise relay imbalance only as fast as their thickness slack
            # allows, which stretches convergence by orders of magnitude; the
            # rigid move transports mass across them in one step and vanishes
            # at any solved state, so it cannot disturb a solution.
            done = set()
            for i in range(ncells):
                for a, b, sl, sr, qt, qb, glue, pglue in (
                    (cl[i], cr[i], cl, cr, ct, cb, glue_v, glue_h),
                    (ct[i], cb[i], ct, cb, cl, cr, glue_h, glue_v),
                ):
                    if a >= n or b >= n or (a, b) in done:
                        continue
                    done.add((a, b))
                    base = P[a]
                    cluster_solve(
                        {a: 0.0, b: P[b] - base}, sl, sr, qt, qb, glue, pglue, base
                    )
            sweeps += 1
            if sweeps == 4 or sweeps % 16 == 0:
                lstsq_step()
            err = max_err()

        self.pos[:] = P[:n]
        return RealizeResult(converged=err <= tol, max_rel_area_error=err, sweeps=sweeps)

    # -- structural edits ---------------------------------------------------

    def repair_feasibility(self, min_frac: float = 1e-9) -> None:
        """Restore a hairline minimum extent to every cell.

        Structural edits can snap segments onto or past one another; local
        nudging can then chase its own tail.  Instead each axis is re-spaced
        in one shot: a backward pass over the cell gap constraints yields the
        latest admissible position per segment, a forward pass in dependency
        order clamps each current position into its window.  Segments with
        slack on both sides do not move.
        """
        LO, HI = -1, -2
        for axis in ("x", "y"):
            if axis == "x":
                gap = min_frac * self.root.w
                lo_val, hi_val = self.root.x, self.root.x2
                pairs = [(l, r) for (l, r, t, b) in self.cells.values()]
            else:
                gap = min_frac * self.root.h
                lo_val, hi_val = self.root.y, self.root.y2
                pairs = [(t, b) for (l, r, t, b) in self.cells.values()]
            succ: dict = {LO: [], HI: []}
            npred: dict = {LO: 0, HI: 0}
            edges = set()
            for u, v in pairs:
                uu = u if u >= 0 else LO
                vv = v if v >= 0 else HI
                if uu == LO and vv == HI or (uu, vv) in edges:
                    continue
                edges.add((uu, vv))
                succ.setdefault(uu, []).append(vv)
                succ.setdefault(vv, [])
                npred[uu] = npred.get(uu, 0)
                npred[vv] = npred.get(vv, 0) + 1
            ready = [s for s, c in npred.items() if c == 0]
            topo = []
            while ready:
                u = ready.pop()
                topo.append(u)
                for v in succ[u]:
                    npred[v] -= 1
                    if npred[v] == 0:
                        ready.append(v)
            if len(topo) != len(npred):
                raise HillClimbError("cyclic gap constraints; structure is corrupt")
            ub = {s: hi_val for s in npred}
            for u in reversed(topo):
                for v in succ[u]:
                    if ub[v] - gap < ub[u]:
                        ub[u] = ub[v] - gap
            lb = {s: lo_val for s in npred}
            for u in topo:
                if u == LO:
                    val = lo_val
                elif u == HI:
                    if lb[u] > hi_val:
                        raise HillClimbError("could not restore positive cell extents")
                    continue
                else:
                    if lb[u] > ub[u]:
                        raise HillClimbError("could not restore positive cell extents")
                    val = min(max(self.pos[u], lb[u]), ub[u])
                    self.pos[u] = val
                for v in succ[u]:
                    if val + gap > lb[v]:
                        lb[v] = val + gap

    def split_cell(self, host: str, new_id: str, frac: float, axis: str) -> int:
        """Slice off `frac` of the host for a new cell on the trailing side."""
        if new_id in self.cells:
            raise HillClimbError(f"cell id {new_id!r} already present")
        if not 0.0 < frac < 1.0:
            raise ValueError("frac must be in (0, 1)")
        l, r, t, b = self.cells[host]
        rect = self.cell_rect(host)
        if axis == "x":
            s = self.new_segment("v", rect.x + rect.w * (1.0 - frac))
            self.cells[host] = [l, s, t, b]
            self.cells[new_id] = [s, r, t, b]
        else:
            s = self.new_segment("h", rect.y + rect.h * (1.0 - frac))
            self.cells[host] = [l, r, t, s]
            self.cells[new_id] = [l, r, s, b]
        return s

    def _repoint(self, old: int, new: int) -> None:
        for refs in self.cells.values():
            for k in range(4):
                if refs[k] == old:
                    refs[k] = new
        self.orient[old] = None

    def _merge_axis_safe(self, cid: str, axis: str, dead: set) -> bool:
        l, r, t, b = self.cells[cid]
        a, bb = (l, r) if axis == "x" else (t, b)
        if a < 0 and bb < 0:
            return False
        ia, ib = (0, 1) if axis == "x" else (2, 3)
        for other, refs in self.cells.items():
            if other == cid or other in dead:
                continue
            if a < 0:
                # merged segment becomes the boundary at `a`; any live cell
                # ending on `bb` from the far side would collapse
                if refs[ib] == bb:
                    return False
            elif bb < 0:
                if refs[ia] == a:
                    return False
            else:
                if refs[ia] == a and refs[ib] == bb:
                    return False
        return True

    def _merge_axis(self, cid: str, axis: str) -> None:
        l, r, t, b = self.cells[cid]
        a, bb = (l, r) if axis == "x" else (t, b)
        if a >= 0 and bb >= 0:
            self.pos[a] = 0.5 * (self.pos[a] + self.pos[bb])
            self._repoint(bb, a)
        elif a < 0:
            self._repoint(bb, a)
        else:
            self._repoint(a, bb)

    def remove_cell_collapsed(self, cid: str, dead: set | None = None) -> None:
        """Remove a near-zero-area cell, merging its two walls along one axis.

        The axis with the smaller realized gap is preferred, which is the
        axis the hill climb actually collapsed; the other axis is a fallback.
        Cells in `dead` are about to be removed themselves and do not block
        a merge.
        """
        dead = dead or set()
        l, r, t, b = self.cells[cid]
        if l == r or t == b:
            # already collapsed onto a previously merged wall
            del self.cells[cid]
            return
        gx = self.coord_x(r) - self.coord_x(l)
        gy = self.coord_y(b) - self.coord_y(t)
        axes = ["x", "y"] if gx <= gy else ["y", "x"]
        for axis in axes:
            if self._merge_axis_safe(cid, axis, dead):
                self._merge_axis(cid, axis)
                del self.cells[cid]
                return
        raise HillClimbError(f"no safe wall merge for cell {cid!r}")

    # -- local moves --------------------------------------------------------

    def _sides(self, s: int):
        """Cells on each side of segment s: (negative-side, positive-side).

        For a vertical segment the negative side holds the cells left of it;
        for a horizontal segment the cells above it.
        """
        neg, pos_ = [], []
        for cid, (l, r, t, b) in self.cells.items():
            if self.orient[s] == "v":
                if r == s:
                    neg.append(cid)
                elif l == s:
                    pos_.append(cid)
            else:
                if b == s:
                    neg.append(cid)
                elif t == s:
                    pos_.append(cid)
        return neg, pos_

    def flip_candidates(self) -> list[tuple]:
        out = []
        for s in self.live_segments():
            neg, pos_ = self._sides(s)
            if len(neg) == 1 and len(pos_) == 1:
                a = self.cells[neg[0]]
                b = self.cells[pos_[0]]
                if self.orient[s] == "v":
                    if a[2] == b[2] and a[3] == b[3]:
                        out.append(("flip", s, neg[0], pos_[0]))
                else:
                    if a[0] == b[0] and a[1] == b[1]:
                        out.append(("flip", s, neg[0], pos_[0]))
        return out

    def apply_flip(self, move) -> None:
        _, s, cid_a, cid_b = move
        ra = self.cells[cid_a]
        rb = self.cells[cid_b]
        if self.orient[s] == "v":
            # A left of B; their union flips to A on top, B below
            l, r, t, b = ra[0], rb[1], ra[2], ra[3]
            self.orient[s] = "h"
            self.pos[s] = 0.5 * (self.coord_y(t) + self.coord_y(b))
            self.cells[cid_a] = [l, r, t, s]
            self.cells[cid_b] = [l, r, s, b]
        else:
            # A above B; flips to A on the left, B on the right
            l, r, t, b = ra[0], ra[1], ra[2], rb[3]
            self.orient[s] = "v"
            self.pos[s] = 0.5 * (self.coord_x(l) + self.coord_x(r))
            self.cells[cid_a] = [l, s, t, b]
            self.cells[cid_b] = [s, r, t, b]

    def stretch_candidates(self) -> list[tuple]:
        """T-junction moves: a segment grows through the one it ends on.

        Move tuple: ("stretch", grower cell, index of the side that jumps to
        the far support, absorbed cell, index of the absorbed cell's side
        that gets truncated onto the growing segment, that segment).
        """
        eps_x = 1e-9 * self.root.w
        eps_y = 1e-9 * self.root.h
        out = []
        for s in self.live_segments():
            neg, pos_ = self._sides(s)
            if not neg or not pos_:
                continue
            if self.orient[s] == "v":
                for pick, far_side in ((min, 2), (max, 3)):
                    a = pick(neg, key=lambda c: self.coord_y(self.cells[c][far_side]))
                    b = pick(pos_, key=lambda c: self.coord_y(self.cells[c][far_side]))
                    h = self.cells[a][far_side]
                    if h < 0 or self.cells[b][far_side] != h:
                        continue
                    opp = 3 if far_side == 2 else 2
                    for grower, side_idx, other_bound, cmp_hi in (
                        (a, 0, 1, False),   # grow on the left of s
                        (b, 1, 0, True),    # grow on the right of s
                    ):
                        for cid, refs in self.cells.items():
                            if refs[opp] != h or cid in (a, b):
                                continue
                            if refs[side_idx] != self.cells[grower][side_idx]:
                                continue
                            edge = self.coord_x(refs[other_bound])
                            ok = (
                                edge < self.pos[s] - eps_x
                                if cmp_hi
                                else edge > self.pos[s] + eps_x
                            )
                            if ok:
                                out.append(("stretch", grower, far_side, cid, side_idx, s))
                            break
            else:
                for pick, far_side in ((min, 0), (max, 1)):
                    a = pick(neg, key=lambda c: self.coord_x(self.cells[c][far_side]))
                    b = pick(pos_, key=lambda c: self.coord_x(self.cells[c][far_side]))
                    v = self.cells[a][far_side]
                    if v < 0 or self.cells[b][far_side] != v:
                        continue
                    opp = 1 if far_side == 0 else 0
                    for grower, side_idx, other_bound, cmp_hi in (
                        (a, 2, 3, False),   # grow above s
                        (b, 3, 2, True),    # grow below s
                    ):
                        for cid, refs in self.cells.items():
                            if refs[opp] != v or cid in (a, b):
                                continue
                            if refs[side_idx] != self.cells[grower][side_idx]:
                                continue
                            edge = self.coord_y(refs[other_bound])
                            ok = (
                                edge < self.pos[s] - eps_y
                                if cmp_hi
                                else edge > self.pos[s] + eps_y
                            )
                            if ok:
                                out.append(("stretch", grower, far_side, cid, side_idx, s))
                            break
        return out

    def apply_stretch(self, move) -> None:
        _, grower, far_side, absorbed, trunc_side, s = move
        self.cells[grower][far_side] = self.cells[absorbed][far_side]
        self.cells[absorbed][trunc_side] = s


def hill_climb_realize(
    layout: Layout,
    targets: dict,
    tol_frac: float = DEFAULT_TOL_FRAC,
    max_sweeps: int = MAX_SWEEPS,
    order=None,
) -> tuple[Layout, RealizeResult]:
    """Order-equivalent re-realization of a layout with new target areas.

    Group rectangles are not carried over: they are only meaningful for the
    recursive layouts that produced them, not for a repositioned partition.
    """
    st = SupportStructure.from_layout(layout)
    res = st.realize(targets, tol_frac=tol_frac, max_sweeps=max_sweeps, order=order)
    return st.to_layout(), res
