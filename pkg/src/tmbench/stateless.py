"""Stateless treemap algorithms.

Every algorithm maps (rect, items) to one rectangle per item, where items is
an ordered sequence of (id, area) with positive areas summing to the rect
area.  Ordered algorithms keep the given sequence; unordered ones are free to
sort.  `lay_out_tree` applies an algorithm recursively over a hierarchy,
one level at a time, skipping subtrees with zero weight.

Construction-time aspect ratios use the >= 1 convention (long side over
short side); the reported quality metric elsewhere is its reciprocal.
"""

from __future__ import annotations

import functools

from .geometry import Layout, Rect

_REL_SUM_TOL = 1e-6


def _check_request(rect: Rect, items) -> None:
    if not items:
        raise ValueError("no items to lay out")
    if rect.w <= 0.0 or rect.h <= 0.0:
        raise ValueError("degenerate layout rect")
    total = 0.0
    for cid, a in items:
        if not a > 0.0:
            raise ValueError(f"non-positive area for item {cid!r}")
        total += a
    if abs(total - rect.area) > _REL_SUM_TOL * max(total, rect.area):
        raise ValueError("item areas must sum to the rect area")


def _slice(rect: Rect, areas, axis: str) -> list:
    """Proportional strips along an axis; the last edge is snapped exactly."""
    total = sum(areas)
    out = []
    last = len(areas) - 1
    if axis == "x":
        x = rect.x
        for i, a in enumerate(areas):
            w = rect.x2 - x if i == last else rect.w * (a / total)
            out.append(Rect(x, rect.y, w, rect.h))
            x += w
    else:
        y = rect.y
        for i, a in enumerate(areas):
            h = rect.y2 - y if i == last else rect.h * (a / total)
            out.append(Rect(rect.x, y, rect.w, h))
            y += h
    return out


def _split2(rect: Rect, a_first: float, a_second: float, axis: str):
    r1, r2 = _slice(rect, [a_first, a_second], axis)
    return r1, r2


def _long_axis(rect: Rect) -> str:
    return "x" if rect.w >= rect.h else "y"


# -- slice and dice ----------------------------------------------------------


def lay_snd(rect: Rect, items, depth: int = 0) -> dict:
    """Alternating full-width slices: vertical cuts at even depth."""
    _check_request(rect, items)
    axis = "x" if depth % 2 == 0 else "y"
    rects = _slice(rect, [a for _, a in items], axis)
    return {cid: r for (cid, _), r in zip(items, rects)}


# -- squarified --------------------------------------------------------------


def _row_worst(total: float, amin: float, amax: float, side: float) -> float:
    t2 = (total / side) ** 2
    return max(t2 / amin, amax / t2)


def lay_sqr(rect: Rect, items, depth: int = 0) -> dict:
    """Rows packed against the shorter side while the worst ratio improves."""
    _check_request(rect, items)
    order = sorted(items, key=lambda kv: -kv[1])
    out = {}
    rem = rect
    i = 0
    n = len(order)
    while i < n:
        side = min(rem.w, rem.h)
        total = order[i][1]
        amin = amax = total
        j = i + 1
        while j < n:
            a = order[j][1]
            worst_now = _row_worst(total, amin, amax, side)
            worst_next = _row_worst(total + a, min(amin, a), max(amax, a), side)
            if worst_next > worst_now:
                break
            total += a
            amin = min(amin, a)
            amax = max(amax, a)
            j += 1
        row = order[i:j]
        if rem.w >= rem.h:
            t = rem.w if j == n else total / rem.h
            strip = Rect(rem.x, rem.y, t, rem.h)
            rects = _slice(strip, [a for _, a in row], "y")
            rem = Rect(rem.x + t, rem.y, rem.w - t, rem.h)
        else:
            t = rem.h if j == n else total / rem.w
            strip = Rect(rem.x, rem.y, rem.w, t)
            rects = _slice(strip, [a for _, a in row], "x")
            rem = Rect(rem.x, rem.y + t, rem.w, rem.h - t)
        for (cid, _), r in zip(row, rects):
            out[cid] = r
        i = j
    return out


# -- approximation -----------------------------------------------------------


def lay_app(rect: Rect, items, depth: int = 0) -> dict:
    """Weight-balanced recursive bisection with a big-item escape hatch.

    A dominant item (at least two thirds of the weight) is split off alone;
    otherwise the items are cut at the smallest prefix reaching one third,
    which provably lands between one and two thirds.
    """
    _check_request(rect, items)
    out = {}

    def rec(r, group):
        if len(group) == 1:
            out[group[0][0]] = r
            return
        total = sum(a for _, a in group)
        axis = _long_axis(r)
        if group[0][1] >= (2.0 / 3.0) * total:
            head, tail = _split2(r, group[0][1], total - group[0][1], axis)
            out[group[0][0]] = head
            rec(tail, group[1:])
            return
        prefix = 0.0
        k = 0
        while prefix < total / 3.0:
            prefix += group[k][1]
            k += 1
        r1, r2 = _split2(r, prefix, total - prefix, axis)
        rec(r1, group[:k])
        rec(r2, group[k:])

    rec(rect, sorted(items, key=lambda kv: -kv[1]))
    return out


# -- strip -------------------------------------------------------------------


def _strip_mean_aspect(areas, side: float) -> float:
    t2 = (sum(areas) / side) ** 2
    return sum(max(a / t2, t2 / a) for a in areas) / len(areas)


def lay_str(rect: Rect, items, depth: int = 0) -> dict:
    """Horizontal strips top to bottom, grown while mean aspect improves."""
    _check_request(rect, items)
    out = {}
    y = rect.y
    i = 0
    n = len(items)
    while i < n:
        areas = [items[i][1]]
        j = i + 1
        while j < n:
            if _strip_mean_aspect(areas + [items[j][1]], rect.w) >= _strip_mean_aspect(
                areas, rect.w
            ):
                break
            areas.append(items[j][1])
            j += 1
        t = rect.y2 - y if j == n else sum(areas) / rect.w
        strip = Rect(rect.x, y, rect.w, t)
        for (cid, _), r in zip(items[i:j], _slice(strip, areas, "x")):
            out[cid] = r
        y += t
        i = j
    return out


# -- split -------------------------------------------------------------------


def lay_spl(rect: Rect, items, depth: int = 0) -> dict:
    """Recursive weight-balanced bisection keeping the item order."""
    _check_request(rect, items)
    out = {}

    def rec(r, group):
        if len(group) == 1:
            out[group[0][0]] = r
            return
        total = sum(a for _, a in group)
        best_k, best_gap, prefix = 1, float("inf"), 0.0
        for k in range(1, len(group)):
            prefix += group[k - 1][1]
            gap = abs(total - 2.0 * prefix)
            if gap < best_gap:
                best_gap, best_k = gap, k
        head = sum(a for _, a in group[:best_k])
        r1, r2 = _split2(r, head, total - head, _long_axis(r))
        rec(r1, group[:best_k])
        rec(r2, group[best_k:])

    rec(rect, list(items))
    return out


# -- pivot family ------------------------------------------------------------


def _pivot_index(group, variant: str) -> int:
    n = len(group)
    if variant == "mid":
        return n // 2
    if variant == "size":
        best, best_a = 0, group[0][1]
        for i in range(1, n):
            if group[i][1] > best_a:
                best, best_a = i, group[i][1]
        return best
    # split balance: minimize |weight before - weight after| over pivots
    total = sum(a for _, a in group)
    before = 0.0
    best, best_gap = 0, float("inf")
    for i in range(n):
        gap = abs(before - (total - before - group[i][1]))
        if gap < best_gap:
            best_gap, best = gap, i
        before += group[i][1]
    return best


def _rho(r: Rect) -> float:
    return min(r.w, r.h) / max(r.w, r.h)


def _lay_pivot(rect: Rect, items, variant: str) -> dict:
    _check_request(rect, items)
    out = {}

    def strips(r, group):
        for (cid, _), piece in zip(group, _slice(r, [a for _, a in group], _long_axis(r))):
            out[cid] = piece

    def rec(r, group):
        n = len(group)
        if n == 0:
            return
        if n <= 3:
            strips(r, group)
            return
        p = _pivot_index(group, variant)
        left, pivot, rest = group[:p], group[p], group[p + 1 :]
        total = sum(a for _, a in group)
        sum_left = sum(a for _, a in left)
        if left:
            r_left, rem = _split2(r, sum_left, total - sum_left, _long_axis(r))
        else:
            r_left, rem = None, r
        best = None
        for k in range(len(rest) + 1):
            s1, s2 = rest[:k], rest[k:]
            sum_s1 = sum(a for _, a in s1)
            sum_s2 = sum(a for _, a in s2)
            if s2:
                r_a, r_b = _split2(rem, pivot[1] + sum_s1, sum_s2, _long_axis(rem))
            else:
                r_a, r_b = rem, None
            if s1:
                r_p, r_s1 = _split2(r_a, pivot[1], sum_s1, _long_axis(r_a))
            else:
                r_p, r_s1 = r_a, None
            quality = _rho(r_p)
            if best is None or quality > best[0] + 1e-12:
                best = (quality, k, r_p, r_s1, r_b)
        _, k, r_p, r_s1, r_b = best
        if left:
            rec(r_left, left)
        out[pivot[0]] = r_p
        if r_s1 is not None:
            rec(r_s1, rest[:k])
        if r_b is not None:
            rec(r_b, rest[k:])

    rec(rect, list(items))
    return out


def lay_pbm(rect: Rect, items, depth: int = 0) -> dict:
    """Pivot at the middle index."""
    return _lay_pivot(rect, items, "mid")


def lay_pbz(rect: Rect, items, depth: int = 0) -> dict:
    """Pivot at the largest item (first on ties)."""
    return _lay_pivot(rect, items, "size")


def lay_pbs(rect: Rect, items, depth: int = 0) -> dict:
    """Pivot where the flanking weights balance best (first on ties)."""
    return _lay_pivot(rect, items, "split")


# -- spiral ------------------------------------------------------------------


def lay_spi(rect: Rect, items, depth: int = 0) -> dict:
    """Strips wound inward: east along the top, then south, west, north."""
    _check_request(rect, items)
    out = {}
    rem = rect
    d = 0
    i = 0
    n = len(items)
    while i < n:
        side = rem.w if d % 2 == 0 else rem.h
        areas = [items[i][1]]
        j = i + 1
        while j < n:
            if _strip_mean_aspect(areas + [items[j][1]], side) >= _strip_mean_aspect(
                areas, side
            ):
                break
            areas.append(items[j][1])
            j += 1
        row = items[i:j]
        last = j == n
        if d == 0:  # east: strip across the top, cells left to right
            t = rem.h if last else sum(areas) / rem.w
            strip = Rect(rem.x, rem.y, rem.w, t)
            rects = _slice(strip, areas, "x")
            rem = Rect(rem.x, rem.y + t, rem.w, rem.h - t)
        elif d == 1:  # south: strip down the right side, cells top to bottom
            t = rem.w if last else sum(areas) / rem.h
            strip = Rect(rem.x2 - t, rem.y, t, rem.h)
            rects = _slice(strip, areas, "y")
            rem = Rect(rem.x, rem.y, rem.w - t, rem.h)
        elif d == 2:  # west: strip across the bottom, cells right to left
            t = rem.h if last else sum(areas) / rem.w
            strip = Rect(rem.x, rem.y2 - t, rem.w, t)
            rects = list(reversed(_slice(strip, list(reversed(areas)), "x")))
            rem = Rect(rem.x, rem.y, rem.w, rem.h - t)
        else:  # north: strip up the left side, cells bottom to top
            t = rem.w if last else sum(areas) / rem.h
            strip = Rect(rem.x, rem.y, t, rem.h)
            rects = list(reversed(_slice(strip, list(reversed(areas)), "y")))
            rem = Rect(rem.x + t, rem.y, rem.w - t, rem.h)
        for (cid, _), r in zip(row, rects):
            out[cid] = r
        d = (d + 1) % 4
        i = j
    return out


# -- space-filling curves ----------------------------------------------------

# quadrant corners as (column, row) with row 0 at the top
_C_BL, _C_TL, _C_TR, _C_BR = (0, 1), (0, 0), (1, 0), (1, 1)

# base unit runs from the bottom-left corner to the bottom-right one
_BASE_VISITS = (_C_BL, _C_TL, _C_TR, _C_BR)
_BASE_CHILDREN = ((_C_BL, _C_TL), (_C_BL, _C_BR), (_C_BL, _C_BR), (_C_TR, _C_BR))

# the closed top-level variant: ends adjacent to its start
_MOORE_VISITS = (_C_BL, _C_TL, _C_TR, _C_BR)
_MOORE_CHILDREN = ((_C_BR, _C_TR), (_C_BR, _C_TR), (_C_TL, _C_BL), (_C_TL, _C_BL))

_D4 = (
    lambda c, r: (c, r),
    lambda c, r: (1 - c, r),
    lambda c, r: (c, 1 - r),
    lambda c, r: (1 - c, 1 - r),
    lambda c, r: (r, c),
    lambda c, r: (1 - r, c),
    lambda c, r: (r, 1 - c),
    lambda c, r: (1 - r, 1 - c),
)


@functools.lru_cache(maxsize=None)
def _unit(entry, exit_):
    """Visit order and child orientations for a unit entering and exiting
    at the given corners, derived from the base unit by a square symmetry."""
    for t in _D4:
        if t(*_C_BL) == entry and t(*_C_BR) == exit_:
            visits = tuple(t(*q) for q in _BASE_VISITS)
            children = tuple((t(*a), t(*b)) for a, b in _BASE_CHILDREN)
            return visits, children
    raise ValueError(f"no unit from {entry} to {exit_}")


def _half_split(group) -> int:
    """Cut index balancing the two sides' weights (first minimal)."""
    total = sum(a for _, a in group)
    prefix = 0.0
    best_k, best_gap = 1, float("inf")
    for k in range(1, len(group)):
        prefix += group[k - 1][1]
        gap = abs(total - 2.0 * prefix)
        if gap < best_gap:
            best_gap, best_k = gap, k
    return best_k


def _lay_curve(rect, group, visits, children, out):
    if len(group) == 1:
        out[group[0][0]] = rect
        return
    total = sum(a for _, a in group)
    k = _half_split(group)
    halves = (group[:k], group[k:])
    sums = (sum(a for _, a in halves[0]), sum(a for _, a in halves[1]))
    if visits[0][0] == visits[1][0]:
        # first two quadrants share a column: the top cut is vertical
        w0 = rect.w * (sums[0] / total)
        if visits[0][0] == 0:
            r0 = Rect(rect.x, rect.y, w0, rect.h)
            r1 = Rect(rect.x + w0, rect.y, rect.x2 - (rect.x + w0), rect.h)
        else:
            x_cut = rect.x2 - w0
            r0 = Rect(x_cut, rect.y, rect.x2 - x_cut, rect.h)
            r1 = Rect(rect.x, rect.y, x_cut - rect.x, rect.h)
        sub_axis = "y"
    else:
        h0 = rect.h * (sums[0] / total)
        if visits[0][1] == 0:
            r0 = Rect(rect.x, rect.y, rect.w, h0)
            r1 = Rect(rect.x, rect.y + h0, rect.w, rect.y2 - (rect.y + h0))
        else:
            y_cut = rect.y2 - h0
            r0 = Rect(rect.x, y_cut, rect.w, rect.y2 - y_cut)
            r1 = Rect(rect.x, rect.y, rect.w, y_cut - rect.y)
        sub_axis = "x"
    for half_idx, (half, half_rect) in enumerate(zip(halves, (r0, r1))):
        if len(half) == 1:
            out[half[0][0]] = half_rect
            continue
        qa, qb = visits[2 * half_idx], visits[2 * half_idx + 1]
        k2 = _half_split(half)
        quarters = (half[:k2], half[k2:])
        qsum = sum(a for _, a in quarters[0])
        htotal = sums[half_idx]
        if sub_axis == "y":
            ha = half_rect.h * (qsum / htotal)
            if qa[1] == 0:
                ra = Rect(half_rect.x, half_rect.y, half_rect.w, ha)
                rb = Rect(half_rect.x, half_rect.y + ha, half_rect.w,
                          half_rect.y2 - (half_rect.y + ha))
            else:
                y_cut = half_rect.y2 - ha
                ra = Rect(half_rect.x, y_cut, half_rect.w, half_rect.y2 - y_cut)
                rb = Rect(half_rect.x, half_rect.y, half_rect.w, y_cut - half_rect.y)
        else:
            wa = half_rect.w * (qsum / htotal)
            if qa[0] == 0:
                ra = Rect(half_rect.x, half_rect.y, wa, half_rect.h)
                rb = Rect(half_rect.x + wa, half_rect.y,
                          half_rect.x2 - (half_rect.x + wa), half_rect.h)
            else:
                x_cut = half_rect.x2 - wa
                ra = Rect(x_cut, half_rect.y, half_rect.x2 - x_cut, half_rect.h)
                rb = Rect(half_rect.x, half_rect.y, x_cut - half_rect.x, half_rect.h)
        for quarter_idx, (quarter, qrect) in enumerate(zip(quarters, (ra, rb))):
            if len(quarter) == 1:
                out[quarter[0][0]] = qrect
            else:
                visit_idx = 2 * half_idx + quarter_idx
                v, c = _unit(*children[visit_idx])
                _lay_curve(qrect, quarter, v, c, out)


def lay_hil(rect: Rect, items, depth: int = 0) -> dict:
    """Order preserved along a space-filling curve through the quadrants."""
    _check_request(rect, items)
    out = {}
    v, c = _unit(_C_BL, _C_BR)
    _lay_curve(rect, list(items), v, c, out)
    return out


def lay_moo(rect: Rect, items, depth: int = 0) -> dict:
    """Closed-loop variant: the curve ends next to where it started."""
    _check_request(rect, items)
    out = {}
    _lay_curve(rect, list(items), _MOORE_VISITS, _MOORE_CHILDREN, out)
    return out


STATELESS = {
    "SND": lay_snd,
    "SQR": lay_sqr,
    "APP": lay_app,
    "STR": lay_str,
    "SPL": lay_spl,
    "PBM": lay_pbm,
    "PBZ": lay_pbz,
    "PBS": lay_pbs,
    "SPI": lay_spi,
    "HIL": lay_hil,
    "MOO": lay_moo,
}


def lay_out_tree(tree, step, rect: Rect, algorithm: str) -> Layout:
    """Apply a stateless algorithm level by level over the hierarchy.

    Internal nodes receive the total weight of their alive descendants;
    zero-weight subtrees are left out entirely.  Child order follows the
    dataset.
    """
    fn = STATELESS[algorithm.upper()]
    areas = step.areas
    totals = {}

    def total(nid) -> float:
        node = tree.nodes[nid]
        if node.is_leaf:
            return areas.get(nid, 0.0)
        if nid not in totals:
            totals[nid] = sum(total(c) for c in node.children)
        return totals[nid]

    if total(tree.root_id) <= 0.0:
        raise ValueError("nothing alive to lay out")

    cells = {}
    groups = {}

    def rec(nid, r, depth):
        groups[nid] = r
        kids = [(k, total(k)) for k in tree.nodes[nid].children if total(k) > 0.0]
        placed = fn(r, kids, depth)
        for k, _ in kids:
            if tree.nodes[k].is_leaf:
                cells[k] = placed[k]
            else:
                rec(k, placed[k], depth + 1)

    rec(tree.root_id, rect, 0)
    return Layout(root=rect, cells=cells, groups=groups)
