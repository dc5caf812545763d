"""State-carrying algorithms: layouts evolve by local edits, not recomputation.

A state holds the segment-support structure of the previous step.  Advancing
drives deleted leaves to zero area and merges their walls away, slices host
cells to make room for inserted leaves, re-realizes everything toward the new
areas, and (for the move-enabled variant) tries a few shape-improving local
moves.  If no leaf survives a transition the state restarts from its
initializer algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import Layout, Rect
from .stateless import lay_out_tree
from .structure import (
    ZERO_AREA_CLAMP_FRAC,
    HillClimbError,
    SupportStructure,
)

STATEFUL_INIT = {"LM0": "APP", "LM4": "APP", "GIT": "SQR"}
MOVE_BUDGET = {"LM0": 0, "LM4": 4, "GIT": 0}
_SHORTLIST = 10
_TRIAL_TOL = 1e-3
_TRIAL_SWEEPS = 80


@dataclass
class LayoutState:
    algorithm: str
    tree: object
    rect: Rect
    structure: SupportStructure
    areas: dict   # realized target areas of the current step


def init_state(tree, step, rect: Rect, algorithm: str) -> LayoutState:
    alg = algorithm.upper()
    base = lay_out_tree(tree, step, rect, STATEFUL_INIT[alg])
    return LayoutState(
        algorithm=alg,
        tree=tree,
        rect=rect,
        structure=SupportStructure.from_layout(base),
        areas=dict(step.areas),
    )


def current_layout(state: LayoutState) -> Layout:
    return state.structure.to_layout()


def _rho(w: float, h: float) -> float:
    return min(w, h) / max(w, h)


def _choose_host(tree, st: SupportStructure, new_id: str, next_areas: dict) -> str:
    """Pick the cell to slice for a new leaf.

    Candidates are the existing cells under the nearest ancestor that has
    any; the winner maximizes the worse aspect ratio of the two slice pieces,
    lowest id on ties.
    """
    live = set(st.cells)
    cands = []
    for anc in tree.parent_chain(new_id):
        cands = [c for c in tree.subtree_leaves(anc) if c in live]
        if cands:
            break
    if not cands:
        raise HillClimbError(f"no host cell available for {new_id!r}")
    a_new = next_areas[new_id]
    best_q, best_c = -1.0, None
    for c in sorted(cands):
        r = st.cell_rect(c)
        f = a_new / (a_new + next_areas[c])
        if r.w >= r.h:
            q = min(_rho(r.w * (1.0 - f), r.h), _rho(r.w * f, r.h))
        else:
            q = min(_rho(r.w, r.h * (1.0 - f)), _rho(r.w, r.h * f))
        if q > best_q + 1e-12:
            best_q, best_c = q, c
    return best_c


def _involved(move) -> tuple:
    if move[0] == "flip":
        return move[2], move[3]
    return move[1], move[3]


def _try_moves(st: SupportStructure, targets: dict, budget: int) -> SupportStructure:
    """Greedy local improvement: accept a move only if the fully re-realized
    layout has a better mean aspect ratio.  Candidates are shortlisted by the
    worst aspect ratio among the cells they touch and vetted with a coarse,
    capped realization before the winner is confirmed at full precision."""
    if budget <= 0:
        return st
    base = st.mean_aspect()
    for _ in range(budget):
        moves = st.flip_candidates() + st.stretch_candidates()
        if not moves:
            break
        scored = []
        for mv in moves:
            worst = min(
                _rho(st.cell_rect(c).w, st.cell_rect(c).h) for c in _involved(mv)
            )
            scored.append((worst, repr(mv), mv))
        scored.sort(key=lambda x: (x[0], x[1]))
        best_q, best_mv = -1.0, None
        for _, _, mv in scored[:_SHORTLIST]:
            trial = st.clone()
            _apply_move(trial, mv)
            try:
                trial.repair_feasibility()
                trial.realize(targets, tol_frac=_TRIAL_TOL, max_sweeps=_TRIAL_SWEEPS)
            except HillClimbError:
                continue
            q = trial.mean_aspect()
            if q > best_q + 1e-12:
                best_q, best_mv = q, mv
        if best_mv is None or best_q <= base:
            break
        candidate = st.clone()
        _apply_move(candidate, best_mv)
        try:
            candidate.repair_feasibility()
            res = candidate.realize(targets)
        except HillClimbError:
            break
        q = candidate.mean_aspect()
        if not res.converged or q <= base + 1e-12:
            break
        st, base = candidate, q
    return st


def _apply_move(st: SupportStructure, move) -> None:
    if move[0] == "flip":
        st.apply_flip(move)
    else:
        st.apply_stretch(move)


def advance(state: LayoutState, next_step) -> Layout:
    """Carry the state to the next step's areas and return the new layout."""
    st = state.structure
    rect_area = state.rect.area
    nxt = dict(next_step.areas)
    cur_ids = set(state.areas)
    survivors = cur_ids & set(nxt)

    if not survivors:
        fresh = init_state(state.tree, next_step, state.rect, state.algorithm)
        state.structure = fresh.structure
        state.areas = fresh.areas
        return current_layout(state)

    dead = sorted(cur_ids - set(nxt))
    born = sorted(set(nxt) - cur_ids)

    if dead:
        # shrink the dying cells to nothing while survivors take up the slack
        clamp = ZERO_AREA_CLAMP_FRAC * rect_area
        surv_sum = sum(nxt[c] for c in survivors)
        scale = (rect_area - len(dead) * clamp) / surv_sum
        targets = {c: nxt[c] * scale for c in survivors}
        for c in dead:
            targets[c] = clamp
        st.realize(targets)
        dead_set = set(dead)
        for c in dead:
            st.remove_cell_collapsed(c, dead=dead_set)
        st.repair_feasibility()

    for new_id in born:
        host = _choose_host(state.tree, st, new_id, nxt)
        hr = st.cell_rect(host)
        frac = nxt[new_id] / (nxt[new_id] + nxt[host])
        st.split_cell(host, new_id, frac, "x" if hr.w >= hr.h else "y")

    st.realize(nxt)
    st = _try_moves(st, nxt, MOVE_BUDGET[state.algorithm])

    state.structure = st
    state.areas = nxt
    return current_layout(state)
