"""Synthetic time-varying datasets aimed at a requested class.

Construction is direct: hierarchy depth comes from the class, weights from a
lognormal whose spread sets the variance class, per-transition weight shift
from mass transfers between two fixed halves of the stable leaves, and
insertions/deletions from a churn pool whose halves alternate between steps.
The result is verified with the actual classifier and regenerated (same
generator stream) until it matches, which keeps the construction honest
without hand-tuned corrections.
"""

from __future__ import annotations

import itertools

import numpy as np

from .classify import DataClass, classify, parse_label
from .tree import TimeVaryingTree, parse_dataset

_BASE_SIGMA = {"LWV": 0.4, "HWV": 1.5}
_CHURN_WEIGHT = {"LWC": 0.02, "RWC": 0.3, "SWC": 0.8}
_CHANGE_TARGET = {"LWC": (0.01, 0.03), "RWC": (0.08, 0.16), "SWC": (0.25, 0.45)}
_DEPTH_CHOICES = {"1L": (1,), "2/3L": (2, 3), "4+L": (4, 5)}
_REL_FLOOR = 1e-7


class GenerationError(RuntimeError):
    pass


def sanitize_label(label: str) -> str:
    return label.replace("/", "")


def _hierarchy(rng, n_leaves: int, depth: int):
    """Internal skeleton with every leaf at the same depth."""
    internals = []
    leaf_parents = []
    counter = itertools.count()

    def rec(parent, quota, d):
        if d == depth - 1:
            leaf_parents.extend([parent] * quota)
            return
        k = 1 if quota == 1 else int(rng.integers(2, min(4, quota) + 1))
        if k > 1:
            cuts = sorted(int(c) + 1 for c in rng.choice(quota - 1, size=k - 1, replace=False))
        else:
            cuts = []
        bounds = [0] + cuts + [quota]
        for lo, hi in zip(bounds, bounds[1:]):
            nid = f"g{next(counter):03d}"
            internals.append((nid, parent))
            rec(nid, hi - lo, d + 1)

    rec("root", n_leaves, 0)
    return internals, leaf_parents


def _attempt(dc: DataClass, rng, n: int, steps: int, name: str) -> TimeVaryingTree:
    depth = int(rng.choice(_DEPTH_CHOICES[dc.levels]))
    internals, leaf_parents = _hierarchy(rng, n, depth)
    base = rng.lognormal(0.0, _BASE_SIGMA[dc.variance], size=n)
    cf = _CHURN_WEIGHT[dc.change]

    if dc.insdel == "RID":
        k = max(1, round(0.05 * n))
    elif dc.insdel == "SID":
        k = max(2, round(0.125 * n))
    else:
        k = 0
    churn = [int(i) for i in rng.choice(n, size=2 * k, replace=False)] if k else []
    even_half = set(churn[:k])
    odd_half = set(churn[k:])
    churn_set = set(churn)
    stable = [i for i in range(n) if i not in churn_set]

    half_order = list(stable)
    rng.shuffle(half_order)
    h1 = half_order[: len(stable) // 2]
    h2 = half_order[len(stable) // 2 :]
    target = rng.uniform(*_CHANGE_TARGET[dc.change])

    def alive_at(t):
        return set(stable) | (even_half if t % 2 == 0 else odd_half)

    def natural(i):
        return base[i] * (cf if i in churn_set else 1.0)

    raw0 = {i: natural(i) for i in alive_at(0)}
    s0 = sum(raw0.values())
    rel = [{i: v / s0 for i, v in raw0.items()}]

    for t in range(1, steps):
        prev = rel[-1]
        alive = alive_at(t)
        stay = set(prev) & alive
        born = alive - set(prev)
        v = {i: prev[i] for i in stay}
        if born:
            # newcomers enter at their natural size relative to the stayers
            ratio = sum(v.values()) / sum(natural(i) for i in stay)
            for i in born:
                v[i] = natural(i) * ratio
        sv = sum(v.values())
        u = {i: x / sv for i, x in v.items()}
        indel = (
            sum(prev[i] for i in set(prev) - alive)
            + sum(u[i] for i in born)
            + sum(abs(u[i] - prev[i]) for i in stay)
        )
        wanted = target * rng.uniform(0.9, 1.1)
        m = max(0.0, wanted - indel) / 2.0
        # alternate the transfer direction so weights oscillate around their
        # base instead of drifting, keeping the pooled spread in class
        src, dst = (h1, h2) if t % 2 == 1 else (h2, h1)
        mass_src = sum(u[i] for i in src)
        mass_dst = sum(u[i] for i in dst)
        if m > 0.0 and mass_src > 0.0 and mass_dst > 0.0:
            m = min(m, 0.9 * mass_src)
            for i in src:
                u[i] -= u[i] * (m / mass_src)
            for i in dst:
                u[i] += u[i] * (m / mass_dst)
        for i in u:
            if u[i] < _REL_FLOOR:
                u[i] = _REL_FLOOR
        su = sum(u.values())
        rel.append({i: x / su for i, x in u.items()})

    nodes = [{"id": "root", "parent": None}]
    nodes.extend({"id": nid, "parent": parent} for nid, parent in internals)
    for j in range(n):
        nodes.append(
            {
                "id": f"L{j:03d}",
                "parent": leaf_parents[j],
                "weights": [float(rel[t].get(j, 0.0)) for t in range(steps)],
            }
        )
    return parse_dataset({"name": name, "num_timesteps": steps, "nodes": nodes})


def generate_synthetic(
    data_class,
    seed: int = 0,
    num_leaves: int | None = None,
    num_timesteps: int | None = None,
    name: str | None = None,
    max_attempts: int = 100,
) -> TimeVaryingTree:
    """Dataset of the requested class; deterministic in (class, seed, sizes)."""
    if isinstance(data_class, str):
        data_class = parse_label(data_class)
    if num_leaves is not None and num_leaves < 8:
        raise ValueError("need at least 8 leaves")
    if num_timesteps is not None and num_timesteps < 2:
        raise ValueError("need at least 2 timesteps")
    rng = np.random.default_rng(seed)
    name = name or f"syn-{sanitize_label(data_class.label)}-s{seed}"
    for _ in range(max_attempts):
        n = num_leaves or int(rng.integers(18, 41))
        steps = num_timesteps or int(rng.integers(8, 15))
        tree = _attempt(data_class, rng, n, steps, name)
        if classify(tree) == data_class:
            return tree
    raise GenerationError(
        f"could not generate a dataset of class {data_class.label} "
        f"in {max_attempts} attempts (seed {seed})"
    )
