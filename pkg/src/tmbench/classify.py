"""Dataset classification along four structural features.

Every dataset lands in exactly one of 54 classes, combining hierarchy depth,
pooled weight variance, weight change per transition, and insertion/deletion
impact per transition.  Thresholds are deliberately coarse; the point is to
group datasets with similar dynamics, not to fit them tightly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

LEVELS_CLASSES = ("1L", "2/3L", "4+L")
VARIANCE_CLASSES = ("LWV", "HWV")
CHANGE_CLASSES = ("LWC", "RWC", "SWC")
INSDEL_CLASSES = ("LID", "RID", "SID")


@dataclass(frozen=True)
class DataClass:
    levels: str
    variance: str
    change: str
    insdel: str

    @property
    def label(self) -> str:
        return f"{self.levels}-{self.variance}-{self.change}-{self.insdel}"

    def __str__(self) -> str:
        return self.label


ALL_CLASSES = tuple(
    DataClass(*combo)
    for combo in itertools.product(
        LEVELS_CLASSES, VARIANCE_CLASSES, CHANGE_CLASSES, INSDEL_CLASSES
    )
)


def parse_label(label: str) -> DataClass:
    parts = label.split("-")
    if (
        len(parts) != 4
        or parts[0] not in LEVELS_CLASSES
        or parts[1] not in VARIANCE_CLASSES
        or parts[2] not in CHANGE_CLASSES
        or parts[3] not in INSDEL_CLASSES
    ):
        raise ValueError(f"not a class label: {label!r}")
    return DataClass(*parts)


def _mean_pstd(values) -> tuple:
    n = len(values)
    if n == 0:
        return 0.0, 0.0
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def levels_class(tree) -> str:
    d = tree.max_leaf_depth()
    if d <= 1:
        return "1L"
    if d <= 3:
        return "2/3L"
    return "4+L"


def variance_class(tree) -> str:
    weights = [
        w
        for nid in tree.leaf_ids()
        for w in tree.nodes[nid].weights
        if w > 0.0
    ]
    mean, std = _mean_pstd(weights)
    return "LWV" if std <= mean else "HWV"


def _relative_areas(tree, t: int) -> dict:
    alive = tree.alive(t)
    total = sum(tree.weight(nid, t) for nid in alive)
    return {nid: tree.weight(nid, t) / total for nid in alive}


def change_values(tree) -> list:
    """Per transition: total shift of relative area, absent leaves counting
    as zero on their missing side."""
    out = []
    prev = _relative_areas(tree, 0)
    for t in range(1, tree.num_timesteps):
        cur = _relative_areas(tree, t)
        shift = 0.0
        for nid in set(prev) | set(cur):
            shift += abs(cur.get(nid, 0.0) - prev.get(nid, 0.0))
        out.append(shift)
        prev = cur
    return out


def change_class_from_values(values) -> str:
    mean, std = _mean_pstd(values)
    if mean < 0.05 and std < 0.05:
        return "LWC"
    if 0.05 <= mean < 0.20 and std <= mean:
        return "RWC"
    return "SWC"


def change_class(tree) -> str:
    return change_class_from_values(change_values(tree))


def insdel_values(tree) -> list:
    """Per transition: churned leaf count relative to the source population."""
    out = []
    prev = tree.alive(0)
    for t in range(1, tree.num_timesteps):
        cur = tree.alive(t)
        out.append(len(prev ^ cur) / len(prev))
        prev = cur
    return out


def insdel_class_from_values(values) -> str:
    mean, std = _mean_pstd(values)
    if mean < 0.05 and std < 0.05:
        return "LID"
    if mean < 0.20 and std <= mean:
        return "RID"
    return "SID"


def insdel_class(tree) -> str:
    return insdel_class_from_values(insdel_values(tree))


def classify(tree) -> DataClass:
    return DataClass(
        levels=levels_class(tree),
        variance=variance_class(tree),
        change=change_class(tree),
        insdel=insdel_class(tree),
    )
