"""Time-varying hierarchical datasets: parsing, validation, normalization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


class DatasetError(ValueError):
    """Malformed or inconsistent dataset input."""


@dataclass
class Node:
    id: str
    parent: str | None
    weights: list[float] | None = None
    children: list[str] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return self.weights is not None


@dataclass
class TimeVaryingTree:
    """Rooted hierarchy with one non-negative weight per leaf per time step.

    A leaf is alive at step t when its weight is positive; weight 0 encodes
    absence.  The hierarchy itself does not change over time.  Node order
    (and therefore child order) is the order of appearance in the dataset,
    which ordered layout algorithms must preserve.
    """

    name: str
    num_timesteps: int
    nodes: dict[str, Node]
    root_id: str

    def leaf_ids(self) -> list[str]:
        return [nid for nid, n in self.nodes.items() if n.is_leaf]

    def weight(self, leaf_id: str, t: int) -> float:
        return self.nodes[leaf_id].weights[t]

    def alive(self, t: int) -> set[str]:
        return {nid for nid in self.leaf_ids() if self.weight(nid, t) > 0.0}

    def total_weight(self, t: int) -> float:
        return sum(self.weight(nid, t) for nid in self.leaf_ids())

    def depth(self, node_id: str) -> int:
        d = 0
        cur = self.nodes[node_id]
        while cur.parent is not None:
            cur = self.nodes[cur.parent]
            d += 1
        return d

    def max_leaf_depth(self) -> int:
        return max(self.depth(nid) for nid in self.leaf_ids())

    def subtree_leaves(self, node_id: str) -> list[str]:
        """Leaf ids under node_id, in dataset order."""
        out = []
        stack = [node_id]
        while stack:
            nid = stack.pop()
            node = self.nodes[nid]
            if node.is_leaf:
                out.append(nid)
            else:
                # reversed keeps dataset order under stack iteration
                stack.extend(reversed(node.children))
        return out

    def parent_chain(self, node_id: str) -> list[str]:
        """Ancestors from immediate parent up to the root."""
        out = []
        cur = self.nodes[node_id]
        while cur.parent is not None:
            out.append(cur.parent)
            cur = self.nodes[cur.parent]
        return out


@dataclass(frozen=True)
class NormalizedStep:
    """Per-step target areas: alive leaves only, summing to the root area."""

    timestep: int
    areas: dict[str, float]

    @property
    def alive(self) -> frozenset[str]:
        return frozenset(self.areas)

    @property
    def total(self) -> float:
        return sum(self.areas.values())


def parse_dataset(data) -> TimeVaryingTree:
    """Parse a dataset from JSON text/bytes or an already-decoded dict."""
    if isinstance(data, (bytes, str)):
        try:
            obj = json.loads(data)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"malformed JSON: {exc}") from exc
    else:
        obj = data
    if not isinstance(obj, dict):
        raise DatasetError("dataset must be a JSON object")

    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise DatasetError("dataset needs a non-empty string 'name'")
    steps = obj.get("num_timesteps")
    if not isinstance(steps, int) or steps < 1:
        raise DatasetError("'num_timesteps' must be a positive integer")
    raw_nodes = obj.get("nodes")
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise DatasetError("'nodes' must be a non-empty list")

    nodes: dict[str, Node] = {}
    for entry in raw_nodes:
        if not isinstance(entry, dict):
            raise DatasetError("each node must be an object")
        nid = entry.get("id")
        if not isinstance(nid, str) or not nid:
            raise DatasetError("node id must be a non-empty string")
        if nid in nodes:
            raise DatasetError(f"duplicate node id {nid!r}")
        parent = entry.get("parent")
        if parent is not None and not isinstance(parent, str):
            raise DatasetError(f"node {nid!r}: parent must be a string or null")
        weights = entry.get("weights")
        if weights is not None:
            if not isinstance(weights, list):
                raise DatasetError(f"node {nid!r}: weights must be a list")
            if len(weights) != steps:
                raise DatasetError(
                    f"node {nid!r}: weights length mismatch "
                    f"({len(weights)} != {steps})"
                )
            vals = []
            for w in weights:
                if not isinstance(w, (int, float)) or isinstance(w, bool):
                    raise DatasetError(f"node {nid!r}: non-numeric weight")
                w = float(w)
                if math.isnan(w) or math.isinf(w) or w < 0.0:
                    raise DatasetError(f"node {nid!r}: weights must be finite and >= 0")
                vals.append(w)
            weights = vals
        nodes[nid] = Node(id=nid, parent=parent, weights=weights)

    roots = [nid for nid, n in nodes.items() if n.parent is None]
    if len(roots) != 1:
        raise DatasetError(f"expected exactly one root, found {len(roots)} (multiple roots or none)")
    root_id = roots[0]

    for nid, node in nodes.items():
        if node.parent is not None:
            if node.parent not in nodes:
                raise DatasetError(f"node {nid!r}: unknown parent {node.parent!r}")
            nodes[node.parent].children.append(nid)

    # reachability from the root doubles as the cycle check
    seen = set()
    stack = [root_id]
    while stack:
        nid = stack.pop()
        if nid in seen:
            raise DatasetError("hierarchy contains a cycle")
        seen.add(nid)
        stack.extend(nodes[nid].children)
    if len(seen) != len(nodes):
        raise DatasetError("hierarchy contains a cycle or unreachable nodes")

    for nid, node in nodes.items():
        if node.children and node.weights is not None:
            raise DatasetError(f"internal node {nid!r} must not carry weights")
        if not node.children and node.weights is None:
            raise DatasetError(f"leaf {nid!r} is missing weights")
    if nodes[root_id].is_leaf:
        raise DatasetError("root must be an internal node")

    tree = TimeVaryingTree(name=name, num_timesteps=steps, nodes=nodes, root_id=root_id)
    for t in range(steps):
        if tree.total_weight(t) <= 0.0:
            raise DatasetError(f"all weights are zero at timestep {t}")
    return tree


def serialize_dataset(tree: TimeVaryingTree) -> bytes:
    """Canonical JSON form; stable node order, round-trips through parse."""
    out = {
        "name": tree.name,
        "num_timesteps": tree.num_timesteps,
        "nodes": [
            {
                "id": n.id,
                "parent": n.parent,
                **({"weights": n.weights} if n.weights is not None else {}),
            }
            for n in tree.nodes.values()
        ],
    }
    return json.dumps(out, indent=1).encode("utf-8")


def normalize_step(tree: TimeVaryingTree, t: int, rect_area: float) -> NormalizedStep:
    """Scale step-t weights of alive leaves so they sum to rect_area."""
    if not 0 <= t < tree.num_timesteps:
        raise DatasetError(f"timestep {t} out of range")
    if rect_area <= 0.0:
        raise ValueError("rect_area must be positive")
    total = tree.total_weight(t)
    if total <= 0.0:
        raise DatasetError(f"all weights are zero at timestep {t}")
    scale = rect_area / total
    areas = {
        nid: tree.weight(nid, t) * scale
        for nid in tree.leaf_ids()
        if tree.weight(nid, t) > 0.0
    }
    return NormalizedStep(timestep=t, areas=areas)
