import pytest

from tmbench.geometry import Rect
from tmbench.tree import parse_dataset


def flat_dataset(weights, name="flat", ids=None):
    """Root plus one leaf per row of `weights` (one weight per timestep)."""
    steps = len(weights[0])
    ids = ids or [f"L{i}" for i in range(len(weights))]
    nodes = [{"id": "root", "parent": None}]
    for lid, row in zip(ids, weights):
        nodes.append({"id": lid, "parent": "root", "weights": list(row)})
    return parse_dataset(
        {"name": name, "num_timesteps": steps, "nodes": nodes}
    )


@pytest.fixture
def unit_rect():
    return Rect(0.0, 0.0, 1.0, 1.0)


@pytest.fixture
def square_1000():
    return Rect(0.0, 0.0, 1000.0, 1000.0)
