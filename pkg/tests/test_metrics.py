import math

import pytest
from hypothesis import given, strategies as st

from tmbench.geometry import Rect
from tmbench.metrics import (
    StepMetrics,
    aspect_ratio,
    corner_travel,
    stability_excess,
    summarize,
)


def test_aspect_ratio_values():
    assert aspect_ratio(Rect(0, 0, 2, 1)) == pytest.approx(0.5)
    assert aspect_ratio(Rect(0, 0, 3, 3)) == 1.0
    assert aspect_ratio(Rect(0, 0, 4, 1)) == pytest.approx(0.25)
    assert aspect_ratio(Rect(0, 0, 1, 4)) == pytest.approx(0.25)


def test_corner_travel_identity_and_shift():
    root = Rect(0, 0, 1, 1)
    a = Rect(0, 0, 0.5, 0.5)
    assert corner_travel(a, a, root) == 0.0
    b = Rect(0.5, 0, 0.5, 0.5)
    # each corner moves 0.5 along x; diagonal sqrt(2)
    assert corner_travel(a, b, root) == pytest.approx(2.0 / (4 * math.sqrt(2)))


def test_corner_travel_never_exceeds_one():
    # sliver teleports corner to corner: the worst realizable move
    root = Rect(0, 0, 1, 1)
    a = Rect(0, 0, 1e-9, 1e-9)
    b = Rect(1 - 1e-9, 1 - 1e-9, 1e-9, 1e-9)
    assert corner_travel(a, b, root) <= 1.0
    assert corner_travel(a, b, root) == pytest.approx(1.0, abs=1e-6)


def test_corner_travel_symmetry_and_bound():
    root = Rect(0, 0, 3, 2)
    a = Rect(0, 0, 1, 1)
    b = Rect(2, 1, 1, 1)
    assert corner_travel(a, b, root) == pytest.approx(corner_travel(b, a, root))
    assert corner_travel(a, b, root) <= 1.0


@given(
    st.floats(0.01, 0.99),
    st.floats(0.01, 0.99),
    st.floats(0.01, 0.5),
    st.floats(0.01, 0.5),
)
def test_corner_travel_scale_invariance(x, y, w, h):
    root = Rect(0, 0, 1, 1)
    a = Rect(0, 0, w, h)
    b = Rect(min(x, 1 - w), min(y, 1 - h), w, h)
    k = 37.5
    root2 = Rect(0, 0, k, k)
    a2 = Rect(a.x * k, a.y * k, a.w * k, a.h * k)
    b2 = Rect(b.x * k, b.y * k, b.w * k, b.h * k)
    assert corner_travel(a, b, root) == pytest.approx(corner_travel(a2, b2, root2))


def test_stability_excess_clamps_at_zero():
    assert stability_excess(0.3, 0.1) == pytest.approx(0.2)
    assert stability_excess(0.1, 0.3) == 0.0
    assert stability_excess(0.0, 0.0) == 0.0


def test_summarize_means_and_none_handling():
    steps = [
        StepMetrics(0, 1.0, 0.2, 0.1, 0.1),
        StepMetrics(1, 0.5, 0.4, 0.2, 0.2),
        StepMetrics(2, 0.75, None, None, None),  # last step has no transition
    ]
    rec = summarize("ds", "SQR", steps)
    assert rec.mean_rho == pytest.approx((1.0 + 0.5 + 0.75) / 3)
    assert rec.mean_ct == pytest.approx(0.3)
    assert rec.mean_ct_baseline == pytest.approx(0.15)
    assert rec.mean_sigma == pytest.approx(0.15)


def test_summarize_single_step_has_no_stability():
    rec = summarize("ds", "SQR", [StepMetrics(0, 0.8, None, None, None)])
    assert rec.mean_rho == pytest.approx(0.8)
    assert rec.mean_ct is None
    assert rec.mean_sigma is None
