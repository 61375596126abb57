import pytest
from hypothesis import given
from hypothesis import strategies as st

from tapsim.errors import ScenarioError
from tapsim.geometry import (
    DeviceProfile,
    DpPoint,
    DpRect,
    PxPoint,
    contains,
    dp_to_px,
    intersects,
    px_to_dp,
    rect_to_px,
    round_half_away,
)

coord = st.floats(-1e4, 1e4, allow_nan=False)
size = st.floats(0, 1e3, allow_nan=False)
density = st.sampled_from([0.75, 1.0, 1.5, 2.0, 2.625, 3.0, 4.0])
rects = st.builds(DpRect, coord, coord, size, size)


def dev(d):
    return DeviceProfile("t", 100, 100, d)


@pytest.mark.parametrize(
    "p, d, expected",
    [((100, 50), 1.0, (100, 50)), ((100, 50), 2.0, (200, 100)), ((10.25, 0), 2.0, (21, 0))],
)
def test_dp_to_px_examples(p, d, expected):
    assert dp_to_px(DpPoint(*p), dev(d)) == PxPoint(*expected)


@pytest.mark.parametrize("v, r", [(0.5, 1), (-0.5, -1), (1.5, 2), (-2.5, -3), (2.4999, 2), (-0.4, 0)])
def test_round_half_away(v, r):
    assert round_half_away(v) == r


def test_px_to_dp_examples():
    assert px_to_dp(PxPoint(200, 100), dev(2.0)) == DpPoint(100.0, 50.0)
    assert px_to_dp(PxPoint(7, 0), dev(1.0)) == DpPoint(7.0, 0.0)


@given(coord, coord, density)
def test_round_trip_bound(x, y, d):
    back = px_to_dp(dp_to_px(DpPoint(x, y), dev(d)), dev(d))
    assert abs(back.x - x) <= 0.5 / d + 1e-9
    assert abs(back.y - y) <= 0.5 / d + 1e-9


@given(coord, coord, density)
def test_dp_to_px_monotone(a, b, d):
    lo, hi = sorted((a, b))
    assert dp_to_px(DpPoint(lo, lo), dev(d)).x <= dp_to_px(DpPoint(hi, hi), dev(d)).x


def test_contains_examples():
    r = DpRect(0, 0, 10, 10)
    assert contains(r, DpPoint(0, 0))
    assert not contains(r, DpPoint(10, 5))
    assert not contains(DpRect(0, 0, 0, 0), DpPoint(0, 0))


def test_intersects_examples():
    a = DpRect(0, 0, 10, 10)
    assert intersects(a, DpRect(5, 5, 10, 10))
    assert not intersects(a, DpRect(10, 0, 10, 10))
    assert intersects(a, DpRect(2, 2, 1, 1))


@given(rects, rects)
def test_intersects_symmetric(a, b):
    assert intersects(a, b) == intersects(b, a)


@given(rects, coord, coord, st.floats(1e-6, 1e-2))
def test_contains_implies_intersects_eps_rect(r, x, y, eps):
    p = DpPoint(x, y)
    if contains(r, p):
        assert intersects(r, DpRect(x, y, eps, eps))


def test_rect_to_px_snaps_corners():
    assert tuple(vars(rect_to_px(DpRect(10.25, 0, 5, 5), dev(2.0))).values()) == (21, 0, 31, 10)


@pytest.mark.parametrize("kw", [dict(width_px=0), dict(height_px=-1), dict(density=0.0)])
def test_device_invariants(kw):
    args = dict(name="x", width_px=10, height_px=10, density=1.0) | kw
    with pytest.raises(ScenarioError):
        DeviceProfile(**args)


def test_negative_rect_rejected():
    with pytest.raises(ScenarioError):
        DpRect(0, 0, -1, 3)
