from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tapsim.dispatch import (
    Default,
    Delivered,
    FilteredObscured,
    FilterWhenObscured,
    RecentFocusFilter,
    TouchEvent,
    dispatch,
)
from tapsim.documents import load_fixture
from tapsim.errors import ScenarioError
from tapsim.geometry import DpPoint, PxPoint, dp_to_px
from tapsim.windowing import ToastSchedule, is_point_obscured

INSTALL_BAIT = DpPoint(244, 308)
CANONICAL = load_fixture("canonical-install").stack(0)


def with_schedule(stack, **kw):
    overlay = replace(stack.overlay, schedule=replace(stack.overlay.schedule, **kw))
    return replace(stack, overlay=overlay)


def tap(stack, p=INSTALL_BAIT, t=1000):
    return TouchEvent(dp_to_px(p, stack.device), t)


def test_default_delivers_obscured(canonical_stack):
    assert dispatch(canonical_stack, tap(canonical_stack)) == Delivered("install_button", True)


def test_declarative_filter_drops(canonical_stack):
    s = replace(canonical_stack, policy=FilterWhenObscured())
    assert dispatch(s, tap(s)) == FilteredObscured()


def test_declarative_filter_passes_in_gap(canonical_stack):
    s = replace(canonical_stack, policy=FilterWhenObscured())
    assert dispatch(s, tap(s, t=3700)) == Delivered("install_button", False)


def test_recent_focus_filter_examples(canonical_stack):
    s = replace(canonical_stack, policy=RecentFocusFilter(5000))
    assert dispatch(s, tap(s, t=5000)) == Delivered("install_button", True)
    s0 = with_schedule(s, gap_ms=0)
    assert dispatch(s0, tap(s0, t=6000)) == FilteredObscured()


def test_miss_delivers_no_target(canonical_stack):
    out = dispatch(canonical_stack, tap(canonical_stack, DpPoint(100, 600)))
    assert out == Delivered(None, True)


@pytest.mark.parametrize("p", [PxPoint(-1, 0), PxPoint(720, 10), PxPoint(5, 1280)])
def test_out_of_bounds_rejected(canonical_stack, p):
    with pytest.raises(ScenarioError, match="outside"):
        dispatch(canonical_stack, TouchEvent(p, 0))


def _grid(stack, nx, ny):
    w, h = stack.device.width_px, stack.device.height_px
    return [PxPoint(i * w // nx, j * h // ny) for i in range(nx) for j in range(ny)]


@settings(max_examples=25, deadline=None)
@given(
    st.integers(0, 3000), st.integers(1, 4000), st.integers(0, 1500), st.booleans(),
    st.lists(st.integers(0, 20000), min_size=1, max_size=8),
)
def test_policy_monotonicity(start, dur, gap, opaque, times):
    base = with_schedule(CANONICAL, start_ms=start, duration_ms=dur, gap_ms=gap)
    base = replace(base, overlay=replace(base.overlay, opaque_background=opaque))
    windows = [250, 1000, 4000, 5000, 12000]
    for p in _grid(base, 8, 8):
        for t in times:
            e = TouchEvent(p, t)
            default = dispatch(base, e)
            strict = dispatch(replace(base, policy=FilterWhenObscured()), e)
            if isinstance(strict, Delivered):
                assert strict == default
            filtered = [isinstance(dispatch(replace(base, policy=RecentFocusFilter(w)), e), FilteredObscured) for w in windows]
            # filtered at window w => filtered at every smaller window
            for small, large in zip(filtered, filtered[1:]):
                assert small or not large


def test_policies_agree_without_overlay(canonical_stack):
    quiet = with_schedule(canonical_stack, start_ms=10**9)
    for p in _grid(quiet, 20, 20):
        for t in range(0, 20000, 1999):
            e = TouchEvent(p, t)
            outs = {dispatch(replace(quiet, policy=pol), e) for pol in (Default(), FilterWhenObscured(), RecentFocusFilter(5000))}
            assert len(outs) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 719), st.integers(0, 1279), st.integers(0, 10000), st.booleans())
def test_obscured_flag_matches_query(x, y, t, opaque):
    s = replace(CANONICAL, overlay=replace(CANONICAL.overlay, opaque_background=opaque))
    out = dispatch(s, TouchEvent(PxPoint(x, y), t))
    assert out.obscured == is_point_obscured(s, PxPoint(x, y), t)


def test_policy_invariants():
    with pytest.raises(ScenarioError):
        RecentFocusFilter(0)
    assert str(RecentFocusFilter(5000)) == "RecentFocusFilter(5000)"
