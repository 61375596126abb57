import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tapsim.dispatch import Default
from tapsim.errors import ScenarioError
from tapsim.geometry import DeviceProfile, DpPoint, DpRect, PxPoint
from tapsim.windowing import (
    Action,
    BaitPanel,
    OverlaySpec,
    Screen,
    TapTarget,
    ToastSchedule,
    WindowStack,
    is_point_obscured,
    last_unobscured_at,
    overlay_visible,
)

DEVICE = DeviceProfile("t", 200, 200, 1.0)
SCREEN = Screen("s", (TapTarget("go", DpRect(50, 50, 60, 60), Action.ADVANCE),))
PANEL = BaitPanel(0, DpRect(50, 50, 60, 60), DpPoint(80, 80))


def toast_timeline(s: ToastSchedule, horizon: int) -> np.ndarray:
    """Brute force: lay each toast showing down on a per-ms timeline."""
    shown = np.zeros(horizon, dtype=bool)
    t = s.start_ms
    while t < horizon:
        shown[t : t + s.duration_ms] = True
        t += s.duration_ms + s.gap_ms
    return shown


def stack(schedule, opaque=True):
    return WindowStack(DEVICE, SCREEN, OverlaySpec((PANEL,), opaque, schedule), Default())


schedules = st.builds(
    ToastSchedule, st.integers(0, 300), st.integers(1, 300), st.integers(0, 120)
)


def test_overlay_visible_examples():
    s = ToastSchedule(0, 3500, 500)
    assert overlay_visible(s, 3499)
    assert not overlay_visible(s, 3600)
    assert overlay_visible(s, 4000)
    assert all(overlay_visible(ToastSchedule(100, 3500, 0), t) for t in range(100, 20000, 37))
    assert not overlay_visible(ToastSchedule(100, 3500, 500), 99)


@settings(max_examples=60)
@given(schedules)
def test_overlay_visible_matches_brute_force(s):
    horizon = s.start_ms + 2 * (s.duration_ms + s.gap_ms) + 5
    expected = toast_timeline(s, horizon)
    got = np.array([overlay_visible(s, t) for t in range(horizon)])
    assert (got == expected).all()


def test_obscured_examples():
    s = ToastSchedule(0, 3500, 500)
    assert is_point_obscured(stack(s), PxPoint(0, 0), 100)
    assert not is_point_obscured(stack(s), PxPoint(60, 60), 3700)
    assert not is_point_obscured(stack(s, opaque=False), PxPoint(0, 0), 100)
    assert is_point_obscured(stack(s, opaque=False), PxPoint(60, 60), 100)


@settings(max_examples=30)
@given(schedules, st.integers(0, 199), st.integers(0, 199), st.integers(0, 1500))
def test_opaque_obscured_equals_visible(s, x, y, t):
    assert is_point_obscured(stack(s), PxPoint(x, y), t) == overlay_visible(s, t)


def test_last_unobscured_examples():
    p = PxPoint(60, 60)
    assert last_unobscured_at(stack(ToastSchedule(0, 3500, 500)), p, 5000) == 3999
    assert last_unobscured_at(stack(ToastSchedule(8000, 3500, 500)), p, 5000) == 5000
    assert last_unobscured_at(stack(ToastSchedule(0, 3500, 0)), p, 10000) is None
    assert last_unobscured_at(stack(ToastSchedule(250, 3500, 0)), p, 10000) == 249


@settings(max_examples=60)
@given(schedules, st.booleans(), st.sampled_from([PxPoint(60, 60), PxPoint(5, 5)]))
def test_last_unobscured_matches_brute_force(s, opaque, p):
    st_ = stack(s, opaque)
    horizon = s.start_ms + 2 * (s.duration_ms + s.gap_ms) + 5
    covered = toast_timeline(s, horizon) & (opaque or PANEL.visual_rect.x <= p.x < 110)
    for t in range(0, horizon, 7):
        free = np.flatnonzero(~covered[: t + 1])
        expected = int(free[-1]) if free.size else None
        got = last_unobscured_at(st_, p, t)
        assert got == expected
        if got is not None:
            assert got <= t and not is_point_obscured(st_, p, got)


def test_screen_invariants():
    adv = TapTarget("a", DpRect(0, 0, 50, 50), Action.ADVANCE)
    with pytest.raises(ScenarioError, match="exactly one Advance"):
        Screen("s", (adv, TapTarget("b", DpRect(60, 0, 50, 50), Action.ADVANCE)))
    with pytest.raises(ScenarioError, match="overlap"):
        Screen("s", (adv, TapTarget("b", DpRect(10, 10, 50, 50), Action.DIVERT)))
    with pytest.raises(ScenarioError, match="non-empty"):
        TapTarget("z", DpRect(0, 0, 0, 5), Action.DIVERT)
    Screen("s", (adv, TapTarget("b", DpRect(50, 0, 50, 50), Action.DIVERT)))  # abutting is fine


def test_bait_and_overlay_invariants():
    with pytest.raises(ScenarioError):
        BaitPanel(0, DpRect(0, 0, 10, 10), DpPoint(10, 10))
    with pytest.raises(ScenarioError, match="contiguous"):
        OverlaySpec((BaitPanel(1, DpRect(0, 0, 10, 10), DpPoint(1, 1)),))
    with pytest.raises(ScenarioError):
        ToastSchedule(0, 0, 0)


def test_stack_rejects_screen_off_device():
    big = Screen("s", (TapTarget("go", DpRect(150, 150, 60, 60), Action.ADVANCE),))
    with pytest.raises(ScenarioError):
        WindowStack(DEVICE, big, OverlaySpec((PANEL,)), Default())
