"""Touch routing through the window stack and the victim-side touch filters.

The overlay never consumes a touch; it only decides whether the touch
arrives marked as obscured. The victim's policy then keeps or drops it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import ScenarioError
from .geometry import PxPoint, rect_to_px
from .windowing import WindowStack, is_point_obscured, last_unobscured_at


@dataclass(frozen=True)
class Default:
    def __str__(self) -> str:
        return "Default"


@dataclass(frozen=True)
class FilterWhenObscured:
    """Drop every touch that arrives with the obscured flag set."""

    def __str__(self) -> str:
        return "FilterWhenObscured"


@dataclass(frozen=True)
class RecentFocusFilter:
    """Accept a touch only if the touched point was uncovered within ``window_ms``."""

    window_ms: int = 5000

    def __post_init__(self) -> None:
        if self.window_ms <= 0:
            raise ScenarioError("RecentFocusFilter: window_ms must be > 0")

    def __str__(self) -> str:
        return f"RecentFocusFilter({self.window_ms})"


TouchPolicy = Union[Default, FilterWhenObscured, RecentFocusFilter]


@dataclass(frozen=True)
class TouchEvent:
    point_px: PxPoint
    t_ms: int


@dataclass(frozen=True)
class Delivered:
    target_name: str | None
    obscured: bool

    def __str__(self) -> str:
        return f"Delivered {self.target_name or '<none>'} obscured={str(self.obscured).lower()}"


@dataclass(frozen=True)
class FilteredObscured:
    def __str__(self) -> str:
        return "FilteredObscured"


DispatchOutcome = Union[Delivered, FilteredObscured]


def hit_target(stack: WindowStack, p: PxPoint) -> str | None:
    for target in stack.current_screen.targets:
        if rect_to_px(target.rect, stack.device).contains(p):
            return target.name
    return None


def dispatch(stack: WindowStack, e: TouchEvent) -> DispatchOutcome:
    if not stack.device.in_bounds(e.point_px):
        raise ScenarioError(
            f"touch at px ({e.point_px.x}, {e.point_px.y}) is outside the "
            f"{stack.device.width_px}x{stack.device.height_px} screen"
        )
    if e.t_ms < 0:
        raise ScenarioError(f"touch time must be >= 0, got {e.t_ms}")
    obscured = is_point_obscured(stack, e.point_px, e.t_ms)
    policy = stack.policy
    if isinstance(policy, FilterWhenObscured) and obscured:
        return FilteredObscured()
    if isinstance(policy, RecentFocusFilter):
        last = last_unobscured_at(stack, e.point_px, e.t_ms)
        if last is None or last < e.t_ms - policy.window_ms:
            return FilteredObscured()
    return Delivered(hit_target(stack, e.point_px), obscured)
