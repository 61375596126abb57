"""The two-layer window stack: victim screens below, a looping toast overlay above.

All times are integer milliseconds on the simulation clock.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from .errors import ScenarioError
from .geometry import DeviceProfile, DpPoint, DpRect, PxPoint, contains, intersects, rect_to_px, within

if TYPE_CHECKING:
    from .dispatch import TouchPolicy


class Action(Enum):
    ADVANCE = "Advance"
    DIVERT = "Divert"
    INERT = "Inert"


@dataclass(frozen=True)
class TapTarget:
    name: str
    rect: DpRect
    action: Action

    def __post_init__(self) -> None:
        if self.action is not Action.INERT and self.rect.empty:
            raise ScenarioError(f"target {self.name!r}: {self.action.value} target needs a non-empty rect")


@dataclass(frozen=True)
class Screen:
    """One victim activity screen.

    Device-bound checks are left to the layout validator so that out-of-bounds
    layouts can be reported rather than refused.
    """

    name: str
    targets: tuple[TapTarget, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        names = [t.name for t in self.targets]
        if len(set(names)) != len(names):
            raise ScenarioError(f"screen {self.name!r}: target names must be unique")
        n_adv = sum(t.action is Action.ADVANCE for t in self.targets)
        if n_adv != 1:
            raise ScenarioError(f"screen {self.name!r}: expected exactly one Advance target, found {n_adv}")
        for i, a in enumerate(self.targets):
            for b in self.targets[i + 1 :]:
                if intersects(a.rect, b.rect):
                    raise ScenarioError(f"screen {self.name!r}: targets {a.name!r} and {b.name!r} overlap")

    @property
    def advance_target(self) -> TapTarget:
        return next(t for t in self.targets if t.action is Action.ADVANCE)

    @property
    def divert_targets(self) -> tuple[TapTarget, ...]:
        return tuple(t for t in self.targets if t.action is Action.DIVERT)

    def fits(self, device: DeviceProfile) -> bool:
        bounds = device.bounds_dp()
        return all(within(t.rect, bounds) for t in self.targets)


@dataclass(frozen=True)
class BaitPanel:
    step_index: int
    visual_rect: DpRect
    aim_point: DpPoint

    def __post_init__(self) -> None:
        if self.step_index < 0:
            raise ScenarioError(f"bait panel step {self.step_index}: step must be >= 0")
        if not contains(self.visual_rect, self.aim_point):
            raise ScenarioError(f"bait panel step {self.step_index}: aim_point lies outside visual_rect")


@dataclass(frozen=True)
class ToastSchedule:
    start_ms: int = 0
    duration_ms: int = 3500
    gap_ms: int = 500

    def __post_init__(self) -> None:
        if self.start_ms < 0 or self.duration_ms <= 0 or self.gap_ms < 0:
            raise ScenarioError("schedule: need start_ms >= 0, duration_ms > 0, gap_ms >= 0")

    @property
    def period_ms(self) -> int:
        return self.duration_ms + self.gap_ms


@dataclass(frozen=True)
class OverlaySpec:
    panels: tuple[BaitPanel, ...]
    opaque_background: bool = True
    schedule: ToastSchedule = field(default_factory=ToastSchedule)

    def __post_init__(self) -> None:
        object.__setattr__(self, "panels", tuple(self.panels))
        steps = sorted(p.step_index for p in self.panels)
        if steps != list(range(len(self.panels))):
            raise ScenarioError(f"overlay: panel steps must be contiguous from 0, got {steps}")

    def panel_for(self, step: int) -> BaitPanel:
        return next(p for p in self.panels if p.step_index == step)


@dataclass(frozen=True)
class WindowStack:
    device: DeviceProfile
    current_screen: Screen
    overlay: OverlaySpec
    policy: TouchPolicy

    def __post_init__(self) -> None:
        if not self.current_screen.fits(self.device):
            raise ScenarioError(f"screen {self.current_screen.name!r} does not fit device {self.device.name!r}")


def overlay_visible(s: ToastSchedule, t_ms: int) -> bool:
    if t_ms < s.start_ms:
        return False
    return (t_ms - s.start_ms) % s.period_ms < s.duration_ms


def _covers(stack: WindowStack, p: PxPoint) -> bool:
    if stack.overlay.opaque_background:
        return True
    return any(rect_to_px(b.visual_rect, stack.device).contains(p) for b in stack.overlay.panels)


def is_point_obscured(stack: WindowStack, p: PxPoint, t_ms: int) -> bool:
    return overlay_visible(stack.overlay.schedule, t_ms) and _covers(stack, p)


def last_unobscured_at(stack: WindowStack, p: PxPoint, t_ms: int) -> int | None:
    """Latest instant ``<= t_ms`` at which ``p`` was not covered by the overlay.

    Returns ``None`` when the point has been covered at every instant since
    time zero.
    """
    s = stack.overlay.schedule
    if not _covers(stack, p) or t_ms < s.start_ms:
        return t_ms
    cycle, phase = divmod(t_ms - s.start_ms, s.period_ms)
    if phase >= s.duration_ms:
        return t_ms
    if cycle > 0 and s.gap_ms > 0:
        # last ms of the previous cycle's gap
        return s.start_ms + cycle * s.period_ms - 1
    return s.start_ms - 1 if s.start_ms > 0 else None
