"""Device profiles, dp/px conversion and rectangle predicates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import ScenarioError


def round_half_away(v: float) -> int:
    """Round to the nearest integer, ties away from zero."""
    return int(math.copysign(math.floor(abs(v) + 0.5), v))


@dataclass(frozen=True)
class DeviceProfile:
    name: str
    width_px: int
    height_px: int
    density: float  # px per dp

    def __post_init__(self) -> None:
        if self.width_px <= 0 or self.height_px <= 0:
            raise ScenarioError(f"device {self.name!r}: width_px and height_px must be > 0")
        if not self.density > 0:
            raise ScenarioError(f"device {self.name!r}: density must be > 0")

    @property
    def width_dp(self) -> float:
        return self.width_px / self.density

    @property
    def height_dp(self) -> float:
        return self.height_px / self.density

    @property
    def aspect_ratio(self) -> float:
        return self.height_px / self.width_px

    def bounds_dp(self) -> DpRect:
        return DpRect(0.0, 0.0, self.width_dp, self.height_dp)

    def in_bounds(self, p: PxPoint) -> bool:
        return 0 <= p.x < self.width_px and 0 <= p.y < self.height_px


@dataclass(frozen=True)
class DpPoint:
    x: float
    y: float


@dataclass(frozen=True)
class DpRect:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self) -> None:
        if self.w < 0 or self.h < 0:
            raise ScenarioError(f"rect {self.as_list()}: width and height must be >= 0")

    @property
    def x1(self) -> float:
        return self.x + self.w

    @property
    def y1(self) -> float:
        return self.y + self.h

    @property
    def empty(self) -> bool:
        return self.w == 0 or self.h == 0

    @property
    def center(self) -> DpPoint:
        return DpPoint(self.x + self.w / 2, self.y + self.h / 2)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.w, self.h]


@dataclass(frozen=True)
class PxPoint:
    x: int
    y: int


@dataclass(frozen=True)
class PxRect:
    """Half-open integer pixel box ``[x0, x1) x [y0, y1)``."""

    x0: int
    y0: int
    x1: int
    y1: int

    def contains(self, p: PxPoint) -> bool:
        return self.x0 <= p.x < self.x1 and self.y0 <= p.y < self.y1


def dp_to_px(p: DpPoint, d: DeviceProfile) -> PxPoint:
    return PxPoint(round_half_away(p.x * d.density), round_half_away(p.y * d.density))


def px_to_dp(p: PxPoint, d: DeviceProfile) -> DpPoint:
    return DpPoint(p.x / d.density, p.y / d.density)


@lru_cache(maxsize=4096)
def rect_to_px(r: DpRect, d: DeviceProfile) -> PxRect:
    """Snap both corners of ``r`` to the pixel grid with the dp_to_px rounding rule."""
    return PxRect(
        round_half_away(r.x * d.density),
        round_half_away(r.y * d.density),
        round_half_away(r.x1 * d.density),
        round_half_away(r.y1 * d.density),
    )


def contains(r: DpRect, p: DpPoint) -> bool:
    return r.x <= p.x < r.x1 and r.y <= p.y < r.y1


def intersects(a: DpRect, b: DpRect) -> bool:
    """True when the open interiors overlap; rects sharing only an edge do not intersect."""
    if a.empty or b.empty:
        return False
    return a.x < b.x1 and b.x < a.x1 and a.y < b.y1 and b.y < a.y1


def within(inner: DpRect, outer: DpRect) -> bool:
    return (
        inner.x >= outer.x
        and inner.y >= outer.y
        and inner.x1 <= outer.x1
        and inner.y1 <= outer.y1
    )
