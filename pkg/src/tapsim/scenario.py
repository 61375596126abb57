"""Payloads, the attack script, the simulated user, and the trial runner."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Union

import numpy as np

from . import kernels
from .dispatch import DispatchOutcome, Delivered, FilteredObscured, TouchEvent, TouchPolicy, dispatch
from .errors import ScenarioError
from .geometry import DeviceProfile, DpPoint, dp_to_px
from .windowing import Action, OverlaySpec, Screen, WindowStack

# -- payloads ---------------------------------------------------------------

ENABLER_PERMISSIONS = frozenset({"RECEIVE_BOOT_COMPLETED", "INTERNET", "ACCESS_NETWORK_STATE"})
PRIVACY_PERMISSIONS = frozenset(
    {
        "ACCESS_FINE_LOCATION",
        "CAMERA",
        "RECORD_AUDIO",
        "READ_CALENDAR",
        "READ_CALL_LOG",
        "READ_CONTACTS",
        "READ_SMS",
        "READ_EXTERNAL_STORAGE",
    }
)
KNOWN_PERMISSIONS = ENABLER_PERMISSIONS | PRIVACY_PERMISSIONS

URL_SCHEMES = ("market", "http", "https", "tel")


class Level(Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


@dataclass(frozen=True)
class Installer:
    """Drive the store's install flow for a second, permission-hungry app."""

    package: str
    permissions: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "permissions", tuple(self.permissions))
        unknown = [p for p in self.permissions if p not in KNOWN_PERMISSIONS]
        if unknown:
            raise ScenarioError(f"unknown permission name(s): {', '.join(unknown)}")


@dataclass(frozen=True)
class UrlOpen:
    scheme: str
    value: str

    def __post_init__(self) -> None:
        if self.scheme not in URL_SCHEMES:
            raise ScenarioError(f"url scheme must be one of {URL_SCHEMES}, got {self.scheme!r}")


@dataclass(frozen=True)
class SystemSettings:
    pass


@dataclass(frozen=True)
class ThirdPartyPackage:
    package: str


@dataclass(frozen=True)
class LaunchIntent:
    kind: Union[SystemSettings, ThirdPartyPackage]


Payload = Union[Installer, UrlOpen, LaunchIntent]


@dataclass(frozen=True)
class RiskSummary:
    privacy_permissions: tuple[str, ...]
    impact: Level


def payload_risk(p: Payload) -> RiskSummary:
    if isinstance(p, Installer):
        bad = [x for x in p.permissions if x not in KNOWN_PERMISSIONS]
        if bad:
            raise ScenarioError(f"unknown permission name(s): {', '.join(bad)}")
        privacy = tuple(x for x in p.permissions if x in PRIVACY_PERMISSIONS)
        return RiskSummary(privacy, Level.HIGH if privacy else Level.MEDIUM)
    if isinstance(p, UrlOpen):
        impact = {"market": Level.HIGH, "http": Level.MEDIUM, "https": Level.MEDIUM, "tel": Level.LOW}[p.scheme]
        return RiskSummary((), impact)
    if isinstance(p, LaunchIntent):
        return RiskSummary((), Level.MEDIUM)
    raise ScenarioError(f"not a payload: {p!r}")


@dataclass(frozen=True)
class Concealment:
    hide_launcher_icon: bool = False
    generic_name: Optional[str] = None


# -- user model and script --------------------------------------------------


@dataclass(frozen=True)
class UserModel:
    sigma_dp: float = 0.0
    taps_per_step: int = 3
    inter_tap_ms: int = 1000
    start_delay_ms: int = 1000

    def __post_init__(self) -> None:
        if self.sigma_dp < 0 or not math.isfinite(self.sigma_dp):
            raise ScenarioError("user: sigma_dp must be a finite value >= 0")
        if self.taps_per_step < 1:
            raise ScenarioError("user: taps_per_step must be >= 1")
        if self.inter_tap_ms <= 0:
            raise ScenarioError("user: inter_tap_ms must be > 0")
        if self.start_delay_ms < 0:
            raise ScenarioError("user: start_delay_ms must be >= 0")


@dataclass(frozen=True)
class AttackScript:
    device: DeviceProfile
    screens: tuple[Screen, ...]
    overlay: OverlaySpec
    payload: Payload
    policy: TouchPolicy
    user: UserModel = field(default_factory=UserModel)
    concealment: Concealment = field(default_factory=Concealment)

    def __post_init__(self) -> None:
        object.__setattr__(self, "screens", tuple(self.screens))
        if not self.screens:
            raise ScenarioError("script needs at least one screen")
        if len(self.overlay.panels) != len(self.screens):
            raise ScenarioError(
                f"overlay has {len(self.overlay.panels)} bait panels for {len(self.screens)} screens"
            )

    @property
    def n_steps(self) -> int:
        return len(self.screens)

    def stack(self, step: int) -> WindowStack:
        return WindowStack(self.device, self.screens[step], self.overlay, self.policy)

    def with_policy(self, policy: TouchPolicy) -> AttackScript:
        return replace(self, policy=policy)


# -- state machine ----------------------------------------------------------


@dataclass(frozen=True)
class Diverted:
    target: str


@dataclass(frozen=True)
class ExhaustedTaps:
    pass


@dataclass(frozen=True)
class AllTapsFiltered:
    pass


FailureReason = Union[Diverted, ExhaustedTaps, AllTapsFiltered]


@dataclass(frozen=True)
class ScriptState:
    screens: tuple[Screen, ...]
    taps_per_step: int
    step: int = 0
    attempts: int = 0
    filtered: int = 0
    done: bool = False
    failure: Optional[FailureReason] = None

    @classmethod
    def start(cls, script: AttackScript) -> ScriptState:
        return cls(script.screens, script.user.taps_per_step)

    @property
    def succeeded(self) -> bool:
        return self.done and self.failure is None


def advance(state: ScriptState, outcome: Optional[DispatchOutcome]) -> ScriptState:
    """Feed one tap's outcome to the script.

    ``outcome`` is ``None`` for a tap that landed off-screen and never reached
    the window stack; it counts as a missed attempt.
    """
    if state.done:
        raise ScenarioError("attack already finished")
    if isinstance(outcome, Delivered) and outcome.target_name is not None:
        target = next(t for t in state.screens[state.step].targets if t.name == outcome.target_name)
        if target.action is Action.ADVANCE:
            nxt = state.step + 1
            if nxt == len(state.screens):
                return replace(state, step=nxt, attempts=0, filtered=0, done=True)
            return replace(state, step=nxt, attempts=0, filtered=0)
        if target.action is Action.DIVERT:
            return replace(state, done=True, failure=Diverted(target.name))
    attempts = state.attempts + 1
    filtered = state.filtered + isinstance(outcome, FilteredObscured)
    if attempts < state.taps_per_step:
        return replace(state, attempts=attempts, filtered=filtered)
    reason = AllTapsFiltered() if filtered == attempts else ExhaustedTaps()
    return replace(state, attempts=attempts, filtered=filtered, done=True, failure=reason)


@dataclass(frozen=True)
class SimOutcome:
    success: bool
    failure: Optional[FailureReason]
    steps_completed: int
    tap_log: tuple[tuple[TouchEvent, Optional[DispatchOutcome]], ...]

    @property
    def status(self) -> str:
        if self.success:
            return "Success"
        return f"Failed({type(self.failure).__name__})"


def _require_valid(script: AttackScript) -> None:
    from .analysis import Severity, validate_layout

    errors = [v for v in validate_layout(script) if v.severity is Severity.ERROR]
    if errors:
        raise ScenarioError("; ".join(f"{v.kind.value}: {v.detail}" for v in errors))


def simulate(script: AttackScript, seed: int, trial_index: int = 0) -> SimOutcome:
    """Play one attack end to end.

    The user aims at the active step's bait with isotropic Gaussian noise in
    dp, tapping at ``start_delay + k * inter_tap`` for global tap index k.
    ``(seed, trial_index)`` selects the noise stream; trial i of
    :func:`run_trials` is exactly ``simulate(script, seed, i)``.
    """
    _require_valid(script)
    _check_seed(seed)
    user = script.user
    noise = kernels.draw_noise(seed, [trial_index], script.n_steps, user.taps_per_step)[0]
    state = ScriptState.start(script)
    log = []
    k = 0
    while not state.done:
        aim = script.overlay.panel_for(state.step).aim_point
        z = noise[state.step, state.attempts]
        tap = DpPoint(aim.x + user.sigma_dp * float(z[0]), aim.y + user.sigma_dp * float(z[1]))
        event = TouchEvent(dp_to_px(tap, script.device), user.start_delay_ms + k * user.inter_tap_ms)
        k += 1
        outcome = None
        if script.device.in_bounds(event.point_px):
            outcome = dispatch(script.stack(state.step), event)
        log.append((event, outcome))
        state = advance(state, outcome)
    completed = state.step
    return SimOutcome(state.succeeded, state.failure, completed, tuple(log))


# -- Monte Carlo ------------------------------------------------------------

_Z95 = statistics.NormalDist().inv_cdf(0.975)


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple[float, float]:
    if n <= 0:
        raise ValueError("n must be >= 1")
    p = successes / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == n else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class SuccessEstimate:
    n: int
    seed: int
    successes: int
    p_hat: float
    ci95: tuple[float, float]
    reached: tuple[int, ...]  # trials that completed at least i+1 steps

    def per_step_rates(self) -> list[float]:
        """Empirical conditional success per step; their product is ``p_hat``."""
        rates = []
        before = self.n
        for r in self.reached:
            rates.append(r / before if before else 0.0)
            before = r
        return rates


def _check_seed(seed: int) -> None:
    if seed < 0:
        raise ScenarioError(f"seed must be >= 0, got {seed}")


def run_trials(
    script: AttackScript,
    n: int,
    seed: int,
    *,
    backend: Optional[str] = None,
    chunk: int = 1 << 15,
) -> SuccessEstimate:
    if n < 1:
        raise ScenarioError("n must be >= 1")
    _require_valid(script)
    _check_seed(seed)
    packed = kernels.pack_script(script)
    completed = np.empty(n, dtype=np.int64)
    status = np.empty(n, dtype=np.int64)
    for lo in range(0, n, chunk):
        idx = np.arange(lo, min(n, lo + chunk))
        noise = kernels.draw_noise(seed, idx, packed.steps, packed.taps_per_step)
        status[idx], completed[idx], _ = kernels.play_trials(packed, noise, backend)
    successes = int(np.count_nonzero(status == kernels.SUCCESS))
    reached = tuple(int(np.count_nonzero(completed > i)) for i in range(packed.steps))
    return SuccessEstimate(n, seed, successes, successes / n, wilson_interval(successes, n), reached)
