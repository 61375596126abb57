"""Layout validation, closed-form success probability, and feasibility ratings."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .dispatch import Default
from .errors import ScenarioError
from .geometry import DpPoint, DpRect, contains, intersects, within
from .scenario import AttackScript, Installer, LaunchIntent, Level, ThirdPartyPackage, UrlOpen, payload_risk, run_trials
from .windowing import Action

MIN_TARGET_DP = 48.0
MAX_STEPS = 3


class ViolationKind(Enum):
    OVERLAP = "OverlapViolation"
    EXCESSIVE_STEPS = "ExcessiveSteps"
    TINY_TARGET = "TinyTarget"
    AIM_MISMATCH = "AimMismatch"
    OUT_OF_BOUNDS = "OutOfBounds"


class Severity(Enum):
    ERROR = "Error"
    WARNING = "Warning"


_SEVERITY = {
    ViolationKind.OVERLAP: Severity.ERROR,
    ViolationKind.AIM_MISMATCH: Severity.ERROR,
    ViolationKind.OUT_OF_BOUNDS: Severity.ERROR,
    ViolationKind.EXCESSIVE_STEPS: Severity.WARNING,
    ViolationKind.TINY_TARGET: Severity.WARNING,
}


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str

    @property
    def severity(self) -> Severity:
        return _SEVERITY[self.kind]

    def __str__(self) -> str:
        return f"{self.severity.value}: {self.kind.value}: {self.detail}"


def validate_layout(script: AttackScript, min_target_dp: float = MIN_TARGET_DP) -> list[Violation]:
    """Check the bait layout against every screen of the flow.

    A bait may not cover a tappable (Advance or Divert) element of any other
    step's screen, since stray taps land around transitions in both
    directions. Output is sorted, so it does not depend on list order.
    """
    out: set[Violation] = set()
    screens = script.screens
    bounds = script.device.bounds_dp()

    if len(screens) > MAX_STEPS:
        out.add(Violation(ViolationKind.EXCESSIVE_STEPS, f"{len(screens)} screens; more than {MAX_STEPS} taps is impractical"))

    for i, panel in enumerate(script.overlay.panels):
        own = screens[panel.step_index]
        label = f"bait for step {own.name!r}"
        if not within(panel.visual_rect, bounds):
            out.add(Violation(ViolationKind.OUT_OF_BOUNDS, f"{label} {_fmt(panel.visual_rect)} exceeds the device"))
        if not contains(own.advance_target.rect, panel.aim_point):
            out.add(Violation(
                ViolationKind.AIM_MISMATCH,
                f"{label}: aim ({panel.aim_point.x:g}, {panel.aim_point.y:g}) misses {own.advance_target.name!r}",
            ))
        for j, other in enumerate(screens):
            if j == panel.step_index:
                continue
            for t in other.targets:
                if t.action is not Action.INERT and intersects(panel.visual_rect, t.rect):
                    out.add(Violation(ViolationKind.OVERLAP, f"{label} overlaps {t.name!r} on screen {other.name!r}"))

    for screen in screens:
        for t in screen.targets:
            if not within(t.rect, bounds):
                out.add(Violation(ViolationKind.OUT_OF_BOUNDS, f"{t.name!r} on screen {screen.name!r} {_fmt(t.rect)} exceeds the device"))
        adv = screen.advance_target
        if adv.rect.w < min_target_dp or adv.rect.h < min_target_dp:
            out.add(Violation(
                ViolationKind.TINY_TARGET,
                f"{adv.name!r} on screen {screen.name!r} is {adv.rect.w:g}x{adv.rect.h:g} dp (< {min_target_dp:g} dp)",
            ))
    return sorted(out, key=lambda v: (v.severity.value, v.kind.value, v.detail))


def _fmt(r: DpRect) -> str:
    return "[" + ", ".join(f"{v:g}" for v in r.as_list()) + "]"


def errors(violations: list[Violation]) -> list[Violation]:
    return [v for v in violations if v.severity is Severity.ERROR]


# -- closed form --------------------------------------------------------------


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def hit_probability(target: DpRect, aim: DpPoint, sigma_dp: float) -> float:
    """Probability that ``aim`` plus isotropic N(0, sigma^2) noise lands in ``target``."""
    if sigma_dp < 0:
        raise ValueError("sigma_dp must be >= 0")
    if target.empty:
        return 0.0
    if sigma_dp == 0:
        return 1.0 if contains(target, aim) else 0.0
    px = norm_cdf((target.x1 - aim.x) / sigma_dp) - norm_cdf((target.x - aim.x) / sigma_dp)
    py = norm_cdf((target.y1 - aim.y) / sigma_dp) - norm_cdf((target.y - aim.y) / sigma_dp)
    return px * py


class ClosedFormUnsupported(ScenarioError):
    """The closed form covers the Default policy only; use run_trials instead."""


def step_success(p_advance: float, p_divert: float, taps: int) -> float:
    """Chance that one of ``taps`` attempts advances before any diverts."""
    p_miss = max(0.0, 1.0 - p_advance - p_divert)
    if p_miss >= 1.0:
        return 0.0
    return p_advance * (1.0 - p_miss**taps) / (1.0 - p_miss)


def analytic_success(script: AttackScript) -> tuple[list[float], float]:
    if not isinstance(script.policy, Default):
        raise ClosedFormUnsupported(f"no closed form under policy {script.policy}")
    bad = errors(validate_layout(script))
    if bad:
        raise ScenarioError("; ".join(str(v) for v in bad))
    sigma = script.user.sigma_dp
    per_step = []
    for i, screen in enumerate(script.screens):
        aim = script.overlay.panel_for(i).aim_point
        p_a = hit_probability(screen.advance_target.rect, aim, sigma)
        p_d = sum(hit_probability(t.rect, aim, sigma) for t in screen.divert_targets)
        per_step.append(step_success(p_a, p_d, script.user.taps_per_step))
    return per_step, math.prod(per_step)


# -- ratings ----------------------------------------------------------------


class Exploitability(Enum):
    PROOF_OF_CONCEPT = ("ProofOfConcept", "Proof of Concept")
    WEAPONIZED = ("Weaponized", "Weaponized")


class Complexity(Enum):
    HIGH = ("High", "High")
    VERY_HIGH = ("VeryHigh", "Very High")


_LEVEL_LABEL = {Level.LOW: "Low", Level.MEDIUM: "Medium", Level.HIGH: "High"}


@dataclass(frozen=True)
class Ratings:
    exploitability: Exploitability
    impact: Level
    complexity: Complexity
    overall: Level

    def summary(self) -> str:
        return " / ".join(self.as_dict().values())

    def as_dict(self) -> dict[str, str]:
        return {
            "exploitability": self.exploitability.value[0],
            "impact": self.impact.value,
            "complexity": self.complexity.value[0],
            "overall": self.overall.value,
        }

    def render_list(self) -> str:
        return "\n".join(
            [
                f"Exploitability - {self.exploitability.value[1]}",
                f"Impact - {_LEVEL_LABEL[self.impact]}",
                f"Complexity - {self.complexity.value[1]}",
                f"Overall - {_LEVEL_LABEL[self.overall]}",
            ]
        )

    @classmethod
    def from_dict(cls, d: dict) -> Ratings:
        return cls(
            next(e for e in Exploitability if e.value[0] == d["exploitability"]),
            Level(d["impact"]),
            next(c for c in Complexity if c.value[0] == d["complexity"]),
            Level(d["overall"]),
        )


def rate_attack(script: AttackScript) -> Ratings:
    payload = script.payload
    hard_intent = isinstance(payload, LaunchIntent) and isinstance(payload.kind, ThirdPartyPackage)
    complexity = Complexity.VERY_HIGH if script.n_steps >= 2 or hard_intent else Complexity.HIGH
    return Ratings(
        exploitability=Exploitability.PROOF_OF_CONCEPT,
        impact=payload_risk(payload).impact,
        complexity=complexity,
        overall=Level.LOW,
    )


def stealth_notes(script: AttackScript) -> list[str]:
    notes = []
    c = script.concealment
    if c.hide_launcher_icon:
        notes.append(
            "launcher icon hidden: manifest category android.intent.category.LAUNCHER "
            "swapped for android.intent.category.DEFAULT"
        )
    if c.generic_name:
        notes.append(f"installed app poses as a system component under the name {c.generic_name!r}")
    p = script.payload
    if isinstance(p, Installer) or (isinstance(p, UrlOpen) and p.scheme == "market"):
        notes.append("overlay app itself requests no permissions")
    if isinstance(p, UrlOpen) and p.scheme in ("http", "https"):
        notes.append("overlay app needs INTERNET to load the page, which may draw attention")
    return notes


# -- report -----------------------------------------------------------------


@dataclass(frozen=True)
class TrialSummary:
    n: int
    seed: int
    p_hat: float
    ci95: tuple[float, float]


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple[Violation, ...]
    per_step_success: tuple[float, ...]
    overall_success: float
    ratings: Ratings
    stealth_notes: tuple[str, ...]
    success_method: str = "analytic"  # or "monte_carlo"
    trials: Optional[TrialSummary] = None

    def to_dict(self) -> dict:
        d = {
            "violations": [
                {"kind": v.kind.value, "detail": v.detail, "severity": v.severity.value} for v in self.violations
            ],
            "per_step_success": list(self.per_step_success),
            "overall_success": self.overall_success,
            "success_method": self.success_method,
            "ratings": self.ratings.as_dict(),
        }
        if self.trials is not None:
            t = self.trials
            d["trials"] = {"n": t.n, "seed": t.seed, "p_hat": t.p_hat, "ci95": list(t.ci95)}
        d["stealth_notes"] = list(self.stealth_notes)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> FeasibilityReport:
        trials = None
        if d.get("trials") is not None:
            t = d["trials"]
            trials = TrialSummary(t["n"], t["seed"], t["p_hat"], tuple(t["ci95"]))
        return cls(
            violations=tuple(Violation(ViolationKind(v["kind"]), v["detail"]) for v in d["violations"]),
            per_step_success=tuple(d["per_step_success"]),
            overall_success=d["overall_success"],
            ratings=Ratings.from_dict(d["ratings"]),
            stealth_notes=tuple(d["stealth_notes"]),
            success_method=d["success_method"],
            trials=trials,
        )


def feasibility_report(
    script: AttackScript,
    trials: Optional[int] = None,
    seed: int = 0,
    min_target_dp: float = MIN_TARGET_DP,
) -> FeasibilityReport:
    """Validator, success probabilities and ratings in one document.

    Layouts with Errors get violations and ratings only (zero success).
    Non-Default policies take their per-step figures from the trials.
    """
    violations = tuple(validate_layout(script, min_target_dp))
    ratings = rate_attack(script)
    notes = tuple(stealth_notes(script))
    if errors(list(violations)):
        zeros = tuple(0.0 for _ in script.screens)
        return FeasibilityReport(violations, zeros, 0.0, ratings, notes, "none")
    if trials is None and not isinstance(script.policy, Default):
        trials = 1000
    est = run_trials(script, trials, seed) if trials else None
    summary = TrialSummary(est.n, est.seed, est.p_hat, est.ci95) if est else None
    if isinstance(script.policy, Default):
        per_step, overall = analytic_success(script)
        return FeasibilityReport(violations, tuple(per_step), overall, ratings, notes, "analytic", summary)
    per_step = est.per_step_rates()
    return FeasibilityReport(violations, tuple(per_step), math.prod(per_step), ratings, notes, "monte_carlo", summary)
