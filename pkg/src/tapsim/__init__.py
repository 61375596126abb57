"""Deterministic tapjacking simulator: overlay layout, touch dispatch, mitigations, feasibility."""

from .analysis import (
    FeasibilityReport,
    Ratings,
    Violation,
    analytic_success,
    feasibility_report,
    hit_probability,
    rate_attack,
    validate_layout,
)
from .dispatch import Default, Delivered, FilteredObscured, FilterWhenObscured, RecentFocusFilter, TouchEvent, dispatch
from .errors import ScenarioError
from .geometry import DeviceProfile, DpPoint, DpRect, PxPoint, contains, dp_to_px, intersects, px_to_dp
from .scenario import AttackScript, UserModel, advance, payload_risk, run_trials, simulate
from .windowing import Action, BaitPanel, OverlaySpec, Screen, TapTarget, ToastSchedule, WindowStack

__version__ = "0.1.0"
