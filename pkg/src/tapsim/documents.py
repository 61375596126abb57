"""Scenario and report documents (JSON).

The key names are the file contract. Unknown keys are rejected, and the
domain constructors re-check every invariant on load.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import jsonschema

from .dispatch import Default, FilterWhenObscured, RecentFocusFilter
from .errors import ScenarioError
from .geometry import DeviceProfile, DpPoint, DpRect
from .scenario import (
    AttackScript,
    Concealment,
    Installer,
    LaunchIntent,
    SystemSettings,
    ThirdPartyPackage,
    UrlOpen,
    UserModel,
)
from .windowing import Action, BaitPanel, OverlaySpec, Screen, TapTarget, ToastSchedule

FIXTURE_DIR = Path(__file__).parent / "fixtures"

_num = {"type": "number"}
_int = {"type": "integer"}
_rect = {"type": "array", "items": _num, "minItems": 4, "maxItems": 4}
_point = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}


def _obj(props: dict, required=None) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(props) if required is None else required,
        "additionalProperties": False,
    }


SCENARIO_SCHEMA = _obj(
    {
        "device": _obj({"name": {"type": "string"}, "width_px": _int, "height_px": _int, "density": _num}),
        "screens": {
            "type": "array",
            "minItems": 1,
            "items": _obj(
                {
                    "name": {"type": "string"},
                    "targets": {
                        "type": "array",
                        "items": _obj(
                            {
                                "name": {"type": "string"},
                                "rect": _rect,
                                "action": {"enum": [a.value for a in Action]},
                            }
                        ),
                    },
                }
            ),
        },
        "overlay": _obj(
            {
                "opaque_background": {"type": "boolean"},
                "schedule": _obj({"start_ms": _int, "duration_ms": _int, "gap_ms": _int}),
                "panels": {
                    "type": "array",
                    "items": _obj({"step": _int, "visual_rect": _rect, "aim_point": _point}),
                },
            }
        ),
        "payload": {
            "oneOf": [
                _obj(
                    {
                        "type": {"const": "Installer"},
                        "package": {"type": "string"},
                        "permissions": {"type": "array", "items": {"type": "string"}},
                    }
                ),
                _obj(
                    {
                        "type": {"const": "UrlOpen"},
                        "scheme": {"type": "string"},
                        "value": {"type": "string"},
                    }
                ),
                _obj(
                    {
                        "type": {"const": "LaunchIntent"},
                        "kind": {"enum": ["SystemSettings", "ThirdPartyPackage"]},
                        "package": {"type": "string"},
                    },
                    required=["type", "kind"],
                ),
            ]
        },
        "policy": _obj(
            {
                "type": {"enum": ["Default", "FilterWhenObscured", "RecentFocusFilter"]},
                "window_ms": _int,
            },
            required=["type"],
        ),
        "user": _obj(
            {"sigma_dp": _num, "taps_per_step": _int, "inter_tap_ms": _int, "start_delay_ms": _int}
        ),
        "concealment": _obj(
            {"hide_launcher_icon": {"type": "boolean"}, "generic_name": {"type": ["string", "null"]}}
        ),
    }
)


def _schema_error(err: jsonschema.ValidationError) -> ScenarioError:
    # oneOf failures are vague; point at the deepest branch error
    best = jsonschema.exceptions.best_match([err])
    where = "/".join(str(p) for p in best.absolute_path) or "<root>"
    return ScenarioError(f"{where}: {best.message}")


def script_from_dict(doc: dict[str, Any]) -> AttackScript:
    try:
        jsonschema.validate(doc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as err:
        raise _schema_error(err) from None

    d = doc["device"]
    device = DeviceProfile(d["name"], int(d["width_px"]), int(d["height_px"]), float(d["density"]))
    screens = tuple(
        Screen(
            s["name"],
            tuple(TapTarget(t["name"], DpRect(*t["rect"]), Action(t["action"])) for t in s["targets"]),
        )
        for s in doc["screens"]
    )
    o = doc["overlay"]
    overlay = OverlaySpec(
        panels=tuple(
            BaitPanel(int(p["step"]), DpRect(*p["visual_rect"]), DpPoint(*p["aim_point"])) for p in o["panels"]
        ),
        opaque_background=o["opaque_background"],
        schedule=ToastSchedule(**{k: int(v) for k, v in o["schedule"].items()}),
    )
    p = doc["payload"]
    if p["type"] == "Installer":
        payload = Installer(p["package"], tuple(p["permissions"]))
    elif p["type"] == "UrlOpen":
        payload = UrlOpen(p["scheme"], p["value"])
    elif p["kind"] == "ThirdPartyPackage":
        if "package" not in p:
            raise ScenarioError("payload/package: required for a ThirdPartyPackage intent")
        payload = LaunchIntent(ThirdPartyPackage(p["package"]))
    else:
        if "package" in p:
            raise ScenarioError("payload/package: not allowed for a SystemSettings intent")
        payload = LaunchIntent(SystemSettings())
    pol = doc["policy"]
    if pol["type"] == "RecentFocusFilter":
        if "window_ms" not in pol:
            raise ScenarioError("policy/window_ms: required for RecentFocusFilter")
        policy = RecentFocusFilter(int(pol["window_ms"]))
    elif "window_ms" in pol:
        raise ScenarioError(f"policy/window_ms: not allowed for {pol['type']}")
    else:
        policy = Default() if pol["type"] == "Default" else FilterWhenObscured()
    u = doc["user"]
    user = UserModel(float(u["sigma_dp"]), int(u["taps_per_step"]), int(u["inter_tap_ms"]), int(u["start_delay_ms"]))
    c = doc["concealment"]
    return AttackScript(device, screens, overlay, payload, policy, user, Concealment(c["hide_launcher_icon"], c["generic_name"]))


def script_to_dict(script: AttackScript) -> dict[str, Any]:
    dev = script.device
    p = script.payload
    if isinstance(p, Installer):
        payload = {"type": "Installer", "package": p.package, "permissions": list(p.permissions)}
    elif isinstance(p, UrlOpen):
        payload = {"type": "UrlOpen", "scheme": p.scheme, "value": p.value}
    elif isinstance(p.kind, ThirdPartyPackage):
        payload = {"type": "LaunchIntent", "kind": "ThirdPartyPackage", "package": p.kind.package}
    else:
        payload = {"type": "LaunchIntent", "kind": "SystemSettings"}
    policy = {"type": type(script.policy).__name__}
    if isinstance(script.policy, RecentFocusFilter):
        policy["window_ms"] = script.policy.window_ms
    sched = script.overlay.schedule
    u = script.user
    return {
        "device": {"name": dev.name, "width_px": dev.width_px, "height_px": dev.height_px, "density": dev.density},
        "screens": [
            {
                "name": s.name,
                "targets": [{"name": t.name, "rect": t.rect.as_list(), "action": t.action.value} for t in s.targets],
            }
            for s in script.screens
        ],
        "overlay": {
            "opaque_background": script.overlay.opaque_background,
            "schedule": {"start_ms": sched.start_ms, "duration_ms": sched.duration_ms, "gap_ms": sched.gap_ms},
            "panels": [
                {"step": b.step_index, "visual_rect": b.visual_rect.as_list(), "aim_point": [b.aim_point.x, b.aim_point.y]}
                for b in script.overlay.panels
            ],
        },
        "payload": payload,
        "policy": policy,
        "user": {
            "sigma_dp": u.sigma_dp,
            "taps_per_step": u.taps_per_step,
            "inter_tap_ms": u.inter_tap_ms,
            "start_delay_ms": u.start_delay_ms,
        },
        "concealment": {
            "hide_launcher_icon": script.concealment.hide_launcher_icon,
            "generic_name": script.concealment.generic_name,
        },
    }


def resolve(path: str | Path) -> Path:
    """A file path, or the bare name of a bundled fixture."""
    p = Path(path)
    if not p.exists() and p.suffix == "" and (FIXTURE_DIR / f"{p.name}.json").exists():
        return FIXTURE_DIR / f"{p.name}.json"
    return p


def load_script(path: str | Path) -> AttackScript:
    p = resolve(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as err:
        raise ScenarioError(f"cannot read {p}: {err.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioError(f"{p}: malformed JSON at line {err.lineno}: {err.msg}") from None
    if not isinstance(doc, dict):
        raise ScenarioError(f"{p}: top level must be an object")
    return script_from_dict(doc)


def load_fixture(name: str) -> AttackScript:
    return load_script(FIXTURE_DIR / f"{name}.json")


def fixture_names() -> list[str]:
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.json"))


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"
