"""Batch trial kernels.

A script is flattened into plain arrays once (:func:`pack_script`); each
kernel then plays many independent trials from a pre-drawn noise block of
shape ``(n, steps, taps_per_step, 2)``. Two kernels compute identical
results: a numba loop and a vectorised numpy fallback. Which one runs by
default is decided in :mod:`tapsim._accel`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import _accel
from .dispatch import Default, FilterWhenObscured, RecentFocusFilter
from .geometry import rect_to_px
from .windowing import Action

if TYPE_CHECKING:
    from .scenario import AttackScript

SUCCESS, DIVERTED, EXHAUSTED, ALL_FILTERED = 0, 1, 2, 3

_ACTION_CODE = {Action.ADVANCE: 0, Action.DIVERT: 1, Action.INERT: 2}
_POLICY_CODE = {Default: 0, FilterWhenObscured: 1, RecentFocusFilter: 2}


@dataclass(frozen=True)
class PackedScript:
    width_px: int
    height_px: int
    density: float
    sigma: float
    aim: np.ndarray  # (steps, 2) dp
    n_targets: np.ndarray  # (steps,)
    target_box: np.ndarray  # (steps, max_targets, 4) px x0,y0,x1,y1
    target_action: np.ndarray  # (steps, max_targets), -1 = padding
    panel_box: np.ndarray  # (steps, 4) px
    opaque: bool
    start_ms: int
    duration_ms: int
    gap_ms: int
    policy: int
    window_ms: int
    start_delay_ms: int
    inter_tap_ms: int
    taps_per_step: int

    @property
    def steps(self) -> int:
        return self.aim.shape[0]


def pack_script(script: AttackScript) -> PackedScript:
    dev = script.device
    steps = len(script.screens)
    max_t = max(len(s.targets) for s in script.screens)
    box = np.zeros((steps, max_t, 4), dtype=np.int64)
    action = np.full((steps, max_t), -1, dtype=np.int64)
    n_targets = np.zeros(steps, dtype=np.int64)
    aim = np.zeros((steps, 2), dtype=np.float64)
    panel_box = np.zeros((steps, 4), dtype=np.int64)
    for i, screen in enumerate(script.screens):
        n_targets[i] = len(screen.targets)
        for j, t in enumerate(screen.targets):
            r = rect_to_px(t.rect, dev)
            box[i, j] = (r.x0, r.y0, r.x1, r.y1)
            action[i, j] = _ACTION_CODE[t.action]
        panel = script.overlay.panel_for(i)
        aim[i] = (panel.aim_point.x, panel.aim_point.y)
        r = rect_to_px(panel.visual_rect, dev)
        panel_box[i] = (r.x0, r.y0, r.x1, r.y1)
    sched = script.overlay.schedule
    policy = script.policy
    return PackedScript(
        width_px=dev.width_px,
        height_px=dev.height_px,
        density=float(dev.density),
        sigma=float(script.user.sigma_dp),
        aim=aim,
        n_targets=n_targets,
        target_box=box,
        target_action=action,
        panel_box=panel_box,
        opaque=bool(script.overlay.opaque_background),
        start_ms=sched.start_ms,
        duration_ms=sched.duration_ms,
        gap_ms=sched.gap_ms,
        policy=_POLICY_CODE[type(policy)],
        window_ms=getattr(policy, "window_ms", 0),
        start_delay_ms=script.user.start_delay_ms,
        inter_tap_ms=script.user.inter_tap_ms,
        taps_per_step=script.user.taps_per_step,
    )


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent stream for one trial, keyed on ``(seed, trial_index)``."""
    return np.random.default_rng([seed, trial_index])


def draw_noise(seed: int, trial_indices, steps: int, taps: int) -> np.ndarray:
    trial_indices = np.asarray(trial_indices, dtype=np.int64)
    out = np.empty((trial_indices.size, steps, taps, 2))
    for row, i in enumerate(trial_indices):
        out[row] = trial_rng(seed, int(i)).standard_normal((steps, taps, 2))
    return out


# -- scalar helpers ---------------------------------------------------------


def _round_half_away(v):
    return int(math.copysign(math.floor(abs(v) + 0.5), v))


def _overlay_visible(t, start, dur, gap):
    if t < start:
        return False
    return (t - start) % (dur + gap) < dur


def _last_uncovered(t, start, dur, gap):
    # for a covered point; -1 means "never since time zero"
    if t < start:
        return t
    cycle = (t - start) // (dur + gap)
    phase = (t - start) % (dur + gap)
    if phase >= dur:
        return t
    if cycle > 0 and gap > 0:
        return start + cycle * (dur + gap) - 1
    return start - 1 if start > 0 else -1


# -- numba path -------------------------------------------------------------

_round_half_away_nb = _accel.njit(cache=True)(_round_half_away)
_overlay_visible_nb = _accel.njit(cache=True)(_overlay_visible)
_last_uncovered_nb = _accel.njit(cache=True)(_last_uncovered)


@_accel.njit(cache=True)
def _play_numba(
    noise, aim, sigma, density, width, height, n_targets, target_box, target_action,
    panel_box, opaque, start, dur, gap, policy, window, start_delay, inter_tap, taps,
):
    n = noise.shape[0]
    steps = aim.shape[0]
    status = np.empty(n, dtype=np.int64)
    completed = np.zeros(n, dtype=np.int64)
    diverted_to = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        step = 0
        attempt = 0
        filtered = 0
        k = 0
        while True:
            px = _round_half_away_nb((aim[step, 0] + sigma * noise[i, step, attempt, 0]) * density)
            py = _round_half_away_nb((aim[step, 1] + sigma * noise[i, step, attempt, 1]) * density)
            t = start_delay + k * inter_tap
            k += 1
            result = 0  # 0 miss, 1 filtered, 2 advance, 3 divert
            hit = -1
            if 0 <= px < width and 0 <= py < height:
                covered = opaque
                if not covered:
                    for j in range(panel_box.shape[0]):
                        if panel_box[j, 0] <= px < panel_box[j, 2] and panel_box[j, 1] <= py < panel_box[j, 3]:
                            covered = True
                            break
                drop = False
                if policy == 1:
                    drop = covered and _overlay_visible_nb(t, start, dur, gap)
                elif policy == 2 and covered:
                    last = _last_uncovered_nb(t, start, dur, gap)
                    drop = last < 0 or last < t - window
                if drop:
                    result = 1
                else:
                    for j in range(n_targets[step]):
                        b = target_box[step, j]
                        if b[0] <= px < b[2] and b[1] <= py < b[3]:
                            hit = j
                            break
                    if hit >= 0:
                        code = target_action[step, hit]
                        if code == 0:
                            result = 2
                        elif code == 1:
                            result = 3
            if result == 2:
                step += 1
                attempt = 0
                filtered = 0
                if step == steps:
                    status[i] = SUCCESS
                    break
                continue
            if result == 3:
                status[i] = DIVERTED
                diverted_to[i] = hit
                break
            attempt += 1
            if result == 1:
                filtered += 1
            if attempt == taps:
                status[i] = ALL_FILTERED if filtered == taps else EXHAUSTED
                break
        completed[i] = step
    return status, completed, diverted_to


# -- numpy path -------------------------------------------------------------


def _play_numpy(
    noise, aim, sigma, density, width, height, n_targets, target_box, target_action,
    panel_box, opaque, start, dur, gap, policy, window, start_delay, inter_tap, taps,
):
    n = noise.shape[0]
    steps = aim.shape[0]
    status = np.full(n, -1, dtype=np.int64)
    step = np.zeros(n, dtype=np.int64)
    attempt = np.zeros(n, dtype=np.int64)
    filtered = np.zeros(n, dtype=np.int64)
    diverted_to = np.full(n, -1, dtype=np.int64)
    # every live trial taps once per round, so the round number is the global tap index
    for k in range(steps * taps):
        live = np.flatnonzero(status == -1)
        if live.size == 0:
            break
        s, a = step[live], attempt[live]
        z = noise[live, s, a]
        fx = (aim[s, 0] + sigma * z[:, 0]) * density
        fy = (aim[s, 1] + sigma * z[:, 1]) * density
        px = np.copysign(np.floor(np.abs(fx) + 0.5), fx).astype(np.int64)
        py = np.copysign(np.floor(np.abs(fy) + 0.5), fy).astype(np.int64)
        t = start_delay + k * inter_tap
        inb = (px >= 0) & (px < width) & (py >= 0) & (py < height)

        if opaque:
            covered = np.ones(live.size, dtype=bool)
        else:
            pb = panel_box
            covered = (
                (pb[None, :, 0] <= px[:, None]) & (px[:, None] < pb[None, :, 2])
                & (pb[None, :, 1] <= py[:, None]) & (py[:, None] < pb[None, :, 3])
            ).any(axis=1)
        if policy == 1:
            drop = covered & _overlay_visible(t, start, dur, gap)
        elif policy == 2:
            last = _last_uncovered(t, start, dur, gap)
            drop = covered & (last < 0 or last < t - window)
        else:
            drop = np.zeros(live.size, dtype=bool)
        drop &= inb

        boxes = target_box[s]  # (m, max_t, 4)
        slot = np.arange(boxes.shape[1])[None, :] < n_targets[s][:, None]
        inside = (
            slot
            & (boxes[:, :, 0] <= px[:, None]) & (px[:, None] < boxes[:, :, 2])
            & (boxes[:, :, 1] <= py[:, None]) & (py[:, None] < boxes[:, :, 3])
        )
        any_hit = inside.any(axis=1) & inb & ~drop
        hit = np.where(any_hit, inside.argmax(axis=1), -1)
        code = np.where(any_hit, target_action[s, np.maximum(hit, 0)], -1)

        adv = code == 0
        div = code == 1
        miss = ~adv & ~div

        step[live[adv]] += 1
        attempt[live[adv]] = 0
        filtered[live[adv]] = 0
        status[live[adv & (step[live] == steps)]] = SUCCESS

        status[live[div]] = DIVERTED
        diverted_to[live[div]] = hit[div]

        m = live[miss]
        attempt[m] += 1
        filtered[live[miss & drop]] += 1
        out = m[attempt[m] == taps]
        status[out] = np.where(filtered[out] == taps, ALL_FILTERED, EXHAUSTED)
    return status, step, diverted_to


def play_trials(packed: PackedScript, noise: np.ndarray, backend: str | None = None):
    """Play one trial per noise row.

    Returns ``(status, steps_completed, diverted_to)`` arrays; ``diverted_to``
    is the target index on the failing screen, or -1.
    """
    backend = backend or _accel.default_backend()
    if backend == "numba" and not _accel.HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    kernel = {"numba": _play_numba, "numpy": _play_numpy}[backend]
    p = packed
    return kernel(
        np.ascontiguousarray(noise, dtype=np.float64), p.aim, p.sigma, p.density, p.width_px, p.height_px,
        p.n_targets, p.target_box, p.target_action, p.panel_box, p.opaque,
        p.start_ms, p.duration_ms, p.gap_ms, p.policy, p.window_ms,
        p.start_delay_ms, p.inter_tap_ms, p.taps_per_step,
    )

