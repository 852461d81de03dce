"""Per-user behavior profiles, Tolerable Error judgment and sensor gating.

A profile maps action labels to fitted :class:`AdditiveModel` objects. New
windows of the same action are judged against the model's forecast band
(the Tolerable Error); accepted windows can be folded back into the model,
and a small state machine decides when the sensors should be running.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .decomposer import (
    AdditiveModel,
    FitConfig,
    fit,
    min_fit_length,
    model_from_dict,
    model_to_dict,
    predict_at,
    resolve_period,
)
from .errors import (
    BehaviorAuthError,
    InsufficientCycles,
    OutOfRange,
    SeriesTooShort,
    UnknownAction,
    WindowPrecedesTraining,
    WindowTooShort,
)
from .series import TimeSeries, concat

ACCEPTS_TO_IDLE = 5
STALE_TO_IDLE = 3
STALE_VARIANCE_RATIO = 1e-6
HISTORY_CAP = 50_000
MIN_CYCLES = 2

PROFILE_FORMAT = "behavior-auth-profile"
PROFILE_VERSION = 1


class Decision(str, enum.Enum):
    ACCEPT = "Accept"
    ESCALATE = "Escalate"


class GateMode(str, enum.Enum):
    IDLE = "Idle"
    OBSERVING = "Observing"
    ESCALATED = "Escalated"


class GateEvent(str, enum.Enum):
    WINDOW_ACCEPTED = "WindowAccepted"
    WINDOW_ESCALATED = "WindowEscalated"
    WINDOW_STALE = "WindowStale"
    TIMEOUT = "Timeout"


@dataclass(frozen=True)
class TePolicy:
    """How much of a window may fall outside the forecast band."""

    interval_level: float = 0.80
    max_outside_fraction: float = 0.5
    min_window_samples: int = 20

    def __post_init__(self):
        if not 0 < self.interval_level < 1:
            raise OutOfRange("interval_level must be in (0, 1)")
        if not 0 <= self.max_outside_fraction <= 1:
            raise OutOfRange("max_outside_fraction must be in [0, 1]")
        if self.min_window_samples < 1:
            raise OutOfRange("min_window_samples must be >= 1")


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    outside_fraction: float
    samples_checked: int

    @property
    def accepted(self) -> bool:
        return self.decision is Decision.ACCEPT


@dataclass(frozen=True)
class GateState:
    mode: GateMode = GateMode.OBSERVING
    consecutive_accepts: int = 0
    consecutive_stale_windows: int = 0


@dataclass(frozen=True)
class AuthProfile:
    """One user's behavioral system: a model per observed action."""

    user_id: str
    action_models: Mapping[str, AdditiveModel] = field(default_factory=dict)
    te_policy: TePolicy = field(default_factory=TePolicy)
    gate: GateState = field(default_factory=GateState)

    def __post_init__(self):
        models = dict(self.action_models)
        if any(not label for label in models):
            raise OutOfRange("action labels must be non-empty")
        object.__setattr__(self, "action_models", MappingProxyType(models))

    def model(self, action: str) -> AdditiveModel:
        try:
            return self.action_models[action]
        except KeyError:
            raise UnknownAction(f"no model for action {action!r}") from None

    def with_model(self, action: str, model: AdditiveModel) -> "AuthProfile":
        models = dict(self.action_models)
        models[action] = model
        return replace(self, action_models=models)

    def with_gate(self, gate: GateState) -> "AuthProfile":
        return replace(self, gate=gate)


def axis_key(action: str, axis: str) -> str:
    """Profile key used for one accelerometer axis of an action."""
    return f"{action}/{axis}"


def register_action(profile: AuthProfile, action: str, training: TimeSeries,
                    config: FitConfig | None = None) -> AuthProfile:
    """Fit a model for ``action`` and store it, replacing any previous one.

    Raises ``InsufficientCycles`` when the training data covers fewer than
    two periods of the action.
    """
    if not action:
        raise OutOfRange("action label must be non-empty")
    config = config or FitConfig()
    need = min_fit_length(config)
    if len(training) < need:
        raise SeriesTooShort(f"training needs >= {need} samples, got {len(training)}")
    period = resolve_period(training, config)
    if period is not None:
        covered = training.duration()
        # Estimated periods are only accurate to about one lag per cycle.
        slack = MIN_CYCLES * training.median_spacing() if config.period == "auto" else 0.0
        if covered < MIN_CYCLES * period * (1 - 1e-9) - slack:
            raise InsufficientCycles(
                f"training covers {covered:.3f} s, fewer than {MIN_CYCLES} "
                f"cycles of {period:.3f} s")
        config = config.replace(period=period)
    return profile.with_model(action, fit(training, config))


def judge(profile: AuthProfile, action: str, window: TimeSeries) -> Verdict:
    """Compare a window against the action model's Tolerable Error band."""
    model = profile.model(action)
    te = profile.te_policy
    if len(window) < te.min_window_samples:
        raise WindowTooShort(
            f"window has {len(window)} samples, policy needs {te.min_window_samples}")
    if window.start <= model.train_span[1]:
        raise WindowPrecedesTraining(
            f"window starts at {window.start} but training ends at {model.train_span[1]}")
    fc = predict_at(model, window.timestamps, te.interval_level)
    v = window.values
    outside = int(np.count_nonzero((v < fc.lower) | (v > fc.upper)))
    frac = outside / len(window)
    decision = Decision.ACCEPT if frac <= te.max_outside_fraction else Decision.ESCALATE
    return Verdict(decision, frac, len(window))


def judge_axes(profile: AuthProfile, action: str,
               windows: Mapping[str, TimeSeries]) -> Verdict:
    """Judge each axis separately; escalate if any single axis escalates.

    The combined verdict reports the worst axis's outside fraction and the
    total number of samples checked.
    """
    verdicts = [judge(profile, axis_key(action, axis), w) for axis, w in windows.items()]
    if not verdicts:
        raise WindowTooShort("no axes to judge")
    escalate = any(not v.accepted for v in verdicts)
    return Verdict(Decision.ESCALATE if escalate else Decision.ACCEPT,
                   max(v.outside_fraction for v in verdicts),
                   sum(v.samples_checked for v in verdicts))


def is_stale(model: AdditiveModel, window: TimeSeries) -> bool:
    """True when the window barely moves compared with the model's noise."""
    if len(window) == 0:
        return True
    return float(np.var(window.values)) < STALE_VARIANCE_RATIO * model.residuals.sigma ** 2


def retrain(profile: AuthProfile, action: str, accepted_window: TimeSeries,
            config: FitConfig | None = None) -> AuthProfile:
    """Refit ``action`` on its previous training data plus an accepted window.

    History is kept in full up to the newest ``HISTORY_CAP`` samples.
    """
    model = profile.model(action)
    if len(accepted_window) and accepted_window.start <= model.train_span[1]:
        raise WindowPrecedesTraining(
            f"window starts at {accepted_window.start} but training ends at "
            f"{model.train_span[1]}")
    history = concat(model.training, accepted_window) if model.training is not None \
        else accepted_window
    if len(history) > HISTORY_CAP:
        history = history.slice(len(history) - HISTORY_CAP)
    return profile.with_model(action, fit(history, config or model.fit_config))


def gate_step(state: GateState, event: GateEvent) -> GateState:
    """Advance the sensor gate by one event.

    ======================  ================  ================================
    from                    event             to
    ======================  ================  ================================
    any                     WindowEscalated   Escalated, counters reset
    Observing               WindowAccepted    accepts + 1; Idle at 5
    Observing               WindowStale       stale + 1; Idle at 3
    Idle                    Timeout           Observing
    Escalated               WindowAccepted    Observing
    anything else                             unchanged
    ======================  ================  ================================

    An accepted window resets the stale counter and vice versa; entering a
    new mode resets both.
    """
    event = GateEvent(event)
    mode = state.mode
    if event is GateEvent.WINDOW_ESCALATED:
        return GateState(GateMode.ESCALATED)
    if mode is GateMode.OBSERVING:
        if event is GateEvent.WINDOW_ACCEPTED:
            n = state.consecutive_accepts + 1
            if n >= ACCEPTS_TO_IDLE:
                return GateState(GateMode.IDLE)
            return GateState(GateMode.OBSERVING, consecutive_accepts=n)
        if event is GateEvent.WINDOW_STALE:
            n = state.consecutive_stale_windows + 1
            if n >= STALE_TO_IDLE:
                return GateState(GateMode.IDLE)
            return GateState(GateMode.OBSERVING, consecutive_stale_windows=n)
        return state
    if mode is GateMode.IDLE and event is GateEvent.TIMEOUT:
        return GateState(GateMode.OBSERVING)
    if mode is GateMode.ESCALATED and event is GateEvent.WINDOW_ACCEPTED:
        return GateState(GateMode.OBSERVING)
    return state


def observe(profile: AuthProfile, action: str, window: TimeSeries):
    """Classify a window as stale, accepted or escalated and step the gate.

    Returns ``(profile_with_new_gate, verdict_or_None)``; stale windows are
    not judged.
    """
    model = profile.model(action)
    if is_stale(model, window):
        return profile.with_gate(gate_step(profile.gate, GateEvent.WINDOW_STALE)), None
    verdict = judge(profile, action, window)
    event = GateEvent.WINDOW_ACCEPTED if verdict.accepted else GateEvent.WINDOW_ESCALATED
    return profile.with_gate(gate_step(profile.gate, event)), verdict


# -- persistence -----------------------------------------------------------

def profile_to_lines(profile: AuthProfile) -> list:
    header = {
        "format": PROFILE_FORMAT,
        "version": PROFILE_VERSION,
        "user_id": profile.user_id,
        "te_policy": {
            "interval_level": profile.te_policy.interval_level,
            "max_outside_fraction": profile.te_policy.max_outside_fraction,
            "min_window_samples": profile.te_policy.min_window_samples,
        },
        "gate": {
            "mode": profile.gate.mode.value,
            "consecutive_accepts": profile.gate.consecutive_accepts,
            "consecutive_stale_windows": profile.gate.consecutive_stale_windows,
        },
        "n_models": len(profile.action_models),
    }
    lines = [json.dumps(header)]
    for action in sorted(profile.action_models):
        record = {"action": action, "model": model_to_dict(profile.action_models[action])}
        lines.append(json.dumps(record))
    return lines


def save_profile(profile: AuthProfile, path) -> None:
    """Write a profile as JSON Lines: a header record then one per action."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in profile_to_lines(profile):
            fh.write(line + "\n")


def load_profile(path) -> AuthProfile:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().split("\n") if ln]
    if not lines:
        raise BehaviorAuthError(f"{path}: empty profile file")
    header = json.loads(lines[0])
    if header.get("format") != PROFILE_FORMAT:
        raise BehaviorAuthError(f"{path}: not a behavior-auth profile")
    if header.get("version") != PROFILE_VERSION:
        raise BehaviorAuthError(f"{path}: unsupported version {header.get('version')}")
    if header["n_models"] != len(lines) - 1:
        raise BehaviorAuthError(f"{path}: expected {header['n_models']} model records")
    models = {}
    for line in lines[1:]:
        rec = json.loads(line)
        models[rec["action"]] = model_from_dict(rec["model"])
    g = header["gate"]
    return AuthProfile(
        user_id=header["user_id"],
        action_models=models,
        te_policy=TePolicy(**header["te_policy"]),
        gate=GateState(GateMode(g["mode"]), g["consecutive_accepts"],
                       g["consecutive_stale_windows"]),
    )
