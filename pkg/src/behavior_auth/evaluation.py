"""Rolling-origin cross-validation, band coverage and authentication simulation."""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .authenticator import (
    AuthProfile,
    Decision,
    GateEvent,
    GateMode,
    GateState,
    TePolicy,
    axis_key,
    gate_step,
    is_stale,
    judge_axes,
    register_action,
)
from .data_io import SynthSpec, fmt, synth
from .decomposer import FitConfig, Forecast, fit, predict_at
from .errors import BehaviorAuthError, OutOfRange, SeriesTooShort, TimestampMismatch
from .series import TimeSeries

CV_HEADER = ("fold", "train_len", "horizon", "mae", "rmse", "coverage")


class FoldFailed(BehaviorAuthError):
    def __init__(self, fold_index, cause):
        self.fold_index = fold_index
        super().__init__(f"fold {fold_index} failed: {type(cause).__name__}: {cause}")


@dataclass(frozen=True)
class FoldResult:
    fold_index: int
    train_len: int
    horizon: int
    mae: float
    rmse: float
    coverage: float


@dataclass(frozen=True)
class CvReport:
    folds: list
    config_echo: FitConfig

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(CV_HEADER) + "\n")
        for f in self.folds:
            buf.write(",".join([str(f.fold_index), str(f.train_len), str(f.horizon),
                                fmt(f.mae), fmt(f.rmse), fmt(f.coverage)]) + "\n")
        return buf.getvalue()

    def summary(self) -> str:
        lines = [f"{'fold':>4} {'train':>6} {'horizon':>7} {'MAE':>10} {'RMSE':>10} {'coverage':>8}"]
        for f in self.folds:
            lines.append(f"{f.fold_index:>4} {f.train_len:>6} {f.horizon:>7} "
                         f"{f.mae:>10.5f} {f.rmse:>10.5f} {f.coverage:>8.3f}")
        if self.folds:
            lines.append(f"mean MAE {np.mean([f.mae for f in self.folds]):.5f}, "
                         f"mean coverage {np.mean([f.coverage for f in self.folds]):.3f} "
                         f"at level {self.config_echo.interval_level}")
        return "\n".join(lines)


def coverage_metric(forecast: Forecast, actual: TimeSeries) -> float:
    """Fraction of actual values inside ``[lower, upper]``."""
    if not np.array_equal(np.asarray(forecast.timestamps), actual.timestamps):
        raise TimestampMismatch("forecast and actuals must share timestamps")
    if len(actual) == 0:
        return 0.0
    v = actual.values
    inside = (v >= forecast.lower) & (v <= forecast.upper)
    return float(np.count_nonzero(inside) / v.size)


def _run_fold(series, i, initial_train, horizon, config):
    train_len = initial_train + (i - 1) * horizon
    train = series.slice(0, train_len)
    test = series.slice(train_len, train_len + horizon)
    try:
        model = fit(train, config)
    except BehaviorAuthError as exc:
        raise FoldFailed(i, exc) from exc
    fc = predict_at(model, test.timestamps, config.interval_level)
    err = test.values - fc.yhat
    return FoldResult(i, train_len, horizon, float(np.mean(np.abs(err))),
                      float(np.sqrt(np.mean(err ** 2))), coverage_metric(fc, test))


def cross_validate(series: TimeSeries, initial_train: int, horizon: int, n_folds: int,
                   config: FitConfig | None = None, workers: int = 1) -> CvReport:
    """Expanding-window backtest.

    Fold ``i`` (1-based) trains on the first ``initial_train + (i-1)*horizon``
    samples and scores the next ``horizon`` samples. Folds may run on
    ``workers`` threads; the report is always ordered by fold index.
    """
    config = config or FitConfig()
    if n_folds < 0 or horizon < 1 or initial_train < 1:
        raise OutOfRange("need n_folds >= 0, horizon >= 1, initial_train >= 1")
    if n_folds == 0:
        return CvReport([], config)
    need = initial_train + n_folds * horizon
    if len(series) < need:
        raise SeriesTooShort(f"cross-validation needs {need} samples, got {len(series)}")
    idx = range(1, n_folds + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            folds = list(pool.map(
                lambda i: _run_fold(series, i, initial_train, horizon, config), idx))
    else:
        folds = [_run_fold(series, i, initial_train, horizon, config) for i in idx]
    return CvReport(folds, config)


@dataclass(frozen=True)
class AuthSimResult:
    far: float
    frr: float
    gate_trace: list
    owner_verdicts: list = field(default_factory=list)
    impostor_verdicts: list = field(default_factory=list)

    def trace_csv(self) -> str:
        buf = io.StringIO()
        buf.write("step,mode,consecutive_accepts,consecutive_stale_windows\n")
        for i, g in enumerate(self.gate_trace):
            buf.write(f"{i},{g.mode.value},{g.consecutive_accepts},"
                      f"{g.consecutive_stale_windows}\n")
        return buf.getvalue()


def _window(spec: SynthSpec, start: float, n: int, seed: int):
    rec = synth(replace(spec, start=start, duration=n / spec.rate, rng_seed=seed))
    return rec.axes()


def auth_simulate(owner_spec: SynthSpec, impostor_spec: SynthSpec,
                  te: TePolicy | None = None, config: FitConfig | None = None,
                  n_windows: int = 200, window_samples: int | None = None) -> AuthSimResult:
    """Train on two owner cycles, then judge owner and impostor windows.

    Every window covers the same stretch of time right after training and
    differs only in its noise seed (window ``k`` uses ``rng_seed + 1 + k`` of
    its spec), so the comparison isolates the behavior itself from forecast
    horizon effects. All three axes are judged; any escalating axis
    escalates the window. The gate starts in Observing, processes the owner
    windows then the impostor windows, and is woken by a Timeout whenever a
    window arrives while it is Idle. ``gate_trace[0]`` is the initial state
    and ``gate_trace[k]`` the state after window ``k``.
    """
    te = te or TePolicy()
    config = config or FitConfig()
    if n_windows < 1:
        raise OutOfRange("n_windows must be >= 1")
    action = owner_spec.action
    train_rec = synth(replace(owner_spec, start=0.0, duration=2 * owner_spec.period))
    profile = AuthProfile(user_id=owner_spec.subject_id, te_policy=te)
    for axis, series in train_rec.axes().items():
        profile = register_action(profile, axis_key(action, axis), series, config)

    n_train = len(train_rec)
    start = n_train / owner_spec.rate
    if window_samples is None:
        window_samples = max(te.min_window_samples,
                             int(round(owner_spec.period * owner_spec.rate)))

    gate = GateState()
    trace = [gate]

    def run(spec):
        nonlocal gate
        verdicts = []
        for k in range(n_windows):
            windows = _window(spec, start, window_samples, spec.rng_seed + 1 + k)
            verdict = judge_axes(profile, action, windows)
            verdicts.append(verdict)
            if gate.mode is GateMode.IDLE:
                gate = gate_step(gate, GateEvent.TIMEOUT)
            stale = all(is_stale(profile.model(axis_key(action, a)), w)
                        for a, w in windows.items())
            if stale:
                event = GateEvent.WINDOW_STALE
            elif verdict.accepted:
                event = GateEvent.WINDOW_ACCEPTED
            else:
                event = GateEvent.WINDOW_ESCALATED
            gate = gate_step(gate, event)
            trace.append(gate)
        return verdicts

    owner = run(owner_spec)
    impostor = run(impostor_spec)
    frr = sum(v.decision is Decision.ESCALATE for v in owner) / n_windows
    far = sum(v.decision is Decision.ACCEPT for v in impostor) / n_windows
    return AuthSimResult(far, frr, trace, owner, impostor)
