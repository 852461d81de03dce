"""Additive trend + Fourier seasonality + event model with forecast bands.

A series is modelled as ``y(t) = trend(t) + season(t) + events(t) + resid``
where the trend is either a saturating logistic curve or a piecewise-linear
curve with slope changes at fixed changepoints, the season is a real Fourier
series of a single period, and events are localized per-sample effects for
samples flagged as outliers (sensor glitches). Fitting is ridge-regularized
least squares; bands combine empirical residual quantiles with the
propagated trend-parameter uncertainty.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Union

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import expit
from scipy.stats import norm

from .errors import (
    LengthMismatch,
    NonMonotonicTimestamps,
    NoPeriodFound,
    OutOfRange,
    PeriodUnresolved,
    SeriesTooShort,
    SingularDesign,
)
from .series import TimeSeries, estimate_period

LOGISTIC = "logistic"
PIECEWISE_LINEAR = "piecewise_linear"
TREND_KINDS = (LOGISTIC, PIECEWISE_LINEAR)

MAD_TO_SIGMA = 1.4826

# Residual quantiles are stored on this grid and interpolated in between.
QUANTILE_LEVELS = tuple(round(i / 200, 3) for i in range(1, 200))

_GN_MAX_ITER = 50
_GN_RTOL = 1e-10


@dataclass(frozen=True)
class FitConfig:
    """Hyper-parameters for :func:`fit`.

    ``period`` may be a number of seconds, ``"auto"`` (estimated within
    ``[min_period, max_period]``) or ``None`` for no seasonality.
    ``fourier_order = 0`` also disables seasonality.
    """

    trend_kind: str = PIECEWISE_LINEAR
    fourier_order: int = 5
    period: Union[float, str, None] = "auto"
    n_changepoints: int = 10
    changepoint_ridge_lambda: float = 10.0
    seasonality_ridge_lambda: float = 0.1
    outlier_mad_threshold: float = 3.5
    interval_level: float = 0.80
    changepoint_range: float = 0.8
    min_period: float = 0.2
    max_period: float = 2.0

    def __post_init__(self):
        if self.trend_kind not in TREND_KINDS:
            raise OutOfRange(f"trend_kind must be one of {TREND_KINDS}")
        if int(self.fourier_order) != self.fourier_order or self.fourier_order < 0:
            raise OutOfRange("fourier_order must be a non-negative integer")
        if int(self.n_changepoints) != self.n_changepoints or self.n_changepoints < 0:
            raise OutOfRange("n_changepoints must be a non-negative integer")
        if isinstance(self.period, str):
            if self.period != "auto":
                raise OutOfRange("period must be seconds, 'auto' or None")
        elif self.period is not None and not (np.isfinite(self.period) and self.period > 0):
            raise OutOfRange("period must be positive")
        if self.changepoint_ridge_lambda < 0 or self.seasonality_ridge_lambda < 0:
            raise OutOfRange("ridge penalties must be >= 0")
        if not self.outlier_mad_threshold > 0:
            raise OutOfRange("outlier_mad_threshold must be > 0")
        if not 0 < self.interval_level < 1:
            raise OutOfRange("interval_level must be in (0, 1)")
        if not 0 < self.changepoint_range <= 1:
            raise OutOfRange("changepoint_range must be in (0, 1]")
        if not 0 < self.min_period < self.max_period:
            raise OutOfRange("need 0 < min_period < max_period")

    @property
    def seasonal(self) -> bool:
        return self.period is not None and self.fourier_order > 0

    def replace(self, **changes) -> "FitConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "FitConfig":
        return cls(**data)


@dataclass(frozen=True)
class LogisticTrend:
    """``capacity / (1 + exp(-rate * (t - offset)))``."""

    capacity: float
    rate: float
    offset: float

    n_params = 3

    def __post_init__(self):
        for name in ("capacity", "rate", "offset"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def __call__(self, t):
        return self.capacity * expit(self.rate * (np.asarray(t, dtype=float) - self.offset))

    def gradient(self, t):
        """d trend / d (capacity, rate, offset), one row per time."""
        t = np.asarray(t, dtype=float)
        s = expit(self.rate * (t - self.offset))
        ds = self.capacity * s * (1 - s)
        return np.column_stack([s, ds * (t - self.offset), -ds * self.rate])

    def params(self):
        return [self.capacity, self.rate, self.offset]


@dataclass(frozen=True)
class PiecewiseLinearTrend:
    """Continuous piecewise-linear trend.

    ``intercept + slope * (t - t_ref) + sum_j delta_j * max(0, t - time_j)``
    with ``changepoints = ((time_j, delta_j), ...)`` and slopes per second.
    """

    intercept: float
    slope: float
    changepoints: tuple = ()
    t_ref: float = 0.0

    def __post_init__(self):
        cps = tuple((float(c), float(d)) for c, d in self.changepoints)
        times = [c for c, _ in cps]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise NonMonotonicTimestamps("changepoint times must increase")
        object.__setattr__(self, "changepoints", cps)
        for name in ("intercept", "slope", "t_ref"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def n_params(self):
        return 2 + len(self.changepoints)

    def gradient(self, t):
        t = np.asarray(t, dtype=float)
        cols = [np.ones_like(t), t - self.t_ref]
        cols += [np.maximum(0.0, t - c) for c, _ in self.changepoints]
        return np.column_stack(cols)

    def params(self):
        return [self.intercept, self.slope] + [d for _, d in self.changepoints]

    def __call__(self, t):
        return self.gradient(t) @ np.asarray(self.params())


@dataclass(frozen=True)
class FourierSeasonality:
    """``sum_n a_n cos(2 pi n t / P) + b_n sin(2 pi n t / P)`` for n = 1..N."""

    period: float
    cos_coeffs: tuple
    sin_coeffs: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in self.cos_coeffs)
        b = tuple(float(v) for v in self.sin_coeffs)
        if len(a) != len(b) or not a:
            raise LengthMismatch("need matching, non-empty cos/sin coefficients")
        if not self.period > 0:
            raise OutOfRange("period must be > 0")
        object.__setattr__(self, "period", float(self.period))
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)

    @property
    def order(self) -> int:
        return len(self.cos_coeffs)

    def __call__(self, t):
        X = fourier_design(t, self.period, self.order)
        return X @ np.concatenate([self.cos_coeffs, self.sin_coeffs])


@dataclass(frozen=True)
class EventEffects:
    """Additive effects at isolated times, each applied within ``+-halfwidth``."""

    times: tuple = ()
    effects: tuple = ()
    halfwidth: float = 0.0

    def __post_init__(self):
        times = tuple(float(v) for v in self.times)
        effects = tuple(float(v) for v in self.effects)
        if len(times) != len(effects):
            raise LengthMismatch("one effect per event time")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise NonMonotonicTimestamps("event times must increase")
        if not np.all(np.isfinite(effects)):
            raise OutOfRange("event effects must be finite")
        if self.halfwidth < 0:
            raise OutOfRange("halfwidth must be >= 0")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "effects", effects)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for et, ev in zip(self.times, self.effects):
            out[np.abs(t - et) <= self.halfwidth] += ev
        return out


@dataclass(frozen=True)
class ResidualStats:
    """Residual spread of the non-outlier training samples.

    ``quantiles`` maps probability level to raw residual quantile.
    ``effective_dof`` is the trace of the ridge hat matrix; :meth:`quantile`
    inflates by ``sqrt(n / (n - dof))`` so that bands account for the
    in-sample shrinkage of residuals.
    """

    sigma: float
    quantiles: dict
    sample_count: int
    effective_dof: float = 0.0

    @property
    def inflation(self) -> float:
        n = self.sample_count
        if n <= 0:
            return 1.0
        return float(np.sqrt(n / max(n - self.effective_dof, 1.0)))

    def quantile(self, p: float) -> float:
        levels = np.array(sorted(self.quantiles))
        values = np.array([self.quantiles[k] for k in levels])
        return float(np.interp(p, levels, values)) * self.inflation


@dataclass(frozen=True)
class Forecast:
    timestamps: np.ndarray
    yhat: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float

    def __len__(self):
        return int(np.asarray(self.timestamps).size)


@dataclass(frozen=True, eq=False)
class AdditiveModel:
    """A fitted decomposition.

    ``trend_cov`` is the covariance of ``trend.params()`` and drives band
    widening away from the data. ``training`` keeps the samples the model
    was fitted on so it can be refitted with new data appended.
    """

    trend: Union[LogisticTrend, PiecewiseLinearTrend]
    seasonality: FourierSeasonality | None
    events: EventEffects
    residuals: ResidualStats
    train_span: tuple
    fit_config: FitConfig
    trend_cov: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    training: TimeSeries | None = None

    def season(self, t):
        if self.seasonality is None:
            return np.zeros_like(np.asarray(t, dtype=float))
        return self.seasonality(t)

    def trend_sd(self, t):
        """Standard deviation of the trend at ``t`` from parameter uncertainty."""
        t = np.asarray(t, dtype=float)
        cov = np.asarray(self.trend_cov)
        if cov.size == 0:
            return np.zeros_like(t)
        G = self.trend.gradient(t)
        var = np.einsum("ij,jk,ik->i", G, cov, G)
        return np.sqrt(np.maximum(var, 0.0))


def fourier_design(t, period, order):
    t = np.asarray(t, dtype=float)
    if order == 0:
        return np.zeros((t.size, 0))
    n = np.arange(1, order + 1)
    arg = 2 * np.pi * np.outer(t, n) / period
    return np.hstack([np.cos(arg), np.sin(arg)])


def flag_outliers(series: TimeSeries, detrended, mad_threshold: float,
                  min_mad: float = 0.0) -> list:
    """Indices whose deviation from the median exceeds the MAD fence.

    A sample is flagged when ``|d - median(d)| > mad_threshold * 1.4826 * MAD``.
    With a zero MAD every sample off the median is flagged, so all-equal
    input flags nothing. ``min_mad > 0`` treats any MAD at or below it as
    numerical noise and flags nothing.
    """
    d = np.asarray(detrended, dtype=float)
    if d.size != len(series):
        raise LengthMismatch(f"{d.size} detrended values for {len(series)} samples")
    if not mad_threshold > 0:
        raise OutOfRange("mad_threshold must be > 0")
    if d.size == 0:
        return []
    med = np.median(d)
    dev = np.abs(d - med)
    mad = np.median(dev)
    if min_mad > 0 and mad <= min_mad:
        return []
    return np.flatnonzero(dev > mad_threshold * MAD_TO_SIGMA * mad).tolist()


# -- fitting ---------------------------------------------------------------

@dataclass
class _CoreFit:
    trend: object
    season_coef: np.ndarray
    cov_trend: np.ndarray
    dof: float
    fitted_trend: np.ndarray
    fitted_season: np.ndarray


def _solve_ridge(X, y, penalty):
    """Solve ``min |y - X b|^2 + sum penalty_i b_i^2``.

    Returns the coefficients and ``inv(X'X + diag(penalty))``.
    """
    p = X.shape[1]
    A = np.vstack([X, np.diag(np.sqrt(penalty))])
    rhs = np.concatenate([y, np.zeros(p)])
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s.size < p or s[-1] <= s[0] * 1e-12 or s[0] == 0:
        raise SingularDesign(
            "design matrix is rank deficient even with the ridge penalty")
    coef = Vt.T @ ((U.T @ rhs) / s)
    inv_normal = (Vt.T / s**2) @ Vt
    return coef, inv_normal


def _fit_piecewise(t, y, t_all, period, config):
    t0, t1 = t[0], t[-1]
    span = t1 - t0
    m = int(config.n_changepoints)
    cp_u = config.changepoint_range * np.arange(1, m + 1) / m if m else np.zeros(0)
    cp_t = t0 + cp_u * span

    def design(tt):
        u = (tt - t0) / span
        cols = [np.ones_like(u), u] + [np.maximum(0.0, u - c) for c in cp_u]
        T = np.column_stack(cols)
        S = fourier_design(tt, period, config.fourier_order) if period else np.zeros((tt.size, 0))
        return T, S

    T, S = design(t)
    X = np.hstack([T, S])
    penalty = np.concatenate([[0.0, 0.0], np.full(m, config.changepoint_ridge_lambda),
                              np.full(S.shape[1], config.seasonality_ridge_lambda)])
    coef, inv_normal = _solve_ridge(X, y, penalty)
    dof = float(np.trace(inv_normal @ (X.T @ X)))

    nt = 2 + m
    scale = np.concatenate([[1.0], np.full(nt - 1, 1.0 / span)])
    beta = coef[:nt] * scale
    trend = PiecewiseLinearTrend(
        intercept=beta[0], slope=beta[1],
        changepoints=tuple(zip(cp_t.tolist(), beta[2:].tolist())), t_ref=t0)
    cov = inv_normal[:nt, :nt] * np.outer(scale, scale)

    T_all, S_all = design(t_all)
    return _CoreFit(trend, coef[nt:], cov, dof, T_all @ coef[:nt], S_all @ coef[nt:])


def _fit_logistic(t, y, t_all, period, config):
    S = fourier_design(t, period, config.fourier_order) if period else np.zeros((t.size, 0))
    q = S.shape[1]
    lam = config.seasonality_ridge_lambda
    span = t[-1] - t[0]

    if q:
        _, inv_s = _solve_ridge(S, np.zeros(t.size), np.full(q, lam))
        proj = inv_s @ S.T
    else:
        proj = np.zeros((0, t.size))

    ymax, ymin = float(np.max(y)), float(np.min(y))
    base = ymax if ymax > 0 else (ymin if ymin < 0 else 1.0)
    caps = np.linspace(base, 2 * base, 5)
    mags = np.array([0.1, 0.5, 1.0, 2.0, 5.0]) / span
    rates = np.concatenate([-mags[::-1], mags])
    offsets = np.quantile(t, [0.1, 0.3, 0.5, 0.7, 0.9])

    C, K, B = (a.ravel() for a in np.meshgrid(caps, rates, offsets, indexing="ij"))
    G = C[:, None] * expit(K[:, None] * (t[None, :] - B[:, None]))
    R = y[None, :] - G
    coefs = R @ proj.T
    obj = np.sum((R - coefs @ S.T) ** 2, axis=1) + lam * np.sum(coefs**2, axis=1)
    i = int(np.argmin(obj))
    theta = np.concatenate([[C[i], K[i], B[i]], coefs[i]])

    pen = np.concatenate([np.zeros(3), np.full(q, lam)])

    def objective(th):
        tr = LogisticTrend(*th[:3])
        r = y - tr(t) - S @ th[3:]
        return float(r @ r + pen @ th**2), r, tr

    cur, r, tr = objective(theta)
    for _ in range(_GN_MAX_ITER):
        J = np.hstack([tr.gradient(t), S])
        A = np.vstack([J, np.diag(np.sqrt(pen))])
        rhs = np.concatenate([r, -np.sqrt(pen) * theta])
        step = np.linalg.lstsq(A, rhs, rcond=None)[0]
        improved = False
        for _ in range(30):
            cand = theta + step
            new, r_new, tr_new = objective(cand)
            if np.isfinite(new) and new <= cur:
                improved = True
                break
            step = step / 2
        if not improved:
            break
        gain = (cur - new) / cur if cur > 0 else 0.0
        theta, cur, r, tr = cand, new, r_new, tr_new
        if gain < _GN_RTOL:
            break

    J = np.hstack([tr.gradient(t), S])
    normal = J.T @ J + np.diag(pen)
    inv_normal = np.linalg.pinv(normal)
    dof = float(np.trace(inv_normal @ (J.T @ J)))
    S_all = fourier_design(t_all, period, config.fourier_order) if period else np.zeros((t_all.size, 0))
    return _CoreFit(tr, theta[3:], inv_normal[:3, :3], dof, tr(t_all), S_all @ theta[3:])


def _harmonic_sse(t, y, period, order):
    u = (t - t[0]) / (t[-1] - t[0])
    X = np.hstack([np.column_stack([np.ones_like(u), u]), fourier_design(t, period, order)])
    r = y - X @ np.linalg.lstsq(X, y, rcond=None)[0]
    return float(r @ r)


def refine_period(series: TimeSeries, period: float, min_period: float, max_period: float,
                  order: int = 5, lags: float = 2.0) -> float:
    """Polish a lag-resolution period estimate by least squares.

    Minimizes the residual sum of squares of a linear-trend plus Fourier fit
    over periods within ``lags`` sample spacings of ``period``: a 41-point
    scan, then a bounded Brent search inside the best cell. Phase drift from
    a period error grows with the number of cycles, so this matters most for
    long training series and far horizons.
    """
    t, y = series.timestamps, series.values
    dt = series.median_spacing()
    lo = max(period - lags * dt, min_period, 2 * dt)
    hi = min(period + lags * dt, max_period)
    if not hi > lo or t.size < 2 * order + 3:
        return period
    order = max(int(order), 1)
    grid = np.linspace(lo, hi, 41)
    sse = np.array([_harmonic_sse(t, y, p, order) for p in grid])
    i = int(np.argmin(sse))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(lambda p: _harmonic_sse(t, y, p, order), bounds=(a, b),
                          method="bounded", options={"xatol": 1e-9 * period})
    return float(res.x) if res.fun <= sse[i] else float(grid[i])


def resolve_period(series: TimeSeries, config: FitConfig):
    """Seasonal period used by :func:`fit`, or ``None`` without seasonality.

    ``"auto"`` takes the autocorrelation estimate and polishes it with
    :func:`refine_period`.
    """
    if not config.seasonal:
        return None
    if config.period == "auto":
        try:
            est = estimate_period(series, config.min_period, config.max_period).period
        except (NoPeriodFound, SeriesTooShort) as exc:
            raise PeriodUnresolved(f"automatic period estimation failed: {exc}") from exc
        return refine_period(series, est, config.min_period, config.max_period,
                             config.fourier_order)
    return float(config.period)


def min_fit_length(config: FitConfig) -> int:
    return max(10, 2 * config.fourier_order + 3)


def fit(series: TimeSeries, config: FitConfig | None = None) -> AdditiveModel:
    """Fit the additive model to ``series``.

    Steps: resolve the seasonal period, fit once on every sample, flag
    outliers with the MAD rule on that pre-fit's residuals, refit on the
    remaining samples, then store the flagged samples' residuals as event
    effects and summarize the rest as :class:`ResidualStats`.
    """
    config = config or FitConfig()
    need = min_fit_length(config)
    if len(series) < need:
        raise SeriesTooShort(f"fit needs >= {need} samples, got {len(series)}")
    period = resolve_period(series, config)

    t, y = series.timestamps, series.values
    core = _fit_logistic if config.trend_kind == LOGISTIC else _fit_piecewise

    pre = core(t, y, t, period, config)
    detrended = y - pre.fitted_trend - pre.fitted_season
    scale = float(np.max(np.abs(y)))
    flagged = flag_outliers(series, detrended, config.outlier_mad_threshold,
                            min_mad=1e-10 * scale)
    keep = np.ones(t.size, dtype=bool)
    keep[flagged] = False
    if flagged and keep.sum() >= need:
        res = core(t[keep], y[keep], t, period, config)
    else:
        res, flagged = pre, []
        keep[:] = True

    base = res.fitted_trend + res.fitted_season
    halfwidth = 0.49 * float(np.min(np.diff(t)))
    events = EventEffects(times=t[flagged].tolist(),
                          effects=(y[flagged] - base[flagged]).tolist(),
                          halfwidth=halfwidth)
    resid = y - base - events(t)
    kept = resid[keep]
    raw_sigma = float(np.std(kept))
    qs = np.quantile(kept, QUANTILE_LEVELS)
    residuals = ResidualStats(sigma=raw_sigma,
                              quantiles=dict(zip(QUANTILE_LEVELS, qs.tolist())),
                              sample_count=int(kept.size),
                              effective_dof=res.dof)

    seasonality = None
    if period is not None:
        N = config.fourier_order
        seasonality = FourierSeasonality(period, res.season_coef[:N].tolist(),
                                         res.season_coef[N:].tolist())
    # Posterior-style trend covariance uses the dof-corrected noise variance.
    noise_var = (raw_sigma * residuals.inflation) ** 2
    return AdditiveModel(
        trend=res.trend,
        seasonality=seasonality,
        events=events,
        residuals=residuals,
        train_span=(float(t[0]), float(t[-1])),
        fit_config=config,
        trend_cov=res.cov_trend * noise_var,
        training=series,
    )


def _check_times(timestamps):
    t = np.asarray(timestamps, dtype=float).reshape(-1)
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise NonMonotonicTimestamps("timestamps must be strictly increasing")
    return t


def evaluate_components(model: AdditiveModel, timestamps):
    """Return ``(trend, season, events)`` arrays at arbitrary times."""
    t = _check_times(timestamps)
    return model.trend(t), model.season(t), model.events(t)


def residuals_of(model: AdditiveModel, series: TimeSeries) -> np.ndarray:
    trend, season, events = evaluate_components(model, series.timestamps)
    return series.values - trend - season - events


def predict_at(model: AdditiveModel, timestamps, level: float | None = None) -> Forecast:
    """Forecast at the given times; future event effects are taken as zero.

    The band is ``yhat`` plus the residual quantiles at ``(1 - level) / 2``
    and ``(1 + level) / 2``, each combined in quadrature with
    ``z * trend_sd(t)`` so it widens as the trend is extrapolated.
    """
    level = model.fit_config.interval_level if level is None else level
    if not 0 < level < 1:
        raise OutOfRange("level must be in (0, 1)")
    t = _check_times(timestamps)
    yhat = model.trend(t) + model.season(t)
    lo_q = min(model.residuals.quantile((1 - level) / 2), 0.0)
    hi_q = max(model.residuals.quantile((1 + level) / 2), 0.0)
    spread = norm.ppf(0.5 + level / 2) * model.trend_sd(t)
    floor = 1e-12 * max(1.0, float(np.max(np.abs(yhat), initial=0.0)))
    lower = yhat - np.maximum(np.hypot(lo_q, spread), floor)
    upper = yhat + np.maximum(np.hypot(hi_q, spread), floor)
    return Forecast(timestamps=t, yhat=yhat, lower=lower, upper=upper, level=level)


def predict(model: AdditiveModel, horizon_steps: int, step: float,
            level: float | None = None) -> Forecast:
    """Forecast ``horizon_steps`` points spaced ``step`` after the training end."""
    if horizon_steps < 1:
        raise OutOfRange("horizon_steps must be >= 1")
    if not step > 0:
        raise OutOfRange("step must be > 0")
    t = model.train_span[1] + step * np.arange(1, horizon_steps + 1)
    return predict_at(model, t, level)


# -- serialization ---------------------------------------------------------

def model_to_dict(model: AdditiveModel) -> dict:
    trend = model.trend
    if isinstance(trend, LogisticTrend):
        trend_d = {"kind": LOGISTIC, "capacity": trend.capacity, "rate": trend.rate,
                   "offset": trend.offset}
    else:
        trend_d = {"kind": PIECEWISE_LINEAR, "intercept": trend.intercept,
                   "slope": trend.slope, "t_ref": trend.t_ref,
                   "changepoints": [list(cp) for cp in trend.changepoints]}
    season = model.seasonality
    res = model.residuals
    return {
        "fit_config": model.fit_config.to_dict(),
        "train_span": list(model.train_span),
        "trend": trend_d,
        "trend_cov": np.asarray(model.trend_cov).tolist(),
        "seasonality": None if season is None else {
            "period": season.period, "cos": list(season.cos_coeffs),
            "sin": list(season.sin_coeffs)},
        "events": {"times": list(model.events.times),
                   "effects": list(model.events.effects),
                   "halfwidth": model.events.halfwidth},
        "residuals": {"sigma": res.sigma, "sample_count": res.sample_count,
                      "effective_dof": res.effective_dof,
                      "levels": sorted(res.quantiles),
                      "quantiles": [res.quantiles[k] for k in sorted(res.quantiles)]},
        "training": None if model.training is None else {
            "unit_tag": model.training.unit_tag,
            "t": model.training.timestamps.tolist(),
            "y": model.training.values.tolist()},
    }


def model_from_dict(d: dict) -> AdditiveModel:
    tr = d["trend"]
    if tr["kind"] == LOGISTIC:
        trend = LogisticTrend(tr["capacity"], tr["rate"], tr["offset"])
    else:
        trend = PiecewiseLinearTrend(tr["intercept"], tr["slope"],
                                     tuple(tuple(cp) for cp in tr["changepoints"]),
                                     tr["t_ref"])
    s = d["seasonality"]
    r = d["residuals"]
    training = d.get("training")
    return AdditiveModel(
        trend=trend,
        seasonality=None if s is None else FourierSeasonality(s["period"], s["cos"], s["sin"]),
        events=EventEffects(d["events"]["times"], d["events"]["effects"],
                            d["events"]["halfwidth"]),
        residuals=ResidualStats(r["sigma"], dict(zip(r["levels"], r["quantiles"])),
                                r["sample_count"], r["effective_dof"]),
        train_span=tuple(d["train_span"]),
        fit_config=FitConfig.from_dict(d["fit_config"]),
        trend_cov=np.array(d["trend_cov"], dtype=float).reshape(
            len(trend.params()), len(trend.params())),
        training=None if training is None else TimeSeries(
            training["t"], training["y"], training["unit_tag"]),
    )
