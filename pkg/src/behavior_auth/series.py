"""Time-series value type, splitting and period estimation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    LengthMismatch,
    NonFiniteValue,
    NonMonotonicTimestamps,
    NoPeriodFound,
    OutOfRange,
    SeriesTooShort,
)

# Peaks below this normalized autocorrelation are treated as "no cycle".
MIN_PERIOD_CONFIDENCE = 0.2


def _frozen_array(values, name):
    arr = np.array(values, dtype=float, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Strictly increasing timestamps (seconds) paired with finite values.

    Gaps may be irregular; missing data is represented by absent samples.
    Arrays are stored read-only so instances can be shared freely.
    """

    timestamps: np.ndarray
    values: np.ndarray
    unit_tag: str = ""

    def __post_init__(self):
        t = _frozen_array(self.timestamps, "timestamps")
        y = _frozen_array(self.values, "values")
        if t.shape != y.shape:
            raise LengthMismatch(
                f"{t.size} timestamps but {y.size} values")
        if not np.all(np.isfinite(t)):
            raise NonFiniteValue("timestamps must be finite")
        if not np.all(np.isfinite(y)):
            bad = int(np.flatnonzero(~np.isfinite(y))[0])
            raise NonFiniteValue(f"non-finite value at index {bad}")
        if t.size > 1:
            dt = np.diff(t)
            if np.any(dt <= 0):
                bad = int(np.flatnonzero(dt <= 0)[0])
                raise NonMonotonicTimestamps(
                    f"timestamp {t[bad + 1]!r} at index {bad + 1} does not "
                    f"follow {t[bad]!r}")
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "values", y)
        object.__setattr__(self, "unit_tag", str(self.unit_tag))

    def __len__(self):
        return int(self.timestamps.size)

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (self.unit_tag == other.unit_tag
                and np.array_equal(self.timestamps, other.timestamps)
                and np.array_equal(self.values, other.values))

    __hash__ = None

    @property
    def start(self) -> float:
        return float(self.timestamps[0])

    @property
    def end(self) -> float:
        return float(self.timestamps[-1])

    def median_spacing(self) -> float:
        if len(self) < 2:
            raise SeriesTooShort("spacing needs at least two samples")
        return float(np.median(np.diff(self.timestamps)))

    def duration(self) -> float:
        """Time covered by the samples, counting the last sample's slot."""
        if len(self) < 2:
            return 0.0
        return self.end - self.start + self.median_spacing()

    def slice(self, start: int, stop: int | None = None) -> "TimeSeries":
        return TimeSeries(self.timestamps[start:stop], self.values[start:stop],
                          self.unit_tag)

    def with_values(self, values) -> "TimeSeries":
        return TimeSeries(self.timestamps, values, self.unit_tag)


def make_series(timestamps, values, unit_tag: str = "") -> TimeSeries:
    """Build a validated :class:`TimeSeries`.

    Raises ``LengthMismatch``, ``NonFiniteValue`` or
    ``NonMonotonicTimestamps`` instead of repairing bad input.
    """
    return TimeSeries(np.asarray(timestamps, dtype=float),
                      np.asarray(values, dtype=float), unit_tag)


def split_at(series: TimeSeries, train_len: int) -> tuple[TimeSeries, TimeSeries]:
    """Split into the first ``train_len`` samples and the remainder."""
    if train_len < 0 or train_len > len(series):
        raise OutOfRange(
            f"train_len {train_len} outside [0, {len(series)}]")
    return series.slice(0, train_len), series.slice(train_len)


def concat(*parts: TimeSeries) -> TimeSeries:
    """Join series end to end; the result must remain strictly increasing."""
    if not parts:
        return make_series([], [])
    t = np.concatenate([p.timestamps for p in parts])
    y = np.concatenate([p.values for p in parts])
    return TimeSeries(t, y, parts[0].unit_tag)


@dataclass(frozen=True)
class PeriodEstimate:
    period: float
    confidence: float


def _regular_grid(series: TimeSeries) -> tuple[np.ndarray, float]:
    dt = series.median_spacing()
    t = series.timestamps
    n = int(np.floor((t[-1] - t[0]) / dt + 1e-9)) + 1
    grid = t[0] + dt * np.arange(n)
    return np.interp(grid, t, series.values), dt


def estimate_period(series: TimeSeries, min_period: float = 0.2,
                    max_period: float = 2.0) -> PeriodEstimate:
    """Estimate the dominant cycle length from the autocorrelation.

    The series is linearly interpolated onto a regular grid at its median
    spacing and mean-removed. The candidate lag is the highest local maximum
    of the (biased) normalized autocorrelation with lag in
    ``[min_period, max_period]``; it is then refined to sub-sample precision
    with a parabola through the unbiased autocorrelation around that lag.

    Returns
    -------
    PeriodEstimate
        ``confidence`` is the biased autocorrelation at the chosen lag,
        clamped to [0, 1].

    Raises
    ------
    SeriesTooShort
        Fewer than 4 samples or a span shorter than ``2 * min_period``.
    NoPeriodFound
        No local maximum in range, or its confidence is below 0.2.
    """
    if not 0 < min_period < max_period:
        raise OutOfRange("need 0 < min_period < max_period")
    if len(series) < 4 or series.end - series.start < 2 * min_period:
        raise SeriesTooShort(
            f"period search needs >= 4 samples spanning >= {2 * min_period} s")

    x, dt = _regular_grid(series)
    x = x - x.mean()
    n = x.size
    energy = float(np.dot(x, x))
    if energy <= 1e-24 * n:
        raise NoPeriodFound("series has no variation")

    spec = np.fft.rfft(x, 2 * n)
    acov = np.fft.irfft(spec * np.conj(spec))[:n]
    biased = acov / energy

    lo = max(int(np.ceil(min_period / dt - 1e-9)), 3)
    hi = min(int(np.floor(max_period / dt + 1e-9)), n - 2)
    best = None
    for lag in range(lo, hi + 1):
        if biased[lag] >= biased[lag - 1] and biased[lag] >= biased[lag + 1]:
            if best is None or biased[lag] > biased[best]:
                best = lag
    if best is None:
        raise NoPeriodFound("no autocorrelation peak inside the search range")
    confidence = float(np.clip(biased[best], 0.0, 1.0))
    if confidence < MIN_PERIOD_CONFIDENCE:
        raise NoPeriodFound(
            f"best peak confidence {confidence:.3f} < {MIN_PERIOD_CONFIDENCE}")

    # The biased curve leans toward shorter lags; re-centre on the lagged
    # Pearson correlation, which peaks exactly at the cycle length.
    def pearson(lag):
        a, b = x[:n - lag], x[lag:]
        a = a - a.mean()
        b = b - b.mean()
        den = np.sqrt(np.dot(a, a) * np.dot(b, b))
        return float(np.dot(a, b) / den) if den > 0 else 0.0

    lags = range(max(best - 2, lo - 1, 1), min(best + 2, n - 3) + 1)
    corr = {lag: pearson(lag) for lag in range(max(best - 3, 1), min(best + 3, n - 2) + 1)}
    peak = max(lags, key=corr.__getitem__)
    refined = float(peak)
    if peak - 1 in corr and peak + 1 in corr:
        y0, y1, y2 = corr[peak - 1], corr[peak], corr[peak + 1]
        denom = y0 - 2 * y1 + y2
        if denom < 0:
            shift = 0.5 * (y0 - y2) / denom
            if abs(shift) <= 1:
                refined = peak + shift
    period = float(np.clip(refined * dt, min_period, max_period))
    return PeriodEstimate(period=period, confidence=confidence)
