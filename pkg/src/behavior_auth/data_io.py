"""Recording CSV ingestion, synthetic signal generation and forecast export.

Input recordings use one row per tri-axial sample::

    subject_id,action,recording_id,t,ax,ay,az

Rows are grouped by ``(subject_id, action, recording_id)`` in order of first
appearance and sorted by ``t`` inside each group. Malformed rows abort the
load with :class:`ParseError`; an empty acceleration cell means that axis
lacks the sample, which is reported as :class:`AxisMisalignment`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .decomposer import Forecast
from .errors import AxisMisalignment, OutOfRange, ParseError, TimestampMismatch
from .prng import XorShift64Star
from .series import TimeSeries

RECORDING_HEADER = ("subject_id", "action", "recording_id", "t", "ax", "ay", "az")
FORECAST_HEADER = ("t", "yhat", "lower", "upper")
AXES = ("x", "y", "z")
DEFAULT_RATE = 50.0


def fmt(value) -> str:
    """17 significant digits: exact round trip through text."""
    return format(float(value), ".17g")


@dataclass(frozen=True)
class TriAxialRecording:
    subject_id: str
    action: str
    x: TimeSeries
    y: TimeSeries
    z: TimeSeries
    sample_rate_hint: float = DEFAULT_RATE
    recording_id: str = "0"

    def __post_init__(self):
        if not self.action:
            raise OutOfRange("action label must be non-empty")
        t = self.x.timestamps
        if not (np.array_equal(t, self.y.timestamps) and np.array_equal(t, self.z.timestamps)):
            raise AxisMisalignment("axes must share identical timestamps")

    def __len__(self):
        return len(self.x)

    def axis(self, name: str) -> TimeSeries:
        return {"x": self.x, "y": self.y, "z": self.z}[name]

    def axes(self) -> dict:
        return {"x": self.x, "y": self.y, "z": self.z}

    def slice(self, start, stop=None) -> "TriAxialRecording":
        return TriAxialRecording(self.subject_id, self.action, self.x.slice(start, stop),
                                 self.y.slice(start, stop), self.z.slice(start, stop),
                                 self.sample_rate_hint, self.recording_id)


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of a synthetic periodic accelerometer signal.

    ``start`` shifts the sample clock so consecutive windows of one process
    can be generated independently.
    """

    period: float = 1.0
    amplitude: float = 1.0
    offset: float = 0.0
    noise_sigma: float = 0.05
    trend_slope: float = 0.0
    outlier_rate: float = 0.0
    outlier_magnitude: float = 0.0
    duration: float = 10.0
    rate: float = DEFAULT_RATE
    rng_seed: int = 0
    start: float = 0.0
    action: str = "Synthetic"
    subject_id: str = "synth"

    def __post_init__(self):
        if not self.duration > 0:
            raise OutOfRange("duration must be > 0")
        if not self.rate > 0:
            raise OutOfRange("rate must be > 0")
        if not self.period > 0:
            raise OutOfRange("period must be > 0")
        if self.noise_sigma < 0:
            raise OutOfRange("noise_sigma must be >= 0")
        if not 0 <= self.outlier_rate <= 1:
            raise OutOfRange("outlier_rate must be in [0, 1]")


def synth(spec: SynthSpec) -> TriAxialRecording:
    """Generate a tri-axial recording fully determined by ``spec``.

    ``x = offset + slope*t + A sin(2 pi t / P) + noise + outliers``; ``y`` uses
    ``cos`` and ``z`` uses ``sin`` with amplitude ``A / 2``. For every sample,
    and for axes x, y, z in turn, one Gaussian and then one uniform ``u`` are
    drawn; ``u < rate/2`` adds ``+magnitude``, ``rate/2 <= u < rate`` adds
    ``-magnitude``.
    """
    n = int(round(spec.duration * spec.rate))
    t = spec.start + np.arange(n) / spec.rate
    phase = 2 * np.pi * t / spec.period
    base = spec.offset + spec.trend_slope * t
    clean = [base + spec.amplitude * np.sin(phase),
             base + spec.amplitude * np.cos(phase),
             base + 0.5 * spec.amplitude * np.sin(phase)]

    rng = XorShift64Star(spec.rng_seed)
    noise = np.empty((n, 3))
    spikes = np.zeros((n, 3))
    half = spec.outlier_rate / 2
    for i in range(n):
        for k in range(3):
            noise[i, k] = rng.gauss()
            u = rng.uniform()
            if u < half:
                spikes[i, k] = spec.outlier_magnitude
            elif u < spec.outlier_rate:
                spikes[i, k] = -spec.outlier_magnitude
    axes = [TimeSeries(t, clean[k] + spec.noise_sigma * noise[:, k] + spikes[:, k])
            for k in range(3)]
    return TriAxialRecording(spec.subject_id, spec.action, *axes,
                             sample_rate_hint=float(spec.rate),
                             recording_id=str(spec.rng_seed))


def _parse_float(text, line, column):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(line, f"{column}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(line, f"{column}: non-finite value {text!r}")
    return value


def load_recording(path) -> list:
    """Read every recording group from a CSV file.

    Raises ``FileNotFoundError``, :class:`ParseError` (with the 1-based
    line) or :class:`AxisMisalignment`.
    """
    groups: dict = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != RECORDING_HEADER:
            raise ParseError(1, f"header must be {','.join(RECORDING_HEADER)}")
        for row in reader:
            line = reader.line_num
            if not row:
                raise ParseError(line, "empty line")
            if len(row) != len(RECORDING_HEADER):
                raise ParseError(line, f"expected {len(RECORDING_HEADER)} fields, got {len(row)}")
            subject, action, rec_id = row[0], row[1], row[2]
            if not action:
                raise ParseError(line, "empty action label")
            t = _parse_float(row[3], line, "t")
            accel = [None if cell.strip() == "" else _parse_float(cell, line, name)
                     for cell, name in zip(row[4:], RECORDING_HEADER[4:])]
            groups.setdefault((subject, action, rec_id), []).append((t, accel, line))

    recordings = []
    for (subject, action, rec_id), rows in groups.items():
        rows.sort(key=lambda r: r[0])
        for prev, cur in zip(rows, rows[1:]):
            if cur[0] == prev[0]:
                raise ParseError(cur[2], f"duplicate timestamp {cur[0]!r} in recording "
                                         f"{subject}/{action}/{rec_id}")
        if any(v is None for _, accel, _ in rows for v in accel):
            raise AxisMisalignment(
                f"recording {subject}/{action}/{rec_id}: axes have different timestamps")
        t = np.array([r[0] for r in rows])
        a = np.array([r[1] for r in rows], dtype=float).reshape(-1, 3)
        rate = DEFAULT_RATE
        if t.size > 1:
            rate = round(float(1.0 / np.median(np.diff(t))), 6)
        recordings.append(TriAxialRecording(
            subject, action, TimeSeries(t, a[:, 0]), TimeSeries(t, a[:, 1]),
            TimeSeries(t, a[:, 2]), sample_rate_hint=rate, recording_id=rec_id))
    return recordings


def write_recordings(recordings, path) -> None:
    """Write recordings in the input CSV format (inverse of :func:`load_recording`)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORDING_HEADER)
        for rec in recordings:
            for i in range(len(rec)):
                w.writerow([rec.subject_id, rec.action, rec.recording_id,
                            fmt(rec.x.timestamps[i]), fmt(rec.x.values[i]),
                            fmt(rec.y.values[i]), fmt(rec.z.values[i])])


def forecast_csv(forecast: Forecast, actuals: TimeSeries | None = None) -> str:
    """Render ``t,yhat,lower,upper[,actual]`` rows at full precision."""
    header = list(FORECAST_HEADER)
    if actuals is not None:
        if not np.array_equal(actuals.timestamps, forecast.timestamps):
            raise TimestampMismatch("actuals must share the forecast timestamps")
        header.append("actual")
    lines = [",".join(header)]
    for i in range(len(forecast)):
        row = [forecast.timestamps[i], forecast.yhat[i], forecast.lower[i],
               forecast.upper[i]]
        if actuals is not None:
            row.append(actuals.values[i])
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def export_forecast(forecast: Forecast, actuals: TimeSeries | None, path) -> None:
    """Write :func:`forecast_csv` output to ``path``."""
    text = forecast_csv(forecast, actuals)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_forecast(path) -> dict:
    """Parse an exported forecast CSV into a dict of float arrays by column."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = {name: [] for name in header}
        for row in reader:
            for name, cell in zip(header, row):
                cols[name].append(_parse_float(cell, reader.line_num, name))
    return {name: np.array(vals) for name, vals in cols.items()}
