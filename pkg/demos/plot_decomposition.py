"""
Decomposing a Jumping recording
===============================

Fit the additive model to the x axis of the bundled Jumping fixture and look
at what each component carries.
"""

from pathlib import Path

import numpy as np

from behavior_auth import evaluate_components, fit, load_recording

DATA = Path(__file__).resolve().parent.parent / "tests" / "data" / "jumping_s01.csv"

(rec,) = load_recording(DATA)
series = rec.x
print(f"{rec.subject_id}/{rec.action}: {len(series)} samples at {rec.sample_rate_hint} Hz")

# The default config estimates the period from the data.
model = fit(series)
print(f"estimated period: {model.seasonality.period:.4f} s")
print(f"residual sigma:   {model.residuals.sigma:.4f}")

# Trend, season and events are evaluated separately; the residual is what is left.
trend, season, events = evaluate_components(model, series.timestamps)
resid = series.values - trend - season - events
print(f"trend range:      {trend.min():.3f} .. {trend.max():.3f}")
print(f"season amplitude: {np.ptp(season) / 2:.3f}")

# Flagged samples (sensor glitches) are absorbed by event effects.
for t, effect in zip(model.events.times, model.events.effects):
    print(f"  event at t={t:6.2f} s, effect {effect:+.2f}")

print(f"max |y - sum of parts|: {np.max(np.abs(trend + season + events + resid - series.values)):.1e}")
