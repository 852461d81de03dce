"""
Forecast bands from 500 samples
===============================

Train on the first 500 samples, forecast 300 steps and watch the band widen
with the horizon.
"""

from pathlib import Path

import numpy as np

from behavior_auth import coverage_metric, fit, load_recording, predict, predict_at, split_at

DATA = Path(__file__).resolve().parent.parent / "tests" / "data" / "jumping_s01.csv"

(rec,) = load_recording(DATA)
train, test = split_at(rec.x, 500)
model = fit(train)

fc = predict(model, 300, train.median_spacing(), level=0.8)
width = fc.upper - fc.lower
for k in (0, 99, 199, 299):
    print(f"step {k + 1:3d}: yhat {fc.yhat[k]:+.3f}  band width {width[k]:.3f}")

# Score the first 100 steps against the held-out data at several levels.
held = test.slice(0, 100)
for level in (0.5, 0.8, 0.95):
    band = predict_at(model, held.timestamps, level)
    print(f"level {level:.2f}: coverage {coverage_metric(band, held):.2f}, "
          f"MAE {np.mean(np.abs(band.yhat - held.values)):.3f}")
