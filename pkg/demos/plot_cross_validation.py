"""
Rolling-origin cross-validation
===============================

Five folds: train on 500, 600, ... 900 samples and score the next 100 each
time.
"""

from behavior_auth import SynthSpec, cross_validate, synth

series = synth(SynthSpec(period=0.9, amplitude=4.0, offset=-9.8, noise_sigma=0.4,
                         trend_slope=0.01, duration=20, rng_seed=3)).x

report = cross_validate(series, initial_train=500, horizon=100, n_folds=5)
print(report.summary())
print()
print(report.to_csv(), end="")
