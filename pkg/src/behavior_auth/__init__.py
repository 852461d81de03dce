"""Additive time-series behavior models for implicit smartphone authentication.

Accelerometer streams of a repeated action are decomposed into trend,
Fourier seasonality, sparse event effects and noise; forecasts of the next
samples carry a confidence band (the Tolerable Error) against which new
windows are judged to decide whether the carrier is the device owner.
"""

from .authenticator import (
    AuthProfile,
    Decision,
    GateEvent,
    GateMode,
    GateState,
    TePolicy,
    Verdict,
    axis_key,
    gate_step,
    is_stale,
    judge,
    judge_axes,
    load_profile,
    observe,
    register_action,
    retrain,
    save_profile,
)
from .data_io import (
    SynthSpec,
    TriAxialRecording,
    export_forecast,
    load_recording,
    read_forecast,
    synth,
    write_recordings,
)
from .decomposer import (
    AdditiveModel,
    EventEffects,
    FitConfig,
    Forecast,
    FourierSeasonality,
    LogisticTrend,
    PiecewiseLinearTrend,
    ResidualStats,
    evaluate_components,
    fit,
    flag_outliers,
    predict,
    predict_at,
    refine_period,
    resolve_period,
)
from .errors import *  # noqa: F401,F403
from .evaluation import CvReport, FoldResult, auth_simulate, coverage_metric, cross_validate
from .series import PeriodEstimate, TimeSeries, concat, estimate_period, make_series, split_at

__version__ = "0.1.0"
