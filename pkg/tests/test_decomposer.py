import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from behavior_auth.decomposer import (
    AdditiveModel,
    EventEffects,
    FitConfig,
    FourierSeasonality,
    LogisticTrend,
    PiecewiseLinearTrend,
    ResidualStats,
    evaluate_components,
    fit,
    flag_outliers,
    model_from_dict,
    model_to_dict,
    predict,
    predict_at,
    refine_period,
    residuals_of,
)
from behavior_auth.errors import (
    LengthMismatch,
    PeriodUnresolved,
    SeriesTooShort,
    SingularDesign,
)
from behavior_auth.series import estimate_period, make_series

from conftest import regular, sinusoid


def dft_harmonics(y, t, period, order):
    """Brute-force projection onto each harmonic on a whole-period grid."""
    m = len(y)
    a = [2.0 / m * sum(y[i] * np.cos(2 * np.pi * n * t[i] / period) for i in range(m))
         for n in range(1, order + 1)]
    b = [2.0 / m * sum(y[i] * np.sin(2 * np.pi * n * t[i] / period) for i in range(m))
         for n in range(1, order + 1)]
    return np.array(a), np.array(b)


def all_coeffs(model):
    s = model.seasonality
    return np.concatenate([s.cos_coeffs, s.sin_coeffs])


# -- fit -------------------------------------------------------------------

def test_fit_constant_series():
    t = regular(4)
    model = fit(make_series(t, np.full(t.size, 5.0)),
                FitConfig(fourier_order=1, period=1.0))
    assert model.trend.intercept == pytest.approx(5.0, abs=1e-9)
    assert abs(model.trend.slope) < 1e-9
    assert np.max(np.abs(all_coeffs(model))) < 1e-6
    assert model.residuals.sigma < 1e-9


def test_fit_sinusoid_matches_dft_oracle():
    t = regular(4)
    y = 2 + np.sin(2 * np.pi * t / 1.0)
    model = fit(make_series(t, y),
                FitConfig(fourier_order=3, period=1.0, seasonality_ridge_lambda=0.0))
    a, b = dft_harmonics(y, t, 1.0, 3)
    assert b[0] == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(model.seasonality.cos_coeffs, a, atol=1e-8)
    np.testing.assert_allclose(model.seasonality.sin_coeffs, b, atol=1e-8)
    assert model.seasonality.sin_coeffs[0] == pytest.approx(1.0, abs=1e-6)
    others = np.concatenate([model.seasonality.cos_coeffs, model.seasonality.sin_coeffs[1:]])
    assert np.max(np.abs(others)) < 1e-6


def test_fit_recovers_logistic_generator():
    rng = np.random.default_rng(5)
    t = regular(10)
    y = 3 / (1 + np.exp(-2 * (t - 5))) + 0.01 * rng.standard_normal(t.size)
    model = fit(make_series(t, y), FitConfig(trend_kind="logistic", period=None))
    assert isinstance(model.trend, LogisticTrend)
    assert model.trend.capacity == pytest.approx(3, rel=0.05)
    assert model.trend.rate == pytest.approx(2, rel=0.05)
    assert model.trend.offset == pytest.approx(5, rel=0.05)


def test_logistic_with_seasonality():
    rng = np.random.default_rng(1)
    t = regular(10)
    y = (4 / (1 + np.exp(-1.5 * (t - 4))) + 0.5 * np.sin(2 * np.pi * t / 0.8)
         + 0.02 * rng.standard_normal(t.size))
    model = fit(make_series(t, y), FitConfig(trend_kind="logistic", period=0.8,
                                             fourier_order=2))
    assert model.trend.capacity == pytest.approx(4, rel=0.05)
    assert model.seasonality.sin_coeffs[0] == pytest.approx(0.5, rel=0.05)


def test_logistic_asymptote():
    trend = LogisticTrend(capacity=3.0, rate=2.0, offset=5.0)
    g = trend(5.0 + 100 / 2.0)
    assert abs(g - 3.0) < 1e-3 * 3.0


def test_fit_too_short():
    with pytest.raises(SeriesTooShort):
        fit(make_series(regular(0.1), np.zeros(5)), FitConfig(period=1.0))


def test_fit_auto_period_failure():
    t = regular(4)
    with pytest.raises(PeriodUnresolved):
        fit(make_series(t, np.full(t.size, 1.0)), FitConfig(period="auto"))


def test_fit_singular_design():
    # Period of two samples: every sine column vanishes on the grid.
    t = regular(2)
    with pytest.raises(SingularDesign):
        fit(make_series(t, np.sin(t)), FitConfig(period=0.04, fourier_order=1,
                                                 seasonality_ridge_lambda=0.0))


def test_fit_auto_period():
    model = fit(sinusoid(6, period=0.8, noise=0.05), FitConfig())
    assert model.seasonality.period == pytest.approx(0.8, abs=0.02)
    assert model.fit_config.period == "auto"


def test_outliers_become_events():
    s = sinusoid(6, noise=0.05, seed=2)
    y = s.values.copy()
    spikes = [37, 120, 251]
    y[spikes] += 5.0
    model = fit(s.with_values(y), FitConfig(period=1.0))
    assert set(spikes) <= {int(round(t * 50)) for t in model.events.times}
    for i in spikes:
        assert model.events(s.timestamps[i]) == pytest.approx(5.0, abs=0.3)
    clean = fit(s, FitConfig(period=1.0))
    fc, fc_clean = predict(model, 50, 0.02), predict(clean, 50, 0.02)
    assert np.max(np.abs(fc.yhat - fc_clean.yhat)) < 0.05


# -- components ------------------------------------------------------------

def _manual_model(trend=None, season=None, events=None):
    return AdditiveModel(
        trend=trend or PiecewiseLinearTrend(0.0, 0.0),
        seasonality=season,
        events=events or EventEffects(),
        residuals=ResidualStats(0.1, {0.1: -0.1, 0.5: 0.0, 0.9: 0.1}, 100),
        train_span=(0.0, 1.0),
        fit_config=FitConfig(period=None),
    )


def test_components_logistic_midpoint():
    model = _manual_model(trend=LogisticTrend(3, 2, 5))
    trend, _, _ = evaluate_components(model, [5.0])
    assert trend[0] == pytest.approx(1.5)


def test_components_fourier_quarter_period():
    model = _manual_model(season=FourierSeasonality(1.0, [0.0], [1.0]))
    _, season, _ = evaluate_components(model, [0.25])
    assert season[0] == pytest.approx(1.0)


def test_components_event_locality():
    model = _manual_model(events=EventEffects([2.0], [0.8], 0.01))
    _, _, events = evaluate_components(model, [2.0, 3.0])
    assert events.tolist() == [0.8, 0.0]


def test_components_piecewise_continuity():
    trend = PiecewiseLinearTrend(1.0, 0.5, ((2.0, -1.0), (3.0, 2.0)), t_ref=0.0)
    for c in (2.0, 3.0):
        left, right = trend([c - 1e-9, c + 1e-9])
        assert abs(left - right) < 1e-8


# -- predict ---------------------------------------------------------------

def test_predict_noise_free_continuation():
    model = fit(sinusoid(4), FitConfig(period=1.0, seasonality_ridge_lambda=0.0))
    fc = predict(model, 100, 0.02)
    assert len(fc) == 100
    assert fc.timestamps[0] == pytest.approx(model.train_span[1] + 0.02)
    assert np.max(np.abs(fc.yhat - np.sin(2 * np.pi * fc.timestamps))) < 1e-4


def test_default_ridge_shrinkage_bound():
    # Harmonics on a whole-period grid shrink by about lam / (n/2); trend
    # coupling adds a term of the same order.
    lam, n = 0.1, 200
    model = fit(sinusoid(4), FitConfig(period=1.0, seasonality_ridge_lambda=lam))
    fc = predict(model, 100, 0.02)
    err = np.max(np.abs(fc.yhat - np.sin(2 * np.pi * fc.timestamps)))
    assert 0 < err <= 2 * lam / (n / 2)


def test_band_positive_and_monotone_in_level():
    model = fit(sinusoid(6, noise=0.1, seed=4), FitConfig(period=1.0))
    widths = []
    for level in (0.5, 0.8, 0.9, 0.95, 0.99):
        fc = predict(model, 50, 0.02, level)
        assert np.all(fc.lower <= fc.yhat) and np.all(fc.yhat <= fc.upper)
        widths.append(fc.upper - fc.lower)
    assert np.all(widths[1] > 0)
    for narrow, wide in zip(widths, widths[1:]):
        assert np.all(wide >= narrow)


def test_band_positive_for_noise_free_model():
    model = fit(sinusoid(4), FitConfig(period=1.0))
    fc = predict(model, 10, 0.02, 0.8)
    assert np.all(fc.upper - fc.lower > 0)


def test_predict_jumping_fixture(jumping):
    model = fit(jumping.x.slice(0, 500), FitConfig())
    fc = predict(model, 100, 0.02)
    assert len(fc) == 100


def test_events_do_not_extend_into_future():
    s = sinusoid(4, noise=0.02, seed=9)
    y = s.values.copy()
    y[-1] += 4.0
    model = fit(s.with_values(y), FitConfig(period=1.0))
    assert s.end in model.events.times
    fc = predict(model, 5, 0.02)
    assert np.all(model.events(fc.timestamps) == 0)
    np.testing.assert_allclose(fc.yhat, model.trend(fc.timestamps) + model.season(fc.timestamps))


# -- flag_outliers ---------------------------------------------------------

def test_flag_single_spike():
    s = make_series(np.arange(6.0), np.zeros(6))
    assert flag_outliers(s, [0, 0, 0, 10, 0, 0], 3.5) == [3]


def test_flag_all_zero():
    s = make_series(np.arange(6.0), np.zeros(6))
    assert flag_outliers(s, np.zeros(6), 3.5) == []


def test_flag_hand_computed_mad():
    # median 3, |dev| = [2,1,0,1,27] -> MAD 1; fence 2 * 1.4826 = 2.9652
    s = make_series(np.arange(5.0), np.zeros(5))
    assert flag_outliers(s, [1, 2, 3, 4, 30], 2.0) == [4]


def test_flag_length_mismatch():
    s = make_series(np.arange(3.0), np.zeros(3))
    with pytest.raises(LengthMismatch):
        flag_outliers(s, [0.0, 1.0], 3.5)


def test_flag_gaussian_high_threshold():
    rng = np.random.default_rng(99)
    s = make_series(np.arange(500.0), np.zeros(500))
    clean = sum(flag_outliers(s, rng.standard_normal(500), 8.0) == [] for _ in range(1000))
    assert clean >= 990


# -- invariants ------------------------------------------------------------

fit_cases = st.fixed_dictionaries({
    "period": st.sampled_from([0.5, 0.8, 1.0, 1.3]),
    "order": st.integers(1, 5),
    "noise": st.floats(0.0, 0.5),
    "slope": st.floats(-0.5, 0.5),
    "seed": st.integers(0, 10_000),
    "outliers": st.booleans(),
    "logistic": st.booleans(),
})


def _fixture_series(case):
    rng = np.random.default_rng(case["seed"])
    t = regular(6)
    y = 1.5 + case["slope"] * t + np.sin(2 * np.pi * t / case["period"])
    y = y + case["noise"] * rng.standard_normal(t.size)
    if case["outliers"]:
        idx = rng.choice(t.size, 4, replace=False)
        y[idx] += rng.choice([-1, 1], 4) * 6.0
    return make_series(t, y)


@settings(max_examples=30, deadline=None)
@given(fit_cases)
def test_reconstruction_and_seasonality_invariants(case):
    s = _fixture_series(case)
    config = FitConfig(period=case["period"], fourier_order=case["order"],
                       trend_kind="logistic" if case["logistic"] else "piecewise_linear")
    model = fit(s, config)
    trend, season, events = evaluate_components(model, s.timestamps)
    resid = residuals_of(model, s)
    np.testing.assert_allclose(trend + season + events + resid, s.values, rtol=0, atol=1e-9)

    P = model.seasonality.period
    probe = np.linspace(-3, 7, 97)
    np.testing.assert_allclose(model.season(probe), model.season(probe + P), atol=1e-9)
    window = np.linspace(0.3, 0.3 + P, 4096, endpoint=False)
    assert abs(np.mean(model.season(window))) < 1e-9

    q = model.residuals.quantiles
    levels = sorted(q)
    assert all(q[a] <= q[b] for a, b in zip(levels, levels[1:]))


def test_ridge_shrinks_fourier_norm():
    s = sinusoid(4, noise=0.2, seed=12)
    norms = []
    for lam in [0.0, 0.1, 1.0, 10.0, 100.0, 1000.0]:
        model = fit(s, FitConfig(period=1.0, seasonality_ridge_lambda=lam,
                                 outlier_mad_threshold=1e6))
        norms.append(np.linalg.norm(all_coeffs(model)))
    assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))
    assert norms[-1] < norms[0]


@pytest.mark.parametrize("order", [1, 3, 5])
def test_oracle_equivalence(order):
    rng = np.random.default_rng(order)
    t = regular(3, rate=40)
    a, b = rng.normal(size=order), rng.normal(size=order)
    n = np.arange(1, order + 1)
    y = 0.7 + np.cos(2 * np.pi * np.outer(t, n)) @ a + np.sin(2 * np.pi * np.outer(t, n)) @ b
    model = fit(make_series(t, y), FitConfig(period=1.0, fourier_order=order,
                                             seasonality_ridge_lambda=0.0))
    oa, ob = dft_harmonics(y, t, 1.0, order)
    np.testing.assert_allclose(model.seasonality.cos_coeffs, oa, atol=1e-8)
    np.testing.assert_allclose(model.seasonality.sin_coeffs, ob, atol=1e-8)


def test_missing_data_robustness():
    sigma = 0.1
    full = sinusoid(10, noise=sigma, seed=21)
    rng = np.random.default_rng(22)
    keep = np.sort(rng.choice(len(full), int(0.8 * len(full)), replace=False))
    holey = make_series(full.timestamps[keep], full.values[keep])
    horizon = full.end + 0.02 * np.arange(1, 101)
    a = predict_at(fit(full, FitConfig(period=1.0)), horizon)
    b = predict_at(fit(holey, FitConfig(period=1.0)), horizon)
    assert np.max(np.abs(a.yhat - b.yhat)) < 5 * sigma


def test_band_widens_with_horizon():
    model = fit(sinusoid(10, noise=0.1, seed=3), FitConfig(period=1.0))
    fc = predict(model, 300, 0.02)
    width = fc.upper - fc.lower
    assert width[-1] > width[0]


def test_model_dict_round_trip():
    s = sinusoid(6, noise=0.1, seed=8)
    y = s.values.copy()
    y[40] += 3
    for kind in ("piecewise_linear", "logistic"):
        model = fit(s.with_values(y), FitConfig(period=1.0, trend_kind=kind))
        back = model_from_dict(model_to_dict(model))
        a, b = predict(model, 20, 0.02), predict(back, 20, 0.02)
        assert np.array_equal(a.yhat, b.yhat)
        assert np.array_equal(a.lower, b.lower) and np.array_equal(a.upper, b.upper)
        assert back.training == model.training


# -- period refinement -----------------------------------------------------

@pytest.mark.parametrize("period", [0.45, 0.83, 1.37])
def test_refine_period_beats_lag_resolution(period):
    s = sinusoid(20, period=period, noise=0.2, seed=8)
    rough = estimate_period(s, 0.2, 2.0).period
    fine = refine_period(s, rough, 0.2, 2.0)
    assert abs(fine - period) < 1e-3
    assert abs(fine - period) <= abs(rough - period) + 1e-12


def test_refine_period_stays_in_range():
    s = sinusoid(6, period=1.0)
    assert 0.9 <= refine_period(s, 0.95, 0.2, 0.96) <= 0.96


def test_fixed_period_is_not_refined():
    model = fit(sinusoid(6, period=1.01, noise=0.05), FitConfig(period=1.0))
    assert model.seasonality.period == 1.0
