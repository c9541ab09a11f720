import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracheat import holder_estimator as he
from fracheat import spde_solver as sp
from fracheat.errors import DegenerateDataError, InputError, ParameterError, RangeError, UsageError
from fracheat.grid import GridSpec


def table(lags, moments, k=2, axis="space", stderrs=None):
    lags = np.asarray(lags, float)
    m = np.asarray(moments, float)
    return he.MomentTable(axis, k, lags, m, np.zeros_like(m) if stderrs is None else np.asarray(stderrs))


def test_cosine_field_structure_function():
    g = GridSpec(8.0, 256)
    x = g.x()
    u = np.cos(2 * np.pi * x / 8.0)
    fields = np.stack([u, u])
    lags = np.arange(4, 33) * g.dx
    tab = he.spatial_structure(fields, 2, lags, g)
    # mean over x of (cos(a + b) - cos a)^2 = 1 - cos b
    assert np.allclose(tab.moments, 1 - np.cos(2 * np.pi * lags / 8.0), atol=1e-14)
    assert np.all(tab.stderrs < 1e-14)
    assert he.spatial_structure(fields, 2, [0.0], g).moments[0] == 0.0


def test_window_and_input_checks():
    g = GridSpec(8.0, 256)
    f = np.zeros((3, 256))
    with pytest.raises(ParameterError):
        he.spatial_structure(f, 2, [g.dx], g)
    with pytest.raises(ParameterError):
        he.spatial_structure(f, 2, [2.0], g)
    assert he.lag_window(g) == (4 * g.dx, 1.0)
    he.spatial_structure(f, 2, [g.dx], g, check_window=False)
    with pytest.raises(InputError):
        he.spatial_structure(np.zeros((0, 256)), 2, [0.25], g)
    with pytest.raises(InputError):
        he.spatial_structure(np.zeros((2, 128)), 2, [0.25], g)
    with pytest.raises(InputError):
        he.MomentTable("space", 2, np.array([2.0, 1.0]), np.ones(2), np.zeros(2))
    with pytest.raises(ParameterError):
        he.MomentTable("depth", 2, np.array([1.0]), np.ones(1), np.zeros(1))


def test_jackknife_equals_standard_error():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(50, 3))
    mean, err = he._jackknife(a)
    assert np.allclose(mean, a.mean(axis=0))
    assert np.allclose(err, a.std(axis=0, ddof=1) / math.sqrt(50))


def test_fit_examples():
    lags = np.geomspace(0.1, 1.0, 8)
    fit = he.fit_exponent(table(lags, lags), (0.1, 1.0))
    assert fit.slope == pytest.approx(1.0, abs=1e-12)
    assert fit.intercept == pytest.approx(0.0, abs=1e-12)
    fit = he.fit_exponent(table(lags, 2 * lags**0.5), (0.1, 1.0))
    assert fit.slope == pytest.approx(0.5, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(2), abs=1e-12)
    assert fit.n_points == 8 and fit.slope_stderr < 1e-7


def test_fit_degenerate():
    lags = np.geomspace(0.1, 1.0, 8)
    with pytest.raises(DegenerateDataError):
        he.fit_exponent(table(lags, lags), (0.1, 0.2))
    m = lags.copy()
    m[3] = 0.0
    with pytest.raises(DegenerateDataError):
        he.fit_exponent(table(lags, m), (0.1, 1.0))


@given(st.floats(0.1, 3.0), st.floats(0.01, 100.0))
@settings(max_examples=40, deadline=None)
def test_fit_recovers_power_law(p, c):
    lags = np.geomspace(1e-3, 1e-1, 10)
    fit = he.fit_exponent(table(lags, c * lags**p), (1e-3, 1e-1))
    assert fit.slope == pytest.approx(p, abs=1e-9)
    assert math.exp(fit.intercept) == pytest.approx(c, rel=1e-9)


def test_theorem_bound_examples():
    b = he.theorem_bounds(2.0, 0.5, 0.9)
    assert b.c_sup == pytest.approx(0.5) and b.d_sup == pytest.approx(0.375)
    assert b.b_sup == pytest.approx(0.5) and b.temporal_applicable
    b = he.theorem_bounds(1.5, 0.5, 0.9)
    assert b.c_sup == pytest.approx(0.25) and b.d_sup == pytest.approx(1 / 3)
    b = he.theorem_bounds(1.5, 0.9, 0.9)
    assert not b.temporal_applicable
    assert he.theorem_bounds(1.5, 0.5, 0.1).c_sup == pytest.approx(0.1)
    assert he.theorem_bounds(1.5, 0.5, 0.1).d_sup == pytest.approx(0.1 / 1.5)


@pytest.mark.parametrize("args,word", [((1.0, 0.5, 1.0), "alpha"), ((2.1, 0.5, 1.0), "alpha"),
                                       ((1.5, 1.0, 1.0), "beta"), ((1.5, 0.5, 0.0), "rho"),
                                       ((1.5, 0.5, 1.0, 1), "k")])
def test_theorem_bound_ranges(args, word):
    with pytest.raises(RangeError, match=word):
        he.theorem_bounds(*args)


def fit_of(slope, se=0.0, axis="space", k=2):
    return he.ExponentFit(slope, 0.0, se, (0.1, 1.0), axis, k, 8)


def test_consistency_report():
    b = he.theorem_bounds(1.5, 0.5, 1.0)
    ok = he.consistency_report(fit_of(1.0), b)
    assert ok.passed and ok.status == "PASS" and ok.details["target"] == pytest.approx(2 * 0.23)
    bad = he.consistency_report(fit_of(0.3, 0.01), b)
    assert not bad.passed and bad.violations == 1
    # two standard errors rescue a marginal slope
    assert he.consistency_report(fit_of(0.44, 0.02), b).passed
    t = he.consistency_report(fit_of(0.7, axis="time"), b)
    assert t.passed and t.applicable
    na = he.consistency_report(fit_of(0.7, axis="time"), he.theorem_bounds(1.5, 0.9, 1.0))
    assert na.status == "N/A"
    with pytest.raises(UsageError):
        he.consistency_report(fit_of(1.0, k=4), b)
    with pytest.raises(UsageError):
        he.consistency_report(fit_of(1.0), b, k=4)
    with pytest.raises(UsageError):
        he.consistency_report(fit_of(1.0), b, axis="time")


def test_jensen_and_monotonicity():
    lags = [1.0, 2.0, 3.0]
    two = table(lags, [1.0, 2.0, 3.0])
    four = table(lags, [3.0, 12.0, 27.0], k=4)
    assert he.jensen_violations(two, four) == 0
    assert he.jensen_violations(two, table(lags, [0.5, 12.0, 1.0], k=4)) == 2
    with pytest.raises(UsageError):
        he.jensen_violations(two, two)
    assert he.monotonicity_violations(two) == 0
    assert he.monotonicity_violations(table(lags, [1.0, 0.5, 3.0])) == 1
    assert he.monotonicity_violations(table(lags, [1.0, 0.9, 3.0], stderrs=[0.1, 0.1, 0.1])) == 0


def test_log_lags():
    out = he.log_lags(0.125, 0.5, 0.03125, count=20)
    assert out[0] == pytest.approx(0.125) and out[-1] == pytest.approx(0.5)
    assert np.all(np.diff(out) > 0)
    assert np.allclose(out / 0.03125, np.round(out / 0.03125))


def small_ensemble(paths, seed=0):
    m = sp.ModelSpec(1.5, 0.5, sp.Sigma("constant"))
    c = sp.SolverConfig(GridSpec(16.0, 128, 2e-3, 0.1), snapshot_times=(0.05, 0.06, 0.07, 0.1),
                        path_count=paths, seed_base=seed)
    return sp.simulate_ensemble(m, c), c


def test_temporal_structure_and_missing_snapshot():
    ens, c = small_ensemble(8)
    tab = he.temporal_structure(ens, 0.05, 2, [0.0, 0.01, 0.02])
    assert tab.moments[0] == 0.0 and np.all(tab.moments[1:] > 0)
    direct = np.mean((ens.at(0.07) - ens.at(0.05)) ** 2)
    assert tab.moments[2] == pytest.approx(direct, rel=1e-12)
    with pytest.raises(InputError):
        he.temporal_structure(ens, 0.05, 2, [0.03])
    with pytest.raises(ParameterError):
        he.temporal_structure(ens, 0.05, 2, [0.01], burn_in=0.06)


def test_stderr_halves_with_four_times_paths():
    lags = np.arange(4, 17) * 0.125
    e1, c = small_ensemble(100)
    e4, _ = small_ensemble(400)
    s1 = he.spatial_structure(e1.at(0.1), 2, lags, c.grid).stderrs
    s4 = he.spatial_structure(e4.at(0.1), 2, lags, c.grid).stderrs
    assert np.median(s4 / s1) == pytest.approx(0.5, abs=0.1)


def test_csv_round_trip():
    t = table([0.5, 1.0], [0.1, 1 / 3], stderrs=[0.0, 0.01])
    text = t.to_csv()
    lines = text.strip().splitlines()
    assert lines[0].startswith("axis")
    assert repr(1 / 3) in text
