import numpy as np
import pytest

from carboncast.errors import TargetInsidePast, TooFewPoints, YearGap
from carboncast.fixtures import generate_all
from carboncast.kernels import KernelSpec
from carboncast.notation import parse_model_string
from carboncast.pipeline import (ScenarioSpec, assemble_design,
                                 build_emission_scenario, compare_models,
                                 default_factor_specs, default_price_spec,
                                 forecast_factor, forecast_price,
                                 parse_scenario_file, run_pipeline)
from carboncast.series import TimeSeries, stitch
from carboncast.svm import SvmHyperParams

from oracles import join_years, ols_line_through

DATA = generate_all()
SCENARIOS = [ScenarioSpec("target1", 2137554.0), ScenarioSpec("target2", 1603165.5)]


def series_from(years, values, name="s", unit=""):
    return TimeSeries(name=name, unit=unit,
                      points=tuple(zip([int(y) for y in years],
                                       [float(v) for v in values])))


# --- forecast_factor ------------------------------------------------------------


def test_constant_series_forecasts_inside_tube():
    ts = series_from(range(2000, 2010), [7.0] * 10)
    spec = SvmHyperParams(C=10.0, epsilon=0.5, kernel=KernelSpec("rbf", 0.5))
    out = forecast_factor(ts, spec, 2015)
    assert out.series.years == list(range(2010, 2016))
    assert all(abs(v - 7.0) <= 0.5 for v in out.series.values)
    assert out.series.provenance == "forecast"


def test_exact_line_continues():
    years = list(range(2000, 2012))
    ts = series_from(years, [2.0 * (y - 2000) + 5.0 for y in years])
    spec = parse_model_string("SVR(C=100, epsilon=0.01, kernel='linear')")
    out = forecast_factor(ts, spec, 2021)
    # +9 years beyond the data: 2*(21) + 5 = 47
    assert out.series.value_at(2021) == pytest.approx(47.0, abs=0.05)


def test_reference_rbf_configuration_on_oil_fixture():
    spec = parse_model_string("SVR(C=42, epsilon=0.5, gamma='scale', kernel='rbf')")
    out = forecast_factor(DATA["oil"], spec, 2030)
    assert out.model.diagnostics.converged
    v2030 = out.series.value_at(2030)
    assert np.isfinite(v2030)
    assert out.series.years == list(range(2022, 2031))


def test_too_few_points_and_bad_horizon():
    ts = series_from([2000, 2001], [1.0, 2.0])
    spec = default_factor_specs()["oil"]
    with pytest.raises(TooFewPoints):
        forecast_factor(ts, spec, 2030)
    ts3 = series_from([2000, 2001, 2002], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        forecast_factor(ts3, spec, 2002)


def test_standardize_flag_recorded_and_transform_applied():
    ts = DATA["gas"]
    spec = parse_model_string("SVR(C=48, gamma='auto', epsilon=0.5, kernel='linear')")
    raw = forecast_factor(ts, spec, 2030, standardize=False)
    std = forecast_factor(ts, spec, 2030, standardize=True)
    assert raw.transform.mean[0] == 0.0 and raw.transform.scale[0] == 1.0
    assert std.transform.mean[0] != 0.0
    assert std.standardize and not raw.standardize


# --- build_emission_scenario -----------------------------------------------------


def emission_spec():
    return parse_model_string(
        "SVR(C=3878, epsilon=0.00001, gamma='auto', kernel='linear')")


def test_constant_series_with_matching_target():
    ts = series_from(range(2000, 2015), [100.0] * 15, name="emission")
    scenario = ScenarioSpec("flat", 100.0, 2015, 2030)
    out = build_emission_scenario(ts, scenario,
                                  SvmHyperParams(C=10.0, epsilon=0.5,
                                                 kernel=KernelSpec("linear")))
    assert all(abs(v - 100.0) <= 0.5 + 1e-6 for v in out.series.values)
    assert out.anchor.provenance == "target_anchor"
    assert out.anchor.points == ((2030, 100.0),)


def test_fixture_scenario_monotone_and_near_ols_anchor_oracle():
    out = build_emission_scenario(DATA["emission"], SCENARIOS[0], emission_spec())
    values = out.series.values
    assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))  # non-increasing
    # OLS through observed points + anchor as the independent reference
    years = DATA["emission"].years + [2030]
    vals = DATA["emission"].values + [SCENARIOS[0].emission_target_kt]
    line = ols_line_through(years, vals)
    for year in out.series.years:
        assert abs(out.series.value_at(year) - line(year)) / abs(line(year)) < 0.05


def test_lower_target_gives_strictly_lower_2030_forecast():
    hi = build_emission_scenario(DATA["emission"], SCENARIOS[0], emission_spec())
    lo = build_emission_scenario(DATA["emission"], SCENARIOS[1], emission_spec())
    assert lo.series.value_at(2030) < hi.series.value_at(2030)


def test_target_inside_past_rejected():
    ts = series_from(range(2000, 2031), range(31), name="emission")
    with pytest.raises(TargetInsidePast):
        build_emission_scenario(ts, ScenarioSpec("bad", 5.0, 2020, 2030),
                                emission_spec())


def test_anchor_weight_pulls_forecast_toward_target():
    scenario = SCENARIOS[1]
    w1 = build_emission_scenario(DATA["emission"], scenario, emission_spec(),
                                 anchor_weight=1.0)
    w50 = build_emission_scenario(DATA["emission"], scenario, emission_spec(),
                                  anchor_weight=50.0)
    gap1 = abs(w1.series.value_at(2030) - scenario.emission_target_kt)
    gap50 = abs(w50.series.value_at(2030) - scenario.emission_target_kt)
    assert gap50 < gap1


# --- assemble_design --------------------------------------------------------------


def full_factors(horizon_end=2030):
    specs = default_factor_specs()
    stitched = {}
    for name in ("oil", "dax", "coal", "gas"):
        fc = forecast_factor(DATA[name], specs[name], horizon_end)
        stitched[name] = stitch(DATA[name], fc.series)
    em = build_emission_scenario(DATA["emission"], SCENARIOS[0], emission_spec())
    stitched["emission"] = stitch(DATA["emission"], em.series)
    return stitched


def test_design_training_and_query_split():
    design = assemble_design(full_factors(), DATA["price"])
    assert design.n_train == 15          # observed prices 2007-2021
    assert len(design.query_years) == 9  # 2022-2030
    assert design.years[0] == 2007 and design.years[-1] == 2030
    assert design.train_X.shape == (15, 5)
    assert design.query_X.shape == (9, 5)


def test_missing_year_reported_as_gap():
    factors = full_factors()
    pts = tuple(p for p in factors["gas"].points if p[0] != 2025)
    factors["gas"] = TimeSeries("gas", "", points=pts, provenance="forecast")
    with pytest.raises(YearGap) as err:
        assemble_design(factors, DATA["price"])
    assert ("gas", 2025) in err.value.missing


def test_alignment_matches_join_oracle():
    factors = full_factors()
    design = assemble_design(factors, DATA["price"])
    named = {name: list(ts.points) for name, ts in factors.items()}
    joined = join_years(named)
    for name in factors:
        ours = list(zip(design.years, design.columns[name]))
        start = joined[name].index(ours[0])
        assert joined[name][start:start + len(ours)] == ours


def test_price_gap_detected():
    pts = tuple(p for p in DATA["price"].points if p[0] != 2014)
    price = TimeSeries("price", "EUR", points=pts)
    with pytest.raises(YearGap) as err:
        assemble_design(full_factors(), price)
    assert ("price", 2014) in err.value.missing


# --- forecast_price ---------------------------------------------------------------


def test_price_linear_in_single_factor():
    years = list(range(2007, 2031))
    n_train = 15
    driver = np.linspace(10.0, 56.0, len(years))
    factors = {
        "oil": series_from(years, driver),
        "dax": series_from(years, np.full(len(years), 9000.0)),
        "coal": series_from(years, np.full(len(years), 80.0)),
        "gas": series_from(years, np.full(len(years), 40.0)),
        "emission": series_from(years, np.full(len(years), 3e6)),
    }
    price = series_from(years[:n_train], 2.0 * driver[:n_train] + 3.0)
    design = assemble_design(factors, price)
    scenario = ScenarioSpec("lin", 3e6, 2022, 2030)
    spec = SvmHyperParams(C=100.0, epsilon=1e-3, kernel=KernelSpec("linear"))
    [result] = forecast_price([(scenario, design)], spec)
    for year, pred in result.price_by_year:
        idx = years.index(year)
        truth = 2.0 * driver[idx] + 3.0
        assert abs(pred - truth) / truth < 0.01


def test_identical_scenarios_identical_forecasts():
    design = assemble_design(full_factors(), DATA["price"])
    s1 = ScenarioSpec("a", 2137554.0)
    s2 = ScenarioSpec("b", 2137554.0)
    spec = default_price_spec()
    r1, r2 = forecast_price([(s1, design), (s2, design)], spec)
    assert [p for _, p in r1.price_by_year] == [p for _, p in r2.price_by_year]


# --- run_pipeline -----------------------------------------------------------------


def test_end_to_end_shapes_and_ordering():
    result = run_pipeline(DATA, SCENARIOS)
    assert len(result.scenario_forecasts) == 2
    for sf in result.scenario_forecasts:
        years = [y for y, _ in sf.price_by_year]
        assert years == list(range(2022, 2031))
        assert all(np.isfinite(p) for _, p in sf.price_by_year)
    em1 = result.emission_forecasts["target1"].series.value_at(2030)
    em2 = result.emission_forecasts["target2"].series.value_at(2030)
    assert em2 < em1


def test_end_to_end_deterministic():
    r1 = run_pipeline(DATA, SCENARIOS)
    r2 = run_pipeline(DATA, SCENARIOS)
    for a, b in zip(r1.scenario_forecasts, r2.scenario_forecasts):
        assert a.price_by_year == b.price_by_year
    for label in r1.emission_forecasts:
        assert (r1.emission_forecasts[label].series.points
                == r2.emission_forecasts[label].series.points)


def test_observed_points_pass_through_untouched():
    result = run_pipeline(DATA, SCENARIOS)
    for label, per_factor in result.stitched.items():
        for name in ("oil", "dax", "coal", "gas", "emission"):
            observed = DATA[name].points
            assert per_factor[name].points[:len(observed)] == observed


def test_missing_series_rejected():
    data = dict(DATA)
    del data["gas"]
    with pytest.raises(Exception, match="gas"):
        run_pipeline(data, SCENARIOS)


# --- scenario files ----------------------------------------------------------------


def test_parse_scenario_file(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text("# demo\nlabel = demo\nemission_target_2030_kt = 2137554\n"
                    "horizon_start = 2022\nhorizon_end = 2030\n")
    s = parse_scenario_file(path)
    assert s == ScenarioSpec("demo", 2137554.0, 2022, 2030)


def test_scenario_validation():
    with pytest.raises(ValueError):
        ScenarioSpec("x", -5.0)
    with pytest.raises(ValueError):
        ScenarioSpec("x", 5.0, 2031, 2030)


# --- compare_models -----------------------------------------------------------------


def test_compare_on_pure_line_all_families_near_zero():
    years = list(range(2000, 2012))
    ts = series_from(years, [3.0 * (y - 2000) + 1.0 for y in years])
    table = compare_models(ts)
    scores = table.best_scores()
    for family in ("svr", "simple_linear", "ridge", "lasso", "polynomial"):
        assert scores[family] > -1e-4


def test_compare_on_sine_svr_rbf_beats_ols():
    years = np.arange(2000, 2016)
    values = 10.0 * np.sin((years - 2000) / 2.0) + 50.0
    ts = series_from(years, values)
    table = compare_models(ts)
    scores = table.best_scores()
    assert scores["svr"] > scores["simple_linear"]
    best_svr = next(r for r in table.rows if r.family == "svr")
    assert "rbf" in best_svr.best_spec_string


def test_compare_table_deterministic():
    t1 = compare_models(DATA["gas"])
    t2 = compare_models(DATA["gas"])
    assert t1.to_dict() == t2.to_dict()


def test_compare_rejects_tiny_series():
    with pytest.raises(TooFewPoints):
        compare_models(series_from([2000, 2001], [1.0, 2.0]))
