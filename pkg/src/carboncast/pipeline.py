"""Two-stage forecasting pipeline and the model-comparison harness.

Stage one fits a univariate year->value SVR per market factor and
extrapolates it to the horizon; emission factors are additionally
conditioned on a policy target by appending the target as a pseudo-
observation (one ordinary sample) before training, so two targets yield
two distinct fits under identical hyperparameters.  Stage two joins the
observed factor histories with their forecasts, aligns them with the
observed price years into a design matrix, trains the multivariate price
SVR and predicts every horizon year per scenario.

Years enter the models as raw integers unless the standardize flag is on;
the flag and the fitted transform are recorded alongside every model.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .baselines import BaselineSpec
from .errors import (CarboncastError, TargetInsidePast, TooFewPoints, YearGap)
from .notation import format_spec, parse_model_string
from .replication import FACTOR_MODEL_STRINGS, PRICE_MODEL_STRING
from .selection import CvReport, FoldPlan, GridSpec, grid_search, loo_plan
from .series import TimeSeries, stitch
from .svm import SolverConfig, SvmHyperParams, SvrModel, predict_svr, train_svr

FACTOR_ORDER = ("oil", "dax", "coal", "gas", "emission")


@dataclass(frozen=True)
class ScenarioSpec:
    label: str
    emission_target_kt: float
    horizon_start: int = 2022
    horizon_end: int = 2030

    def __post_init__(self):
        if self.emission_target_kt <= 0:
            raise ValueError("emission target must be positive")
        if self.horizon_start > self.horizon_end:
            raise ValueError("horizon start must not exceed horizon end")


def parse_scenario_file(path) -> ScenarioSpec:
    """Key-value scenario config: label, emission_target_2030_kt,
    horizon_start, horizon_end; '#' starts a comment line."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CarboncastError(f"{path}: line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    try:
        return ScenarioSpec(label=values["label"],
                            emission_target_kt=float(values["emission_target_2030_kt"]),
                            horizon_start=int(values.get("horizon_start", 2022)),
                            horizon_end=int(values.get("horizon_end", 2030)))
    except KeyError as exc:
        raise CarboncastError(f"{path}: missing scenario key {exc}")


@dataclass
class ColumnTransform:
    """Affine per-column feature map (x - mean) / scale; identity when off."""
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray, enabled: bool) -> "ColumnTransform":
        if not enabled:
            return cls(mean=np.zeros(X.shape[1]), scale=np.ones(X.shape[1]))
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0.0] = 1.0
        return cls(mean=mean, scale=scale)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}


@dataclass
class FactorForecast:
    """Forecast continuation of one factor plus everything that made it."""
    series: TimeSeries           # provenance 'forecast', horizon years only
    model: SvrModel
    spec: SvmHyperParams
    standardize: bool
    transform: ColumnTransform
    anchor: Optional[TimeSeries] = None   # target pseudo-observation, if any

    @property
    def spec_string(self) -> str:
        return format_spec(self.spec)


def _train_year_model(years, values, spec, standardize, solver):
    X = np.asarray(years, dtype=float)[:, None]
    transform = ColumnTransform.fit(X, standardize)
    model = train_svr(transform.apply(X), np.asarray(values, dtype=float),
                      spec, solver)
    return model, transform


def forecast_factor(series: TimeSeries, spec: SvmHyperParams, horizon_end: int,
                    standardize: bool = False,
                    solver: Optional[SolverConfig] = None) -> FactorForecast:
    """Fit year->value SVR on all observed points and extrapolate."""
    if len(series.points) < 3:
        raise TooFewPoints(f"{series.name}: need at least 3 observed points, "
                           f"got {len(series.points)}")
    if horizon_end <= series.last_year:
        raise ValueError(f"horizon {horizon_end} does not extend beyond the "
                         f"observed range (last year {series.last_year})")
    model, transform = _train_year_model(series.years, series.values, spec,
                                         standardize, solver)
    horizon = list(range(series.last_year + 1, horizon_end + 1))
    Xq = transform.apply(np.asarray(horizon, dtype=float)[:, None])
    preds = predict_svr(model, Xq)
    out = TimeSeries(name=series.name, unit=series.unit,
                     points=tuple(zip(horizon, (float(v) for v in preds))),
                     provenance="forecast")
    return FactorForecast(series=out, model=model, spec=spec,
                          standardize=standardize, transform=transform)


def build_emission_scenario(series: TimeSeries, scenario: ScenarioSpec,
                            spec: SvmHyperParams, standardize: bool = False,
                            solver: Optional[SolverConfig] = None,
                            anchor_weight: float = 1.0) -> FactorForecast:
    """Forecast the emission factor conditioned on a policy target.

    The target enters as one pseudo-observation (year horizon_end, the
    target value) appended to the training set; by default it carries the
    weight of one ordinary sample (anchor_weight scales its cost share).
    The returned record keeps the anchor with its own provenance.
    """
    if len(series.points) < 3:
        raise TooFewPoints(f"{series.name}: need at least 3 observed points")
    if scenario.horizon_end <= series.last_year:
        raise TargetInsidePast(
            f"target year {scenario.horizon_end} is not beyond the observed "
            f"range (last year {series.last_year})")
    if anchor_weight <= 0:
        raise ValueError("anchor_weight must be positive")
    anchor = TimeSeries(name=f"{series.name}_target_{scenario.label}",
                        unit=series.unit,
                        points=((scenario.horizon_end, scenario.emission_target_kt),),
                        provenance="target_anchor")
    years = series.years + [scenario.horizon_end]
    values = series.values + [scenario.emission_target_kt]
    weights = np.ones(len(years))
    weights[-1] = anchor_weight
    X = np.asarray(years, dtype=float)[:, None]
    transform = ColumnTransform.fit(X, standardize)
    model = train_svr(transform.apply(X), np.asarray(values, dtype=float),
                      spec, solver, sample_weight=weights)
    horizon = list(range(series.last_year + 1, scenario.horizon_end + 1))
    Xq = transform.apply(np.asarray(horizon, dtype=float)[:, None])
    preds = predict_svr(model, Xq)
    out = TimeSeries(name=series.name, unit=series.unit,
                     points=tuple(zip(horizon, (float(v) for v in preds))),
                     provenance="forecast")
    return FactorForecast(series=out, model=model, spec=spec,
                          standardize=standardize, transform=transform,
                          anchor=anchor)


@dataclass
class DesignMatrix:
    """Factor columns aligned on one year axis; the observed price years
    form the contiguous training prefix."""
    years: tuple
    factor_names: tuple
    columns: dict                 # name -> tuple of values over `years`
    target: tuple                 # observed prices, aligned to years[:len(target)]

    @property
    def n_train(self) -> int:
        return len(self.target)

    @property
    def train_X(self) -> np.ndarray:
        return self._X()[:self.n_train]

    @property
    def query_X(self) -> np.ndarray:
        return self._X()[self.n_train:]

    @property
    def query_years(self) -> tuple:
        return self.years[self.n_train:]

    def _X(self) -> np.ndarray:
        return np.column_stack([self.columns[name] for name in self.factor_names])


def assemble_design(factors: dict, price: TimeSeries) -> DesignMatrix:
    """Inner-join factor series on the year axis.

    The year range runs from the first observed price year to the last
    year covered by every factor; any factor missing any year in that
    range fails with the full list of (factor, year) gaps.
    """
    names = tuple(factors.keys())
    if not names:
        raise ValueError("no factor series supplied")
    price_years = price.years
    if price_years[-1] - price_years[0] + 1 != len(price_years):
        missing = sorted(set(range(price_years[0], price_years[-1] + 1))
                         - set(price_years))
        raise YearGap([("price", y) for y in missing])

    last_common = min(ts.last_year for ts in factors.values())
    years = list(range(price.first_year, max(last_common, price.last_year) + 1))
    lookup = {name: dict(ts.points) for name, ts in factors.items()}
    gaps = [(name, year) for name in names for year in years
            if year not in lookup[name]]
    if gaps:
        raise YearGap(sorted(gaps))

    columns = {name: tuple(lookup[name][year] for year in years) for name in names}
    return DesignMatrix(years=tuple(years), factor_names=names,
                        columns=columns, target=tuple(price.values))


@dataclass
class ScenarioForecast:
    scenario: ScenarioSpec
    factor_forecasts: list       # stitched full-range TimeSeries per factor
    price_by_year: list          # [(year, EUR)] over the scenario horizon
    model: SvrModel
    spec: SvmHyperParams
    transform: ColumnTransform
    model_report: Optional[CvReport] = None

    @property
    def spec_string(self) -> str:
        return format_spec(self.spec)


def forecast_price(scenario_designs: list, spec: SvmHyperParams,
                   standardize: bool = False,
                   solver: Optional[SolverConfig] = None,
                   factor_series: Optional[dict] = None) -> list:
    """Train the price model per scenario design and predict the horizon.

    scenario_designs pairs each ScenarioSpec with its DesignMatrix (the
    emission column differs between scenarios, the rest coincide).
    """
    out = []
    for scenario, design in scenario_designs:
        X_train = design.train_X
        transform = ColumnTransform.fit(X_train, standardize)
        model = train_svr(transform.apply(X_train), np.asarray(design.target),
                          spec, solver)
        query_years = [y for y in design.query_years
                       if scenario.horizon_start <= y <= scenario.horizon_end]
        if list(query_years) != list(range(scenario.horizon_start,
                                           scenario.horizon_end + 1)):
            raise YearGap([(
                "design", y) for y in range(scenario.horizon_start,
                                            scenario.horizon_end + 1)
                if y not in design.query_years])
        idx = [design.query_years.index(y) for y in query_years]
        preds = predict_svr(model, transform.apply(design.query_X[idx]))
        price_by_year = [(int(y), float(p)) for y, p in zip(query_years, preds)]
        series_list = []
        if factor_series:
            series_list = [factor_series[scenario.label][name]
                           for name in design.factor_names]
        out.append(ScenarioForecast(scenario=scenario,
                                    factor_forecasts=series_list,
                                    price_by_year=price_by_year, model=model,
                                    spec=spec, transform=transform))
    return out


# --- whole-pipeline orchestration -------------------------------------------


def default_factor_specs() -> dict:
    return {name: parse_model_string(FACTOR_MODEL_STRINGS[name])
            for name in FACTOR_ORDER}


def default_price_spec() -> SvmHyperParams:
    return parse_model_string(PRICE_MODEL_STRING)


@dataclass
class PipelineResult:
    factor_forecasts: dict        # name -> FactorForecast (market factors)
    emission_forecasts: dict      # scenario label -> FactorForecast
    scenario_forecasts: list      # ScenarioForecast per scenario
    stitched: dict                # label -> {factor -> TimeSeries}
    price_spec: SvmHyperParams
    standardize: bool


def run_pipeline(data: dict, scenarios: list,
                 factor_specs: Optional[dict] = None,
                 price_spec: Optional[SvmHyperParams] = None,
                 standardize: bool = False,
                 solver: Optional[SolverConfig] = None,
                 anchor_weight: float = 1.0) -> PipelineResult:
    """End-to-end run: factor forecasts, emission scenarios, price grids.

    data maps 'oil', 'dax', 'coal', 'gas', 'emission' and 'price' to
    observed TimeSeries; scenarios is a list of ScenarioSpec.
    """
    missing = [k for k in (*FACTOR_ORDER, "price") if k not in data]
    if missing:
        raise CarboncastError(f"missing input series: {', '.join(missing)}")
    factor_specs = factor_specs or default_factor_specs()
    price_spec = price_spec or default_price_spec()
    horizon_end = max(s.horizon_end for s in scenarios)

    market = {}
    for name in ("oil", "dax", "coal", "gas"):
        market[name] = forecast_factor(data[name], factor_specs[name],
                                       horizon_end, standardize, solver)

    emission_by_label = {}
    for scenario in scenarios:
        emission_by_label[scenario.label] = build_emission_scenario(
            data["emission"], scenario, factor_specs["emission"],
            standardize, solver, anchor_weight=anchor_weight)

    stitched = {}
    scenario_designs = []
    for scenario in scenarios:
        per_factor = {name: stitch(data[name], market[name].series)
                      for name in ("oil", "dax", "coal", "gas")}
        per_factor["emission"] = stitch(data["emission"],
                                        emission_by_label[scenario.label].series)
        stitched[scenario.label] = per_factor
        design = assemble_design({name: per_factor[name] for name in FACTOR_ORDER},
                                 data["price"])
        scenario_designs.append((scenario, design))

    scenario_forecasts = forecast_price(scenario_designs, price_spec,
                                        standardize, solver,
                                        factor_series=stitched)
    return PipelineResult(factor_forecasts=market,
                          emission_forecasts=emission_by_label,
                          scenario_forecasts=scenario_forecasts,
                          stitched=stitched, price_spec=price_spec,
                          standardize=standardize)


# --- model-comparison harness ------------------------------------------------

DEFAULT_LAMBDA_GRID = (1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0)
DEFAULT_POLY_DEGREE = 2

FAMILY_NAMES = ("svr", "simple_linear", "lasso", "ridge", "polynomial")


def default_svr_grid() -> tuple:
    """Comparison candidates: the five per-factor reference models plus a
    small generic C sweep over both kernels."""
    seen = []
    for name in FACTOR_ORDER:
        spec = parse_model_string(FACTOR_MODEL_STRINGS[name])
        if spec not in seen:
            seen.append(spec)
    for C in (1.0, 100.0):
        for kernel in ("linear", "rbf"):
            spec = parse_model_string(f"SVR(C={C}, kernel='{kernel}')")
            if spec not in seen:
                seen.append(spec)
    return tuple(seen)


@dataclass
class FamilyResult:
    family: str
    best_spec_string: str
    best_score: float
    report: CvReport


@dataclass
class ComparisonTable:
    series_name: str
    rows: list                    # FamilyResult per family, fixed order

    def best_scores(self) -> dict:
        return {row.family: row.best_score for row in self.rows}

    def to_dict(self) -> dict:
        return {
            "series": self.series_name,
            "scoring": "neg_mean_squared_error",
            "families": [
                {"family": r.family, "best_spec": r.best_spec_string,
                 "best_score": r.best_score,
                 "candidates": r.report.to_dict()["candidates"]}
                for r in self.rows
            ],
        }


def compare_models(series: TimeSeries, plan: Optional[FoldPlan] = None,
                   families=FAMILY_NAMES,
                   svr_grid: Optional[tuple] = None,
                   lambda_grid=DEFAULT_LAMBDA_GRID,
                   poly_degree: int = DEFAULT_POLY_DEGREE,
                   workers: Optional[int] = None) -> ComparisonTable:
    """Best cross-validated neg-MSE per model family on one factor series."""
    if len(series.points) < 3:
        raise TooFewPoints(f"{series.name}: need at least 3 points to compare")
    X = np.asarray(series.years, dtype=float)[:, None]
    y = np.asarray(series.values, dtype=float)
    plan = plan or loo_plan(len(y))
    grids = {
        "svr": tuple(svr_grid) if svr_grid is not None else default_svr_grid(),
        "simple_linear": (BaselineSpec("ols"),),
        "lasso": tuple(BaselineSpec("lasso", lam=l) for l in lambda_grid),
        "ridge": tuple(BaselineSpec("ridge", lam=l) for l in lambda_grid),
        "polynomial": (BaselineSpec("polynomial", degree=poly_degree),),
    }
    rows = []
    for family in families:
        report = grid_search(GridSpec(grids[family]), X, y, plan, workers=workers)
        rows.append(FamilyResult(family=family,
                                 best_spec_string=report.best.spec_string,
                                 best_score=report.best.mean_score,
                                 report=report))
    return ComparisonTable(series_name=series.name, rows=rows)
