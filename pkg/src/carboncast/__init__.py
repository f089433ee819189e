"""Support-vector toolkit and carbon-price forecasting pipeline.

From-scratch soft-margin SVM classification and epsilon-insensitive SVR
over linear/RBF/polynomial kernels, solved through a dense box+equality
QP engine (compiled core with a pure-Python fallback), with k-fold /
leave-one-out cross-validated grid search, four baseline regressors, and
a two-stage scenario-conditioned yearly carbon-price forecasting
pipeline driven from CSV inputs.
"""

__version__ = "0.1.0"

from .baselines import BaselineSpec, LinearModel, fit_baseline, predict_baseline
from .kernels import KernelSpec, eval_kernel, gram_matrix, kernel_matrix, resolve_gamma
from .notation import format_model_string, format_spec, parse_model_string
from .pipeline import (ScenarioSpec, assemble_design, build_emission_scenario,
                       compare_models, forecast_factor, forecast_price,
                       run_pipeline)
from .qp import QpProblem, QpSolution, backend_name, condition_regularize, solve_qp
from .selection import (CvReport, FoldPlan, GridSpec, cv_score, grid_search,
                        loo_plan, make_folds)
from .serialize import load_model, save_model
from .series import TimeSeries, load_series, write_series
from .svm import (SolverConfig, SvcModel, SvmHyperParams, SvrModel,
                  decision_function, decision_values, predict_svr, train_svc,
                  train_svr)

__all__ = [name for name in dir() if not name.startswith("_")]
