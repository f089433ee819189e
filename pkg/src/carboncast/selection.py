"""Cross-validation and exhaustive grid search with neg-MSE scoring.

Fold assignment uses the package's own LCG (see carboncast.rng) so the same
(n, k, seed) triple reproduces the same folds everywhere; k = n always
yields the seed-independent leave-one-out plan.  A candidate spec may be an
SvmHyperParams, a BaselineSpec, or any object with fit(X, y) returning a
model exposing predict(X).

Scores are negative mean squared errors, one per held-out fold, combined
as an unweighted mean (fold sizes may differ by one; the simple mean is the
documented choice).  A candidate whose training fails on any fold scores
-inf rather than aborting the sweep, so wide hyperparameter grids survive
degenerate corners.  Candidates are independent: evaluating them in
parallel threads yields bit-identical reports.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .baselines import BaselineSpec, fit_baseline, predict_baseline
from .errors import BadFoldCount, CarboncastError, FoldTooSmall
from .notation import format_spec
from .rng import Lcg64
from .svm import SvmHyperParams, SolverConfig, predict_svr, train_svr

SCORING = "neg_mean_squared_error"


@dataclass(frozen=True)
class FoldPlan:
    n: int
    k: int
    assignments: tuple  # fold index per sample
    seed: int


def make_folds(n: int, k: int, seed: int) -> FoldPlan:
    """Partition n samples into k folds whose sizes differ by at most one."""
    if not 2 <= k <= n:
        raise BadFoldCount(f"fold count must satisfy 2 <= k <= n, got k={k}, n={n}")
    if k == n:
        return FoldPlan(n=n, k=k, assignments=tuple(range(n)), seed=seed)
    order = list(range(n))
    Lcg64(seed).shuffle(order)
    assignments = [0] * n
    base, extra = divmod(n, k)
    pos = 0
    for fold in range(k):
        size = base + (1 if fold < extra else 0)
        for idx in order[pos:pos + size]:
            assignments[idx] = fold
        pos += size
    return FoldPlan(n=n, k=k, assignments=tuple(assignments), seed=seed)


def loo_plan(n: int) -> FoldPlan:
    """Explicit leave-one-out plan (equals make_folds(n, n, any_seed))."""
    return make_folds(n, n, 0)


def _fit(spec, X, y):
    if isinstance(spec, SvmHyperParams):
        return train_svr(X, y, spec)
    if isinstance(spec, BaselineSpec):
        return fit_baseline(spec, X, y)
    return spec.fit(X, y)


def _predict(spec, model, X):
    if isinstance(spec, SvmHyperParams):
        return predict_svr(model, X)
    if isinstance(spec, BaselineSpec):
        return predict_baseline(model, X)
    return model.predict(X)


def fit_spec(spec, X, y):
    """Train one candidate; dispatches on the spec type."""
    return _fit(spec, X, y)


def predict_spec(spec, model, X):
    return _predict(spec, model, X)


def cv_score(spec, X, y, plan: FoldPlan):
    """(mean_score, per_fold_scores) under the given fold plan.

    Data-dependent hyperparameters ('scale'/'auto' gamma) resolve inside
    each training split because training only ever sees that split.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    if plan.n != X.shape[0]:
        raise ValueError(f"plan covers {plan.n} samples, data has {X.shape[0]}")
    assignments = np.asarray(plan.assignments)
    fold_sizes = np.bincount(assignments, minlength=plan.k)
    if plan.n - int(fold_sizes.max()) < 2:
        raise FoldTooSmall("every training split needs at least two rows")

    per_fold = []
    for fold in range(plan.k):
        test = assignments == fold
        train = ~test
        try:
            model = _fit(spec, X[train], y[train])
            pred = _predict(spec, model, X[test])
            err = pred - y[test]
            per_fold.append(-float(np.mean(err * err)))
        except CarboncastError:
            per_fold.append(-np.inf)
    if any(s == -np.inf for s in per_fold):
        mean = -np.inf
    else:
        mean = float(np.mean(per_fold))
    return mean, per_fold


@dataclass(frozen=True)
class GridSpec:
    candidates: tuple

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("grid must contain at least one candidate")

    def duplicate_indices(self):
        """Indices of candidates that repeat an earlier one (flagged, allowed)."""
        seen = {}
        dups = []
        for idx, cand in enumerate(self.candidates):
            key = format_spec(cand)
            if key in seen:
                dups.append(idx)
            else:
                seen[key] = idx
        return dups


@dataclass
class CandidateResult:
    spec: object
    spec_string: str
    mean_score: float
    per_fold: list


@dataclass
class CvReport:
    per_candidate: list
    best_index: int
    scoring: str = SCORING
    note: str = ("model selection and reporting share one cross-validation "
                 "loop; scores are not nested-CV estimates")
    duplicates: list = field(default_factory=list)

    @property
    def best(self) -> CandidateResult:
        return self.per_candidate[self.best_index]

    def to_dict(self) -> dict:
        return {
            "scoring": self.scoring,
            "note": self.note,
            "best_index": self.best_index,
            "best_spec": self.best.spec_string,
            "duplicate_candidate_indices": self.duplicates,
            "candidates": [
                {"spec": c.spec_string, "mean_score": c.mean_score,
                 "per_fold_scores": c.per_fold}
                for c in self.per_candidate
            ],
        }


def grid_search(grid: GridSpec, X, y, plan: FoldPlan,
                workers: Optional[int] = None) -> CvReport:
    """Score every candidate (no early stopping) and pick the best mean.

    Ties break toward the lowest candidate index.  workers > 1 evaluates
    candidates in a thread pool; the report is assembled by candidate index
    so the result is identical to a sequential run.
    """
    candidates = grid.candidates

    def evaluate(spec):
        mean, per_fold = cv_score(spec, X, y, plan)
        return CandidateResult(spec=spec, spec_string=format_spec(spec),
                               mean_score=mean, per_fold=per_fold)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, candidates))
    else:
        results = [evaluate(spec) for spec in candidates]

    best_index = 0
    for idx, res in enumerate(results):
        if res.mean_score > results[best_index].mean_score:
            best_index = idx
    return CvReport(per_candidate=results, best_index=best_index,
                    duplicates=grid.duplicate_indices())
