"""Comparison regressors: OLS, ridge, lasso and polynomial least squares.

All four share one fit/predict surface.  The intercept is never penalized:
ridge solves the centered augmented least-squares system and lasso runs
cyclic coordinate descent on centered, per-column-scaled features with the
soft threshold adjusted so the penalty applies to raw-unit coefficients
(objective (1/2n) * ||y - Xw - b||^2 + lambda * ||w||_1).  Polynomial
expansion raises each input column to the powers 1..degree (no cross
terms), which reduces to classic polynomial regression for one regressor.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IllPosed, NotConverged

_LASSO_SWEEP_TOL = 1e-10
_LASSO_MAX_SWEEPS = 100_000


@dataclass(frozen=True)
class BaselineSpec:
    kind: str                 # ols | ridge | lasso | polynomial
    lam: float = 0.0          # ridge/lasso penalty
    degree: int = 1           # polynomial expansion

    def __post_init__(self):
        if self.kind not in ("ols", "ridge", "lasso", "polynomial"):
            raise ValueError(f"unknown baseline kind {self.kind!r}")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")


@dataclass
class LinearModel:
    coefficients: np.ndarray
    intercept: float
    feature_expansion: str    # "identity" or "polynomial(degree=k)"
    input_dim: int
    spec: BaselineSpec


def _expand(X: np.ndarray, degree: int) -> np.ndarray:
    if degree == 1:
        return X
    return np.hstack([X ** p for p in range(1, degree + 1)])


def fit_baseline(spec: BaselineSpec, X, y) -> LinearModel:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    if y.shape != (n,):
        raise DimensionMismatch(f"y must have shape ({n},), got {y.shape}")

    degree = spec.degree if spec.kind == "polynomial" else 1
    Xe = _expand(X, degree)
    p = Xe.shape[1]
    expansion = "identity" if degree == 1 else f"polynomial(degree={degree})"

    if spec.kind in ("ols", "polynomial"):
        if n <= p:
            raise IllPosed(f"need more than {p} samples for {p} expanded features, got {n}")
        design = np.hstack([np.ones((n, 1)), Xe])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        return LinearModel(coefficients=coef[1:], intercept=float(coef[0]),
                           feature_expansion=expansion, input_dim=d, spec=spec)

    x_mean = Xe.mean(axis=0)
    y_mean = float(y.mean())
    Xc = Xe - x_mean
    yc = y - y_mean

    if spec.kind == "ridge":
        # augmented rows [Xc; sqrt(lam) I] keep the intercept unpenalized
        aug = np.vstack([Xc, np.sqrt(spec.lam) * np.eye(p)])
        rhs = np.concatenate([yc, np.zeros(p)])
        w, *_ = np.linalg.lstsq(aug, rhs, rcond=None)
    else:
        w = _lasso_cd(Xc, yc, spec.lam)
    intercept = y_mean - float(x_mean @ w)
    return LinearModel(coefficients=w, intercept=intercept,
                       feature_expansion=expansion, input_dim=d, spec=spec)


def _lasso_cd(Xc, yc, lam) -> np.ndarray:
    """Cyclic coordinate descent with soft thresholding.

    Columns are scaled to unit population standard deviation internally;
    the per-coordinate threshold is scaled back so the penalty stays in raw
    units and the fitted function is unchanged.
    """
    n, p = Xc.shape
    scale = Xc.std(axis=0)
    scale[scale == 0.0] = 1.0  # centered constant column stays at zero weight
    Xs = Xc / scale
    col_sq = np.einsum("ij,ij->j", Xs, Xs) / n
    w = np.zeros(p)
    resid = yc.copy()
    for _ in range(_LASSO_MAX_SWEEPS):
        max_change = 0.0
        for jj in range(p):
            if col_sq[jj] == 0.0:
                continue
            rho = (Xs[:, jj] @ resid) / n + col_sq[jj] * w[jj]
            thr = lam / scale[jj]
            if rho > thr:
                new = (rho - thr) / col_sq[jj]
            elif rho < -thr:
                new = (rho + thr) / col_sq[jj]
            else:
                new = 0.0
            if new != w[jj]:
                resid -= (new - w[jj]) * Xs[:, jj]
                change = abs(new - w[jj])
                if change > max_change:
                    max_change = change
                w[jj] = new
        if max_change < _LASSO_SWEEP_TOL:
            return w / scale
    raise NotConverged(f"lasso coordinate descent did not settle in "
                       f"{_LASSO_MAX_SWEEPS} sweeps")


def predict_baseline(model: LinearModel, X_query) -> np.ndarray:
    Xq = np.asarray(X_query, dtype=float)
    if Xq.ndim == 1:
        Xq = Xq[:, None]
    if Xq.shape[1] != model.input_dim:
        raise DimensionMismatch(f"query has {Xq.shape[1]} features, model was "
                                f"trained with {model.input_dim}")
    degree = model.spec.degree if model.spec.kind == "polynomial" else 1
    Xe = _expand(Xq, degree)
    return Xe @ model.coefficients + model.intercept
