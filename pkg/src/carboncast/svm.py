"""Soft-margin SVM classification and epsilon-insensitive SVR.

Both reduce to the box+equality QP solved by carboncast.qp over Gram
matrices from carboncast.kernels.  The SVR dual uses split variables
(alpha, alpha*) in [0, C]^n with sum(alpha - alpha*) = 0; the stored dual
coefficients are beta_i = alpha_i - alpha_i*.  The SVC dual is the usual
0 <= alpha_i <= C with sum(alpha_i y_i) = 0; stored coefficients are
alpha_i * y_i.  The intercept is the average of the boundary-point
residuals (coefficients strictly between the bounds), falling back to the
midpoint of the feasible intercept interval when no such point exists.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (DegenerateData, DimensionMismatch, NotConverged,
                     SingleClass, ZeroVariance)
from .kernels import KernelSpec, gram_matrix, kernel_matrix, resolve_gamma
from .qp import QpProblem, QpSolution, solve_qp

# relative share of C below which a dual coefficient is treated as zero
_DROP_REL = 1e-12
# relative share of C marking a coefficient as strictly inside (0, C)
_FREE_REL = 1e-7


@dataclass(frozen=True)
class SvmHyperParams:
    """C, epsilon (regression only) and the kernel."""

    C: float
    epsilon: float = 0.1
    kernel: KernelSpec = field(default_factory=lambda: KernelSpec("rbf"))

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be > 0")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")


@dataclass
class SolverConfig:
    tol: float = 1e-6
    max_iter: Optional[int] = None  # None -> 100 * m^2
    jitter: float = 1e-8


@dataclass
class TrainingDiagnostics:
    iterations: int
    duality_gap: float
    objective: float
    converged: bool
    jitter_applied: bool

    @classmethod
    def from_solution(cls, sol: QpSolution):
        return cls(iterations=sol.iterations, duality_gap=sol.duality_gap,
                   objective=sol.objective, converged=sol.converged,
                   jitter_applied=sol.jitter_applied)


@dataclass
class SvrModel:
    support_X: np.ndarray        # retained training rows, shape (s, d)
    dual_coeffs: np.ndarray      # beta_i for each support row
    bias: float
    kernel: KernelSpec           # gamma resolved to an explicit value
    params: SvmHyperParams
    diagnostics: TrainingDiagnostics


@dataclass
class SvcModel:
    support_X: np.ndarray
    dual_coeffs: np.ndarray      # alpha_i * y_i for each support row
    bias: float
    kernel: KernelSpec
    params: SvmHyperParams
    diagnostics: TrainingDiagnostics


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionMismatch(f"expected samples x features, got ndim={X.ndim}")
    return X


def _resolved_kernel(spec: KernelSpec, X) -> tuple[KernelSpec, float]:
    if spec.kind == "linear":
        # gamma is ignored; pin it so the resolved spec is fully explicit
        return KernelSpec("linear", 1.0), 1.0
    try:
        gamma = resolve_gamma(spec, X)
    except ZeroVariance as exc:
        raise DegenerateData(f"cannot resolve 'scale' gamma: {exc}") from exc
    if spec.needs_data_gamma:
        spec = KernelSpec(spec.kind, gamma, spec.degree, spec.coef0)
    return spec, gamma


def train_svr(X, y, params: SvmHyperParams,
              solver: Optional[SolverConfig] = None,
              sample_weight=None) -> SvrModel:
    """Fit epsilon-SVR by solving the split-variable dual.

    sample_weight scales each sample's box bound (effective C_i = C * w_i),
    the usual per-sample-cost weighting.
    """
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise DegenerateData("SVR training needs at least two samples")
    if y.shape != (n,):
        raise DimensionMismatch(f"y must have shape ({n},), got {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("y must be finite")
    solver = solver or SolverConfig()

    spec, gamma = _resolved_kernel(params.kernel, X)
    K = gram_matrix(spec, gamma, X)
    C, eps = params.C, params.epsilon
    if sample_weight is None:
        C_i = np.full(n, C)
    else:
        sample_weight = np.asarray(sample_weight, dtype=float)
        if sample_weight.shape != (n,) or np.any(sample_weight <= 0):
            raise ValueError("sample_weight must be positive, one per sample")
        C_i = C * sample_weight

    F = np.empty((2 * n, 2 * n))
    F[:n, :n] = K
    F[:n, n:] = -K
    F[n:, :n] = -K
    F[n:, n:] = K
    f = np.concatenate([eps - y, eps + y])
    bounds_lo = np.zeros(2 * n)
    bounds_up = np.concatenate([C_i, C_i])
    a = np.concatenate([np.ones(n), -np.ones(n)])
    problem = QpProblem(F=F, f=f, lower=bounds_lo, upper=bounds_up,
                        eq_coeffs=a, eq_rhs=0.0)
    sol = solve_qp(problem, tol=solver.tol, max_iter=solver.max_iter,
                   jitter=solver.jitter)
    if not sol.converged:
        raise NotConverged(
            f"SVR dual did not converge in {sol.iterations} iterations "
            f"(gap {sol.duality_gap:.3e})", TrainingDiagnostics.from_solution(sol))

    alpha = sol.theta[:n]
    alpha_star = sol.theta[n:]
    beta = alpha - alpha_star
    bias = _svr_bias(K, y, alpha, alpha_star, beta, C_i, eps)

    keep = np.abs(beta) > _DROP_REL * max(1.0, float(np.max(C_i)))
    return SvrModel(support_X=X[keep].copy(), dual_coeffs=beta[keep].copy(),
                    bias=bias, kernel=spec, params=params,
                    diagnostics=TrainingDiagnostics.from_solution(sol))


def _svr_bias(K, y, alpha, alpha_star, beta, C_i, eps) -> float:
    resid = y - K @ beta
    tol = _FREE_REL * np.maximum(1.0, C_i)
    lo_free = (alpha > tol) & (alpha < C_i - tol)
    up_free = (alpha_star > tol) & (alpha_star < C_i - tol)
    estimates = np.concatenate([resid[lo_free] - eps, resid[up_free] + eps])
    if estimates.size:
        return float(np.mean(estimates))
    # No boundary point: midpoint of the interval allowed by the KKT signs.
    at_lo_bound = alpha >= C_i - tol        # below the tube: bias <= resid - eps
    at_up_bound = alpha_star >= C_i - tol   # above the tube: bias >= resid + eps
    inactive = ~(at_lo_bound | at_up_bound) & (np.abs(beta) <= tol)
    lowers = np.concatenate([resid[at_up_bound] + eps, resid[inactive] - eps])
    uppers = np.concatenate([resid[at_lo_bound] - eps, resid[inactive] + eps])
    lo = float(np.max(lowers)) if lowers.size else -np.inf
    hi = float(np.min(uppers)) if uppers.size else np.inf
    if np.isfinite(lo) and np.isfinite(hi):
        return 0.5 * (lo + hi)
    if np.isfinite(lo):
        return lo
    if np.isfinite(hi):
        return hi
    return float(np.mean(resid))


def predict_svr(model: SvrModel, X_query) -> np.ndarray:
    """Predictions sum_i beta_i k(x_i, x) + bias for each query row."""
    Xq = _as_matrix(X_query)
    if model.support_X.size and Xq.shape[1] != model.support_X.shape[1]:
        raise DimensionMismatch(
            f"query has {Xq.shape[1]} features, model was trained with "
            f"{model.support_X.shape[1]}")
    if model.support_X.size == 0:
        return np.full(Xq.shape[0], model.bias)
    gamma = float(model.kernel.gamma)
    Kq = kernel_matrix(model.kernel, gamma, model.support_X, Xq)
    return model.dual_coeffs @ Kq + model.bias


def train_svc(X, y, params: SvmHyperParams,
              solver: Optional[SolverConfig] = None) -> SvcModel:
    """Fit a soft-margin binary classifier with labels in {-1, +1}."""
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise DegenerateData("SVC training needs at least two samples")
    if y.shape != (n,):
        raise DimensionMismatch(f"y must have shape ({n},), got {y.shape}")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if np.all(y == y[0]):
        raise SingleClass("both classes must be present")
    solver = solver or SolverConfig()

    spec, gamma = _resolved_kernel(params.kernel, X)
    K = gram_matrix(spec, gamma, X)
    C = params.C

    Q = K * np.outer(y, y)
    problem = QpProblem(F=Q, f=-np.ones(n), lower=np.zeros(n),
                        upper=np.full(n, C), eq_coeffs=y, eq_rhs=0.0)
    sol = solve_qp(problem, tol=solver.tol, max_iter=solver.max_iter,
                   jitter=solver.jitter)
    if not sol.converged:
        raise NotConverged(
            f"SVC dual did not converge in {sol.iterations} iterations "
            f"(gap {sol.duality_gap:.3e})", TrainingDiagnostics.from_solution(sol))

    alpha = sol.theta
    coeffs = alpha * y
    scores = K @ coeffs
    tol = _FREE_REL * max(1.0, C)
    free = (alpha > tol) & (alpha < C - tol)
    if np.any(free):
        bias = float(np.mean(y[free] - scores[free]))
    else:
        # alpha = 0 demands y(s + b) >= 1 and alpha = C demands y(s + b) <= 1;
        # either way the pivot value is y_i - s_i, bounding b from the side
        # determined by the label.
        v = y - scores
        lowers, uppers = [], []
        for vi, yi, ai in zip(v, y, alpha):
            if ai <= tol:
                (lowers if yi > 0 else uppers).append(vi)
            elif ai >= C - tol:
                (uppers if yi > 0 else lowers).append(vi)
        lo = max(lowers) if lowers else -np.inf
        hi = min(uppers) if uppers else np.inf
        if np.isfinite(lo) and np.isfinite(hi):
            bias = 0.5 * (lo + hi)
        elif np.isfinite(lo):
            bias = lo
        elif np.isfinite(hi):
            bias = hi
        else:
            bias = 0.0

    keep = np.abs(coeffs) > _DROP_REL * max(1.0, C)
    return SvcModel(support_X=X[keep].copy(), dual_coeffs=coeffs[keep].copy(),
                    bias=bias, kernel=spec, params=params,
                    diagnostics=TrainingDiagnostics.from_solution(sol))


def decision_values(model: SvcModel, X_query) -> np.ndarray:
    """Signed decision values for each query row."""
    Xq = _as_matrix(X_query)
    if model.support_X.size and Xq.shape[1] != model.support_X.shape[1]:
        raise DimensionMismatch(
            f"query has {Xq.shape[1]} features, model was trained with "
            f"{model.support_X.shape[1]}")
    if model.support_X.size == 0:
        return np.full(Xq.shape[0], model.bias)
    gamma = float(model.kernel.gamma)
    Kq = kernel_matrix(model.kernel, gamma, model.support_X, Xq)
    return model.dual_coeffs @ Kq + model.bias


def decision_function(model: SvcModel, x) -> float:
    """Decision value for one sample; its sign is the predicted label."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch("decision_function expects a single vector")
    return float(decision_values(model, x[None, :])[0])
