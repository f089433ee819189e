"""Dense convex QP solver for box constraints plus one linear equality.

Solves  minimize  0.5 * theta' F theta + f' theta
        subject to lower <= theta <= upper  and optionally  a' theta = b,

the constraint pattern of soft-margin SVM and epsilon-SVR duals.  The
engine performs exact line searches along maximal-violating-pair exchange
directions (single-coordinate Newton steps for coordinates outside the
equality), selected deterministically with lowest-index tie-breaking.

Two interchangeable engines exist: a compiled Cython core and a pure
NumPy fallback.  The compiled one is picked at import time when available;
set CARBONCAST_PURE=1 to force the fallback.  Both produce bit-identical
iterates.

If F has a very small or negative eigenvalue the solver adds a small
positive constant to the diagonal (see condition_regularize) before
iterating and records that in the solution diagnostics.  The reported
objective always refers to the original F; the duality gap certifies the
conditioned problem actually solved.
"""

import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _pure

if os.environ.get("CARBONCAST_PURE"):
    _engine = _pure
else:
    try:
        from . import _core as _engine
    except ImportError:
        _engine = _pure


def backend_name() -> str:
    """'compiled' when the Cython core is active, else 'pure'."""
    return "compiled" if _engine.BACKEND == "compiled" else "pure"


_SYM_RTOL = 1e-12
_EIG_RTOL = 1e-10


@dataclass
class QpProblem:
    """Problem data; validated and copied to float64 on construction."""

    F: np.ndarray
    f: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    eq_coeffs: Optional[np.ndarray] = None
    eq_rhs: float = 0.0

    def __post_init__(self):
        self.F = np.array(self.F, dtype=float, order="C")
        self.f = np.array(self.f, dtype=float)
        self.lower = np.array(self.lower, dtype=float)
        self.upper = np.array(self.upper, dtype=float)
        m = self.f.shape[0]
        if self.F.shape != (m, m):
            raise ValueError(f"F must be {m}x{m}, got {self.F.shape}")
        if self.lower.shape != (m,) or self.upper.shape != (m,):
            raise ValueError("bound vectors must match f in length")
        if not (np.all(np.isfinite(self.F)) and np.all(np.isfinite(self.f))):
            raise ValueError("F and f must be finite")
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ValueError("bounds must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        scale = max(1.0, float(np.max(np.abs(self.F))))
        if float(np.max(np.abs(self.F - self.F.T))) > _SYM_RTOL * scale:
            raise ValueError("F is not symmetric to within tolerance")
        if self.eq_coeffs is not None:
            self.eq_coeffs = np.array(self.eq_coeffs, dtype=float)
            if self.eq_coeffs.shape != (m,):
                raise ValueError("eq_coeffs must match f in length")
            self.eq_rhs = float(self.eq_rhs)
            if not np.any(self.eq_coeffs):
                if self.eq_rhs != 0.0:
                    raise ValueError("all-zero eq_coeffs with nonzero eq_rhs is infeasible")
                self.eq_coeffs = None  # vacuous constraint

    @property
    def size(self) -> int:
        return self.f.shape[0]


@dataclass
class QpSolution:
    theta: np.ndarray
    objective: float
    duality_gap: float
    iterations: int
    converged: bool
    kkt_violation: float = 0.0
    jitter_applied: bool = False
    tol: float = 0.0


def condition_regularize(F, jitter: float) -> np.ndarray:
    """Return F + jitter * I; off-diagonal entries are bit-identical to F."""
    if jitter <= 0:
        raise ValueError("jitter must be positive")
    F = np.asarray(F, dtype=float)
    out = F.copy()
    idx = np.arange(F.shape[0])
    out[idx, idx] = F[idx, idx] + jitter
    return out


def _repair_equality(a, rhs, lower, upper, theta) -> float:
    """Absorb the equality residual coordinate by coordinate in index
    order, staying inside the box; returns the remaining residual."""
    res = rhs - float(a @ theta)
    scale = max(1.0, abs(rhs))
    for k in range(theta.shape[0]):
        if abs(res) <= 1e-14 * scale:
            break
        if a[k] == 0.0:
            continue
        moved = min(max(theta[k] + res / a[k], lower[k]), upper[k])
        res -= a[k] * (moved - theta[k])
        theta[k] = moved
    return res


def _feasible_start(p: QpProblem) -> np.ndarray:
    """Deterministic feasible point: clip zero into the box, then repair
    the equality coordinate by coordinate in index order."""
    theta = np.clip(np.zeros(p.size), p.lower, p.upper)
    if p.eq_coeffs is None:
        return theta
    res = _repair_equality(p.eq_coeffs, p.eq_rhs, p.lower, p.upper, theta)
    if abs(res) > 1e-9 * max(1.0, abs(p.eq_rhs)):
        raise ValueError("box and equality constraints have no common point")
    return theta


def _gap_and_multiplier(F, f, lower, upper, eq_coeffs, theta):
    """(duality gap, equality multiplier) at theta for the given problem.

    With an equality constraint the gap is minimized over the equality
    multiplier; the minimizer of the convex piecewise-linear gap function
    is attained at one of its kinks -g_k / a_k, all of which are checked.
    """
    g = F @ theta + f
    below = theta - lower
    above = upper - theta
    if eq_coeffs is None:
        gap = float(np.sum(np.maximum(g, 0.0) * below)
                    + np.sum(np.maximum(-g, 0.0) * above))
        return max(gap, 0.0), 0.0
    a = eq_coeffs
    nz = a != 0.0
    lam = -g[nz] / a[nz]
    r = g[None, :] + lam[:, None] * a[None, :]
    gaps = (np.maximum(r, 0.0) @ below) + (np.maximum(-r, 0.0) @ above)
    best = int(np.argmin(gaps))
    return max(float(gaps[best]), 0.0), float(lam[best])


def duality_gap(F, f, lower, upper, eq_coeffs, theta) -> float:
    """Exact duality gap at theta; see _gap_and_multiplier."""
    return _gap_and_multiplier(F, f, lower, upper, eq_coeffs, theta)[0]


_SNAP_REL = 1e-13      # fraction of box width treated as "at the bound"
_EIG_FLOOR_REL = 1e-14  # floor for Hessian eigenvalues in the Newton solve


def _newton_direction(F, g, a, free, floor_rel=_EIG_FLOOR_REL):
    """Equality-constrained Newton direction on the free set.

    Solved in the eigenbasis of the free-set Hessian with small
    eigenvalues floored: range modes get the exact Newton step while flat
    (near-null) valley modes still contribute descent instead of being
    truncated.  The equality multiplier is eliminated analytically so
    a_free . d = 0 holds by construction.
    """
    g_f = g[free]
    F_ff = F[np.ix_(free, free)]
    w, V = np.linalg.eigh(F_ff)
    wmax = max(float(w[-1]), 0.0)
    wt = np.maximum(w, max(wmax * floor_rel, 1e-300))
    g_t = V.T @ g_f
    if a is not None:
        a_t = V.T @ a[free]
        denom = float(a_t @ (a_t / wt))
        lam = -float(a_t @ (g_t / wt)) / denom if denom > 0.0 else 0.0
        return -(V @ ((g_t + lam * a_t) / wt))
    return -(V @ (g_t / wt))


def _newton_refine(F, f, lower, upper, a, theta, g) -> bool:
    """One projected-Newton step over the estimated inactive set.

    The working set is every interior coordinate plus every bound
    coordinate whose KKT sign (under the gap-minimizing equality
    multiplier) says it wants to move inward.  Coordinates whose computed
    direction points outward are parked on their bound and dropped;
    coordinates blocking the step at a negligible distance are snapped
    onto their bound; either case re-solves the system.  The exact
    line-search step is clipped to the box and applied only when it
    verifiably decreases the objective.  Pair-coordinate iterations crawl
    when the optimum sits in a flat valley (a tiny box against a
    huge-scale Gram matrix); this step crosses such valleys in one move.
    """
    m = theta.shape[0]
    width = upper - lower
    snap = _SNAP_REL * width
    _, lam = _gap_and_multiplier(F, f, lower, upper, a, theta)
    r = g + lam * a if a is not None else g
    near_lo = theta - lower <= snap
    near_up = upper - theta <= snap
    release = (near_lo & (r < 0.0)) | (near_up & (r > 0.0))
    free = (~near_lo & ~near_up) | release
    mutated = False
    d = None
    for _attempt in range(16):
        if int(np.count_nonzero(free)) == 0:
            break
        d = _newton_direction(F, g, a, free)
        if not np.all(np.isfinite(d)):
            d = None
            break
        d_full = np.zeros(m)
        d_full[free] = d
        outward = free & ((near_lo & (d_full < 0.0)) | (near_up & (d_full > 0.0)))
        if np.any(outward):
            at_lo = outward & near_lo
            at_up = outward & near_up & ~at_lo
            theta[at_lo] = lower[at_lo]
            theta[at_up] = upper[at_up]
            mutated = True
            free = free & ~outward
            continue
        fidx = np.where(free)[0]
        dist = np.where(d > 0.0, upper[free] - theta[free],
                        np.where(d < 0.0, theta[free] - lower[free], np.inf))
        blocking = dist <= snap[free]
        if np.any(blocking):
            bi = fidx[blocking]
            snap_up = d_full[bi] > 0.0
            theta[bi[snap_up]] = upper[bi[snap_up]]
            theta[bi[~snap_up]] = lower[bi[~snap_up]]
            free[bi] = False
            near_lo = theta - lower <= snap
            near_up = upper - theta <= snap
            mutated = True
            continue
        break
    else:
        d = None

    if mutated:
        g[:] = F @ theta + f
    if d is None or int(np.count_nonzero(free)) == 0:
        return mutated

    slope = float(g[free] @ d)
    if slope >= 0.0:
        return mutated
    F_ff = F[np.ix_(free, free)]
    curv = float(d @ F_ff @ d)
    t = 1.0 if curv <= 0.0 else min(1.0, -slope / curv)
    with np.errstate(divide="ignore", invalid="ignore"):
        room = np.where(d > 0, (upper[free] - theta[free]) / d,
                        np.where(d < 0, (lower[free] - theta[free]) / d, np.inf))
    t = min(t, float(np.min(room)))
    if not (t > 0.0) or not np.isfinite(t):
        return mutated
    new_theta = theta.copy()
    new_theta[free] = np.clip(theta[free] + t * d, lower[free], upper[free])
    old_obj = 0.5 * float(theta @ (F @ theta)) + float(f @ theta)
    new_obj = 0.5 * float(new_theta @ (F @ new_theta)) + float(f @ new_theta)
    if new_obj >= old_obj:
        return mutated
    theta[:] = new_theta
    g[:] = F @ theta + f
    return True


def solve_qp(problem: QpProblem, tol: float = 1e-6,
             max_iter: Optional[int] = None, jitter: float = 1e-8) -> QpSolution:
    """Solve the QP; returns the best iterate with converged=False rather
    than raising when the iteration budget runs out.

    Convergence means both the working-set KKT violation and the duality
    gap fell below tol, each scaled by the problem's magnitude
    (max(1, ||grad||_inf) and max(1, |objective|) respectively); for
    problems of unit scale these coincide with absolute thresholds.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = problem.size
    if max_iter is None:
        max_iter = 100 * m * m

    F = problem.F
    eigs = np.linalg.eigvalsh(F)
    jitter_applied = bool(eigs[0] < _EIG_RTOL * max(1.0, float(eigs[-1])))
    F_solve = condition_regularize(F, jitter) if jitter_applied else F
    F_solve = np.ascontiguousarray(F_solve)

    theta = _feasible_start(problem)
    g = F_solve @ theta + problem.f
    has_eq = problem.eq_coeffs is not None
    a = problem.eq_coeffs if has_eq else np.zeros(m)

    chunk = max(128, 4 * m)
    total = 0
    viol = np.inf
    converged = False
    rel = tol
    while total < max_iter:
        # refresh the gradient each chunk: the engine maintains it
        # incrementally and rounding drift accumulates on badly scaled
        # problems
        g = F_solve @ theta + problem.f
        budget = min(chunk, max_iter - total)
        steps, viol, hit = _engine.run(F_solve, problem.lower, problem.upper,
                                       a, has_eq, theta, g, rel, budget)
        total += steps
        if hit:
            gap = duality_gap(F_solve, problem.f, problem.lower, problem.upper,
                              problem.eq_coeffs, theta)
            obj_solve = 0.5 * float(theta @ F_solve @ theta) + float(problem.f @ theta)
            # roundoff floor: when F theta products are huge, the gap of the
            # best representable iterate cannot reach zero in doubles
            abs_theta = np.abs(theta)
            float_floor = m * np.finfo(float).eps * (
                float(abs_theta @ (np.abs(F_solve) @ abs_theta))
                + float(np.abs(problem.f) @ abs_theta) + 1.0)
            if gap <= tol * max(1.0, abs(obj_solve)) + float_floor:
                converged = True
                break
            rel /= 10.0
            if rel < 1e-17:
                break
        if total >= max_iter:
            break
        _newton_refine(F_solve, problem.f, problem.lower, problem.upper,
                       problem.eq_coeffs, theta, g)

    if has_eq:
        # bound snaps inside the refinement can leave a tiny residual
        _repair_equality(problem.eq_coeffs, problem.eq_rhs,
                         problem.lower, problem.upper, theta)

    gap = duality_gap(F_solve, problem.f, problem.lower, problem.upper,
                      problem.eq_coeffs, theta)

    objective = 0.5 * float(theta @ problem.F @ theta) + float(problem.f @ theta)
    return QpSolution(theta=theta, objective=objective, duality_gap=float(gap),
                      iterations=total, converged=converged,
                      kkt_violation=float(viol), jitter_applied=jitter_applied,
                      tol=tol)
