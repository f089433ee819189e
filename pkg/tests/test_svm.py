import numpy as np
import pytest

from carboncast.errors import (DegenerateData, DimensionMismatch, SingleClass)
from carboncast.kernels import KernelSpec
from carboncast.svm import (SolverConfig, SvmHyperParams, decision_function,
                            decision_values, predict_svr, train_svc, train_svr)

from oracles import brute_force_margin, brute_force_qp, brute_force_svr_primal

TIGHT = SolverConfig(tol=1e-9)


def linear_params(C, eps):
    return SvmHyperParams(C=C, epsilon=eps, kernel=KernelSpec("linear"))


# --- SVR ----------------------------------------------------------------------


def test_constant_target_inside_tube():
    X = np.arange(6.0)[:, None]
    m = train_svr(X, np.full(6, 5.0),
                  SvmHyperParams(C=10.0, epsilon=0.5, kernel=KernelSpec("rbf", 0.3)))
    assert m.dual_coeffs.size == 0
    assert m.bias == pytest.approx(5.0, abs=1e-9)
    assert np.allclose(predict_svr(m, X), 5.0)


def test_exact_line_linear_kernel():
    years = np.arange(10.0)[:, None]
    y = 2.0 * years[:, 0] + 1.0
    m = train_svr(years, y, linear_params(C=100.0, eps=0.01), TIGHT)
    pred = predict_svr(m, years)
    assert np.max(np.abs(pred - y)) < 0.02
    # extrapolation continues the line: 2*12 + 1 = 25
    assert predict_svr(m, [[12.0]])[0] == pytest.approx(25.0, abs=0.05)


def test_dual_objective_matches_primal_oracle_n6():
    # strong duality: primal optimum equals minus the dual QP objective
    rng = np.random.default_rng(20)
    x = np.sort(rng.uniform(-2, 2, 6))
    y = 0.8 * x - 0.5 + rng.normal(0, 0.7, 6)
    C, eps = 2.0, 0.3
    m = train_svr(x[:, None], y, linear_params(C, eps), TIGHT)
    (_, _), primal_obj = brute_force_svr_primal(x, y, C, eps)
    assert -m.diagnostics.objective == pytest.approx(primal_obj, abs=1e-4)


def test_dual_matches_qp_grid_oracle_small():
    # n=3 gives a 6-variable dual the grid oracle can still certify
    rng = np.random.default_rng(21)
    x = rng.uniform(-1, 1, 3)
    y = rng.uniform(-1, 1, 3)
    C, eps = 1.5, 0.2
    m = train_svr(x[:, None], y, linear_params(C, eps), TIGHT)
    K = np.outer(x, x)
    F = np.block([[K, -K], [-K, K]])
    f = np.concatenate([eps - y, eps + y])
    a = np.concatenate([np.ones(3), -np.ones(3)])
    _, obj_oracle = brute_force_qp(F, f, np.zeros(6), np.full(6, C), a, 0.0)
    assert m.diagnostics.objective <= obj_oracle + 1e-4


def test_svr_kkt_conditions_random_instances():
    rng = np.random.default_rng(22)
    kernels = [KernelSpec("linear"), KernelSpec("rbf", "scale"),
               KernelSpec("polynomial", "auto", degree=2, coef0=1.0)]
    for trial in range(30):
        n = int(rng.integers(4, 15))
        X = rng.normal(size=(n, 2))
        y = rng.normal(size=n)
        C = float(rng.uniform(0.5, 20.0))
        eps = float(rng.uniform(0.01, 0.5))
        params = SvmHyperParams(C=C, epsilon=eps, kernel=kernels[trial % 3])
        m = train_svr(X, y, params, TIGHT)
        # box and equality feasibility of the dual
        assert np.all(np.abs(m.dual_coeffs) <= C + 1e-9)
        assert abs(np.sum(m.dual_coeffs)) < 1e-6
        # epsilon-tube property for zero-coefficient points
        pred = predict_svr(m, X)
        sv_rows = {tuple(r) for r in np.round(m.support_X, 12)}
        for i in range(n):
            if tuple(np.round(X[i], 12)) not in sv_rows:
                assert abs(pred[i] - y[i]) <= eps + 1e-6


def test_prediction_at_free_support_vector_sits_on_tube_boundary():
    rng = np.random.default_rng(23)
    X = rng.normal(size=(12, 1))
    y = np.sin(X[:, 0]) + rng.normal(0, 0.3, 12)
    eps = 0.2
    params = SvmHyperParams(C=5.0, epsilon=eps, kernel=KernelSpec("rbf", 0.7))
    m = train_svr(X, y, params, TIGHT)
    pred = predict_svr(m, X)
    C = params.C
    free = (np.abs(m.dual_coeffs) > 1e-6 * C) & (np.abs(m.dual_coeffs) < C * (1 - 1e-6))
    assert np.any(free)
    # free support vectors lie on the tube boundary: |residual| = eps
    lookup = {tuple(r): k for k, r in enumerate(np.round(X, 12))}
    for j in np.flatnonzero(free):
        i = lookup[tuple(np.round(m.support_X[j], 12))]
        assert abs(abs(y[i] - pred[i]) - eps) < 1e-4


def test_translation_equivariance():
    rng = np.random.default_rng(24)
    X = rng.normal(size=(8, 1))
    y = rng.normal(size=8)
    for kernel in (KernelSpec("linear"), KernelSpec("rbf", 1.3),
                   KernelSpec("polynomial", 0.4, degree=2, coef0=1.0)):
        params = SvmHyperParams(C=3.0, epsilon=0.1, kernel=kernel)
        m1 = train_svr(X, y, params, TIGHT)
        m2 = train_svr(X, y + 10.0, params, TIGHT)
        assert np.max(np.abs(m1.dual_coeffs - m2.dual_coeffs)) < 1e-8
        assert m2.bias - m1.bias == pytest.approx(10.0, abs=1e-8)


def test_output_scaling_equivariance():
    rng = np.random.default_rng(25)
    X = rng.normal(size=(8, 1))
    y = rng.normal(size=8)
    s = 3.5
    m1 = train_svr(X, y, SvmHyperParams(C=2.0, epsilon=0.1,
                                        kernel=KernelSpec("rbf", 0.9)), TIGHT)
    m2 = train_svr(X, s * y, SvmHyperParams(C=2.0 * s, epsilon=0.1 * s,
                                            kernel=KernelSpec("rbf", 0.9)), TIGHT)
    q = rng.normal(size=(5, 1))
    p1 = predict_svr(m1, q)
    p2 = predict_svr(m2, q)
    assert np.max(np.abs(p2 - s * p1)) < 1e-6 * max(1.0, np.max(np.abs(s * p1)))


def test_svr_rejects_degenerate_inputs():
    with pytest.raises(DegenerateData):
        train_svr(np.ones((1, 1)), np.ones(1), linear_params(1.0, 0.1))
    with pytest.raises(DegenerateData):
        # constant rows make 'scale' gamma unresolvable
        train_svr(np.ones((4, 1)), np.arange(4.0),
                  SvmHyperParams(C=1.0, epsilon=0.1,
                                 kernel=KernelSpec("rbf", "scale")))


def test_predict_dimension_mismatch():
    m = train_svr(np.arange(4.0)[:, None], np.arange(4.0),
                  linear_params(10.0, 0.01))
    with pytest.raises(DimensionMismatch):
        predict_svr(m, np.ones((2, 3)))


def test_sample_weight_scales_anchor_influence():
    rng = np.random.default_rng(26)
    x = np.arange(10.0)
    y = x + rng.normal(0, 0.05, 10)
    anchor_x, anchor_y = 12.0, 30.0   # far above the line
    X = np.concatenate([x, [anchor_x]])[:, None]
    yy = np.concatenate([y, [anchor_y]])
    params = linear_params(C=5.0, eps=0.01)
    w_small = np.ones(11)
    w_big = np.ones(11)
    w_big[-1] = 50.0
    m_small = train_svr(X, yy, params, TIGHT, sample_weight=w_small)
    m_big = train_svr(X, yy, params, TIGHT, sample_weight=w_big)
    p_small = predict_svr(m_small, [[anchor_x]])[0]
    p_big = predict_svr(m_big, [[anchor_x]])[0]
    assert p_big > p_small  # heavier anchor pulls the fit toward it


# --- SVC ----------------------------------------------------------------------


def test_symmetric_pair_hard_margin():
    X = np.array([[-1.0], [1.0]])
    y = np.array([-1.0, 1.0])
    m = train_svc(X, y, SvmHyperParams(C=1e6, kernel=KernelSpec("linear")), TIGHT)
    assert decision_function(m, [0.0]) == pytest.approx(0.0, abs=1e-9)
    assert decision_function(m, [1.0]) == pytest.approx(1.0, abs=1e-6)
    assert m.dual_coeffs.size == 2  # both points are support vectors
    # omega = sum(alpha_i y_i x_i) = 1, margin = 1/|omega| = 1
    w = float(m.dual_coeffs @ m.support_X[:, 0])
    assert w == pytest.approx(1.0, abs=1e-6)


def separable_blobs(rng, n_per=4, gap=2.0):
    pos = rng.normal(size=(n_per, 2)) * 0.4 + [gap, gap]
    neg = rng.normal(size=(n_per, 2)) * 0.4 - [gap, gap]
    X = np.vstack([pos, neg])
    y = np.array([1.0] * n_per + [-1.0] * n_per)
    return X, y


def test_separable_blobs_margin_matches_angle_oracle():
    rng = np.random.default_rng(27)
    for _ in range(8):
        X, y = separable_blobs(rng)
        m = train_svc(X, y, SvmHyperParams(C=1e6, kernel=KernelSpec("linear")),
                      TIGHT)
        vals = decision_values(m, X)
        assert np.all(vals * y >= 1.0 - 1e-6)   # hard-margin behavior
        w = m.dual_coeffs @ m.support_X
        margin = 1.0 / np.linalg.norm(w)
        assert margin == pytest.approx(brute_force_margin(X, y), abs=1e-2)


def test_overlapping_points_small_C_matches_qp_oracle():
    X = np.array([[-1.0], [-0.2], [0.1], [1.0]])
    y = np.array([-1.0, 1.0, -1.0, 1.0])   # not separable
    C = 0.8
    m = train_svc(X, y, SvmHyperParams(C=C, kernel=KernelSpec("linear")), TIGHT)
    # some slack must be active: at least one margin violated
    vals = decision_values(m, X)
    assert np.any(vals * y < 1.0 - 1e-9)
    K = X @ X.T
    F = K * np.outer(y, y)
    _, obj_oracle = brute_force_qp(F, -np.ones(4), np.zeros(4), np.full(4, C),
                                   y, 0.0)
    assert m.diagnostics.objective <= obj_oracle + 1e-4


def test_decision_sign_agrees_with_direct_classifier_on_grid():
    rng = np.random.default_rng(28)
    X, y = separable_blobs(rng)
    m = train_svc(X, y, SvmHyperParams(C=1e6, kernel=KernelSpec("linear")), TIGHT)
    w = m.dual_coeffs @ m.support_X
    grid = rng.uniform(-3, 3, size=(100, 2))
    direct = np.sign(grid @ w + m.bias)
    ours = np.sign(decision_values(m, grid))
    assert np.array_equal(direct, ours)


def test_label_flip_negates_decision_function():
    rng = np.random.default_rng(29)
    X, y = separable_blobs(rng)
    params = SvmHyperParams(C=10.0, kernel=KernelSpec("rbf", 0.5))
    m1 = train_svc(X, y, params, TIGHT)
    m2 = train_svc(X, -y, params, TIGHT)
    q = rng.uniform(-3, 3, size=(20, 2))
    assert np.max(np.abs(decision_values(m1, q) + decision_values(m2, q))) < 1e-9


def test_svc_dual_feasibility():
    rng = np.random.default_rng(30)
    X, y = separable_blobs(rng)
    C = 5.0
    m = train_svc(X, y, SvmHyperParams(C=C, kernel=KernelSpec("rbf", 0.4)), TIGHT)
    alpha_y = m.dual_coeffs
    assert np.all(np.abs(alpha_y) <= C + 1e-9)
    assert abs(np.sum(alpha_y)) < 1e-6


def test_svc_rejects_single_class():
    with pytest.raises(SingleClass):
        train_svc(np.arange(4.0)[:, None], np.ones(4),
                  SvmHyperParams(C=1.0, kernel=KernelSpec("linear")))


def test_svc_rejects_bad_labels():
    with pytest.raises(ValueError):
        train_svc(np.arange(4.0)[:, None], np.array([0.0, 1.0, 0.0, 1.0]),
                  SvmHyperParams(C=1.0, kernel=KernelSpec("linear")))


def test_hyperparams_validation():
    with pytest.raises(ValueError):
        SvmHyperParams(C=0.0)
    with pytest.raises(ValueError):
        SvmHyperParams(C=1.0, epsilon=-0.1)
