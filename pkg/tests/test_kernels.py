import math

import numpy as np
import pytest

from carboncast.errors import DimensionMismatch, EmptyData, ZeroVariance
from carboncast.kernels import (KernelSpec, eval_kernel, gram_matrix,
                                kernel_matrix, resolve_gamma)


def test_resolve_gamma_auto_is_one_over_d():
    X = np.arange(15.0).reshape(3, 5)
    assert resolve_gamma(KernelSpec("rbf", "auto"), X) == 0.2


def test_resolve_gamma_explicit_passthrough():
    X = np.ones((4, 2))
    assert resolve_gamma(KernelSpec("rbf", 0.7), X) == 0.7


def test_resolve_gamma_scale_two_point():
    # population variance of {0, 2} is 1, d = 1 -> gamma = 1/(1*1) = 1
    assert resolve_gamma(KernelSpec("rbf", "scale"), [[0.0], [2.0]]) == 1.0


def test_resolve_gamma_scale_errors_on_constant_matrix():
    with pytest.raises(ZeroVariance):
        resolve_gamma(KernelSpec("rbf", "scale"), np.full((3, 2), 7.0))


def test_resolve_gamma_empty_data():
    with pytest.raises(EmptyData):
        resolve_gamma(KernelSpec("rbf", "auto"), np.zeros((0, 3)))
    with pytest.raises(EmptyData):
        resolve_gamma(KernelSpec("rbf", "auto"), np.zeros((3, 0)))


def test_resolve_gamma_auto_invariant_to_value_scaling():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(6, 3))
    spec = KernelSpec("rbf", "auto")
    assert resolve_gamma(spec, X) == resolve_gamma(spec, 10.0 * X)


def test_resolve_gamma_scale_quarters_when_data_doubles():
    # Var(2X) = 4 Var(X), so scale-mode gamma drops by exactly 4.
    rng = np.random.default_rng(1)
    X = rng.normal(size=(5, 4))
    spec = KernelSpec("rbf", "scale")
    g1 = resolve_gamma(spec, X)
    g2 = resolve_gamma(spec, 2.0 * X)
    assert g2 == pytest.approx(g1 / 4.0, rel=1e-12)


def test_eval_kernel_rbf_identical_points():
    spec = KernelSpec("rbf", 3.7)
    assert eval_kernel(spec, 3.7, [1.0, 2.0], [1.0, 2.0]) == 1.0


def test_eval_kernel_linear_dot_product():
    assert eval_kernel(KernelSpec("linear"), 1.0, [1.0, 2.0], [3.0, 4.0]) == 11.0


def test_eval_kernel_rbf_known_value():
    # gamma=0.5, ||x-y||^2 = 4 -> exp(-2) = 0.1353352832366127
    v = eval_kernel(KernelSpec("rbf", 0.5), 0.5, [0.0], [2.0])
    assert v == pytest.approx(math.exp(-2.0), abs=1e-15)
    assert v == pytest.approx(0.135335, abs=1e-6)


def test_eval_kernel_polynomial():
    # (0.5 * 11 + 1)^2 = 42.25
    spec = KernelSpec("polynomial", 0.5, degree=2, coef0=1.0)
    assert eval_kernel(spec, 0.5, [1.0, 2.0], [3.0, 4.0]) == pytest.approx(42.25)


def test_eval_kernel_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        eval_kernel(KernelSpec("linear"), 1.0, [1.0], [1.0, 2.0])


@pytest.mark.parametrize("kind,gamma", [("linear", 1.0), ("rbf", 0.3),
                                        ("polynomial", 0.2)])
def test_eval_kernel_symmetry_exact(kind, gamma):
    spec = KernelSpec(kind, gamma, degree=3, coef0=0.5)
    rng = np.random.default_rng(2)
    for _ in range(25):
        x = rng.normal(size=4)
        y = rng.normal(size=4)
        assert eval_kernel(spec, gamma, x, y) == eval_kernel(spec, gamma, y, x)


def test_rbf_bounded_and_one_only_at_equal_points():
    spec = KernelSpec("rbf", 0.9)
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = rng.normal(size=3)
        y = rng.normal(size=3)
        v = eval_kernel(spec, 0.9, x, y)
        assert 0.0 < v < 1.0
    assert eval_kernel(spec, 0.9, x, x) == 1.0


def test_gram_single_linear_point():
    K = gram_matrix(KernelSpec("linear"), 1.0, [[1.0]])
    assert K.shape == (1, 1) and K[0, 0] == 1.0


def test_gram_rbf_diagonal_and_symmetry():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(7, 3))
    K = gram_matrix(KernelSpec("rbf", 0.4), 0.4, X)
    assert np.all(np.diag(K) == 1.0)
    assert np.array_equal(K, K.T)  # mirrored, so exactly symmetric


@pytest.mark.parametrize("kind,gamma", [("rbf", 0.5), ("linear", 1.0)])
def test_gram_psd_on_random_inputs(kind, gamma):
    # eigenvalue check via an independent dense eigensolver
    rng = np.random.default_rng(5)
    for n in (2, 6, 20, 50):
        X = rng.normal(size=(n, 3))
        K = gram_matrix(KernelSpec(kind, gamma), gamma, X)
        assert np.linalg.eigvalsh(K)[0] >= -1e-10


def test_gram_matches_eval_kernel_entries():
    rng = np.random.default_rng(6)
    X = rng.normal(size=(5, 2))
    spec = KernelSpec("rbf", 0.8)
    K = gram_matrix(spec, 0.8, X)
    for i in range(5):
        for j in range(5):
            assert K[i, j] == pytest.approx(
                eval_kernel(spec, 0.8, X[i], X[j]), rel=1e-12, abs=1e-15)


def test_kernel_matrix_cross_shape_and_values():
    spec = KernelSpec("linear")
    X = np.array([[1.0, 0.0], [0.0, 1.0]])
    Y = np.array([[2.0, 2.0], [1.0, 1.0], [0.0, 3.0]])
    K = kernel_matrix(spec, 1.0, X, Y)
    assert K.shape == (2, 3)
    assert K[0, 0] == 2.0 and K[1, 2] == 3.0


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec("sigmoid")
    with pytest.raises(ValueError):
        KernelSpec("rbf", -1.0)
    with pytest.raises(ValueError):
        KernelSpec("polynomial", 1.0, degree=0)
    with pytest.raises(ValueError):
        KernelSpec("rbf", "median")
