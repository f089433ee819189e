import numpy as np
import pytest

from carboncast.baselines import BaselineSpec, fit_baseline
from carboncast.kernels import KernelSpec
from carboncast.serialize import (FORMAT_VERSION, ModelFormatError, dump_model,
                                  load_model, loads_model, save_model)
from carboncast.svm import SvmHyperParams, train_svc, train_svr


def svr_model():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(8, 2))
    y = rng.normal(size=8)
    return train_svr(X, y, SvmHyperParams(C=3.0, epsilon=0.1,
                                          kernel=KernelSpec("rbf", "scale")))


def test_svr_round_trip_bit_exact(tmp_path):
    model = svr_model()
    path = tmp_path / "model.txt"
    save_model(model, path)
    loaded = load_model(path)
    assert np.array_equal(loaded.support_X, model.support_X)
    assert np.array_equal(loaded.dual_coeffs, model.dual_coeffs)
    assert loaded.bias == model.bias              # bit-exact via hex floats
    assert loaded.kernel == model.kernel
    assert loaded.params == model.params
    assert loaded.diagnostics == model.diagnostics


def test_svc_round_trip(tmp_path):
    X = np.array([[-1.0, 0.0], [1.0, 0.5], [-2.0, 1.0], [2.0, -0.5]])
    y = np.array([-1.0, 1.0, -1.0, 1.0])
    model = train_svc(X, y, SvmHyperParams(C=10.0, kernel=KernelSpec("linear")))
    path = tmp_path / "svc.txt"
    save_model(model, path)
    loaded = load_model(path)
    assert type(loaded).__name__ == "SvcModel"
    assert np.array_equal(loaded.dual_coeffs, model.dual_coeffs)
    assert loaded.bias == model.bias


def test_baseline_round_trip(tmp_path):
    x = np.arange(8.0)[:, None]
    y = x[:, 0] ** 2
    model = fit_baseline(BaselineSpec("polynomial", degree=2), x, y)
    path = tmp_path / "lin.txt"
    save_model(model, path)
    loaded = load_model(path)
    assert np.array_equal(loaded.coefficients, model.coefficients)
    assert loaded.intercept == model.intercept
    assert loaded.spec == model.spec
    assert loaded.feature_expansion == model.feature_expansion


def test_serialized_reals_are_hex(tmp_path):
    text = dump_model(svr_model())
    assert "0x1." in text or "0x0." in text  # C99 hex float encoding
    assert text.startswith(f"format_version = {FORMAT_VERSION}")


def test_version_mismatch_rejected():
    text = dump_model(svr_model()).replace("format_version = 1",
                                           "format_version = 99")
    with pytest.raises(ModelFormatError):
        loads_model(text)


def test_malformed_record_rejected():
    with pytest.raises(ModelFormatError):
        loads_model("format_version = 1\ntype = svr\nnot a record line\n")
    with pytest.raises(ModelFormatError):
        loads_model("type = svr\n")  # missing version


def test_empty_support_set_round_trip(tmp_path):
    X = np.arange(5.0)[:, None]
    model = train_svr(X, np.full(5, 2.0),
                      SvmHyperParams(C=1.0, epsilon=0.5,
                                     kernel=KernelSpec("linear")))
    assert model.dual_coeffs.size == 0
    path = tmp_path / "empty.txt"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.dual_coeffs.size == 0
    assert loaded.bias == model.bias
