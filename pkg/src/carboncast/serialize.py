"""Flat text serialization for trained models.

Line-oriented `key = value` records with a leading format-version line.
Every real number is stored as a C99 hex float (float.hex()), so a load
after a save reproduces each stored value bit for bit.  Matrix rows are
stored one line per row with space-separated hex floats.
"""

from pathlib import Path

import numpy as np

from .baselines import BaselineSpec, LinearModel
from .errors import CarboncastError
from .kernels import KernelSpec
from .svm import (SvcModel, SvmHyperParams, SvrModel, TrainingDiagnostics)

FORMAT_VERSION = 1


class ModelFormatError(CarboncastError):
    """Model file is malformed or has an unsupported version."""


def _hex(x: float) -> str:
    return float(x).hex()


def _unhex(s: str) -> float:
    return float.fromhex(s)


def _emit_common(lines, kind):
    lines.append(f"format_version = {FORMAT_VERSION}")
    lines.append(f"type = {kind}")


def dump_model(model) -> str:
    if isinstance(model, (SvrModel, SvcModel)):
        return _dump_svm(model)
    if isinstance(model, LinearModel):
        return _dump_linear(model)
    raise TypeError(f"cannot serialize {type(model).__name__}")


def _dump_svm(model) -> str:
    kind = "svr" if isinstance(model, SvrModel) else "svc"
    lines = []
    _emit_common(lines, kind)
    k = model.kernel
    lines.append(f"kernel = {k.kind}")
    gamma = k.gamma if isinstance(k.gamma, str) else _hex(k.gamma)
    lines.append(f"gamma = {gamma}")
    req = model.params.kernel.gamma
    lines.append(f"requested_gamma = {req if isinstance(req, str) else _hex(req)}")
    lines.append(f"degree = {k.degree}")
    lines.append(f"coef0 = {_hex(k.coef0)}")
    lines.append(f"C = {_hex(model.params.C)}")
    lines.append(f"epsilon = {_hex(model.params.epsilon)}")
    lines.append(f"bias = {_hex(model.bias)}")
    d = model.diagnostics
    lines.append(f"diag_iterations = {d.iterations}")
    lines.append(f"diag_duality_gap = {_hex(d.duality_gap)}")
    lines.append(f"diag_objective = {_hex(d.objective)}")
    lines.append(f"diag_converged = {int(d.converged)}")
    lines.append(f"diag_jitter_applied = {int(d.jitter_applied)}")
    s, dim = model.support_X.shape
    lines.append(f"n_support = {s}")
    lines.append(f"dim = {dim}")
    for row in model.support_X:
        lines.append("support = " + " ".join(_hex(v) for v in row))
    lines.append("coeffs = " + " ".join(_hex(v) for v in model.dual_coeffs))
    return "\n".join(lines) + "\n"


def _dump_linear(model: LinearModel) -> str:
    lines = []
    _emit_common(lines, "baseline")
    lines.append(f"kind = {model.spec.kind}")
    lines.append(f"lambda = {_hex(model.spec.lam)}")
    lines.append(f"degree = {model.spec.degree}")
    lines.append(f"expansion = {model.feature_expansion}")
    lines.append(f"input_dim = {model.input_dim}")
    lines.append(f"intercept = {_hex(model.intercept)}")
    lines.append("coefficients = " + " ".join(_hex(v) for v in model.coefficients))
    return "\n".join(lines) + "\n"


def save_model(model, path) -> None:
    Path(path).write_text(dump_model(model), encoding="utf-8", newline="\n")


def _parse_record(text: str):
    fields = {}
    supports = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ModelFormatError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "support":
            supports.append(value)
        else:
            if key in fields:
                raise ModelFormatError(f"line {lineno}: duplicate key {key!r}")
            fields[key] = value
    return fields, supports


def load_model(path):
    text = Path(path).read_text(encoding="utf-8")
    return loads_model(text)


def loads_model(text: str):
    fields, supports = _parse_record(text)
    try:
        version = int(fields["format_version"])
    except KeyError:
        raise ModelFormatError("missing format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version {version}")
    kind = fields.get("type")
    if kind in ("svr", "svc"):
        return _load_svm(fields, supports, kind)
    if kind == "baseline":
        return _load_linear(fields)
    raise ModelFormatError(f"unknown model type {kind!r}")


def _load_svm(fields, supports, kind):
    def gamma_value(text):
        return text if text in ("scale", "auto") else _unhex(text)

    gamma = gamma_value(fields["gamma"])
    spec = KernelSpec(fields["kernel"], gamma, int(fields["degree"]),
                      _unhex(fields["coef0"]))
    requested = KernelSpec(fields["kernel"], gamma_value(fields["requested_gamma"]),
                           int(fields["degree"]), _unhex(fields["coef0"]))
    params = SvmHyperParams(C=_unhex(fields["C"]), epsilon=_unhex(fields["epsilon"]),
                            kernel=requested)
    n_support = int(fields["n_support"])
    dim = int(fields["dim"])
    if len(supports) != n_support:
        raise ModelFormatError(f"expected {n_support} support rows, found {len(supports)}")
    X = np.array([[_unhex(v) for v in row.split()] for row in supports],
                 dtype=float).reshape(n_support, dim)
    coeff_text = fields["coeffs"].split()
    coeffs = np.array([_unhex(v) for v in coeff_text], dtype=float)
    if coeffs.shape[0] != n_support:
        raise ModelFormatError("coefficient count does not match support rows")
    diag = TrainingDiagnostics(iterations=int(fields["diag_iterations"]),
                               duality_gap=_unhex(fields["diag_duality_gap"]),
                               objective=_unhex(fields["diag_objective"]),
                               converged=bool(int(fields["diag_converged"])),
                               jitter_applied=bool(int(fields["diag_jitter_applied"])))
    cls = SvrModel if kind == "svr" else SvcModel
    return cls(support_X=X, dual_coeffs=coeffs, bias=_unhex(fields["bias"]),
               kernel=spec, params=params, diagnostics=diag)


def _load_linear(fields):
    spec = BaselineSpec(kind=fields["kind"], lam=_unhex(fields["lambda"]),
                        degree=int(fields["degree"]))
    coeff_text = fields["coefficients"].split()
    coeffs = np.array([_unhex(v) for v in coeff_text], dtype=float)
    return LinearModel(coefficients=coeffs, intercept=_unhex(fields["intercept"]),
                       feature_expansion=fields["expansion"],
                       input_dim=int(fields["input_dim"]), spec=spec)
