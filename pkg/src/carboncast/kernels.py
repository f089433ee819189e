"""Kernel evaluation and Gram-matrix construction.

Three kernels are supported: linear (x.y), RBF (exp(-gamma * ||x-y||^2)) and
polynomial ((gamma * x.y + coef0) ** degree).  Gamma may be given explicitly
or resolved from the data: 'auto' means 1/d and 'scale' means
1/(d * Var(X)) with the population variance taken over every entry of X.
All arithmetic is double precision.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionMismatch, EmptyData, ZeroVariance

KERNEL_KINDS = ("linear", "rbf", "polynomial")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel kind plus hyperparameters.

    The linear kernel ignores gamma/degree/coef0; they are retained so a
    spec round-trips unchanged through parsing and formatting.
    """

    kind: str
    gamma: Union[str, float] = "scale"
    degree: int = 3
    coef0: float = 0.0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if isinstance(self.gamma, str):
            if self.gamma not in ("scale", "auto"):
                raise ValueError(f"gamma must be 'scale', 'auto' or a positive number, got {self.gamma!r}")
        elif self.gamma <= 0:
            raise ValueError("explicit gamma must be > 0")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")

    @property
    def needs_data_gamma(self) -> bool:
        return isinstance(self.gamma, str)


def resolve_gamma(spec: KernelSpec, X) -> float:
    """Turn a gamma mode into a concrete positive value for the matrix X."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D feature matrix, got ndim={X.ndim}")
    n, d = X.shape
    if n == 0 or d == 0:
        raise EmptyData(f"feature matrix is empty (shape {X.shape})")
    if not isinstance(spec.gamma, str):
        return float(spec.gamma)
    if spec.gamma == "auto":
        return 1.0 / d
    variance = float(np.var(X))  # population variance over all entries
    if variance <= 0.0:
        raise ZeroVariance("'scale' gamma requested on a constant feature matrix")
    return 1.0 / (d * variance)


def eval_kernel(spec: KernelSpec, gamma: float, x, y) -> float:
    """Kernel value for a single pair of vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimensionMismatch(f"vector shapes differ: {x.shape} vs {y.shape}")
    if spec.kind == "linear":
        return float(np.dot(x, y))
    if spec.kind == "rbf":
        diff = x - y
        return float(np.exp(-gamma * np.dot(diff, diff)))
    return float((gamma * np.dot(x, y) + spec.coef0) ** spec.degree)


def kernel_matrix(spec: KernelSpec, gamma: float, X, Y) -> np.ndarray:
    """Cross-kernel matrix K[i, j] = k(X[i], Y[j]); shape (len(X), len(Y))."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim != 2 or Y.ndim != 2:
        raise DimensionMismatch("kernel_matrix expects 2-D inputs")
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatch(f"feature dimensions differ: {X.shape[1]} vs {Y.shape[1]}")
    dot = X @ Y.T
    if spec.kind == "linear":
        return dot
    if spec.kind == "rbf":
        sq = (np.sum(X * X, axis=1)[:, None]
              + np.sum(Y * Y, axis=1)[None, :]
              - 2.0 * dot)
        np.maximum(sq, 0.0, out=sq)  # rounding can push tiny distances negative
        return np.exp(-gamma * sq)
    return (gamma * dot + spec.coef0) ** spec.degree


def gram_matrix(spec: KernelSpec, gamma: float, X) -> np.ndarray:
    """Symmetric Gram matrix over the rows of X.

    Each entry is computed once (upper triangle) and mirrored, so the
    result is exactly symmetric; the RBF diagonal is exactly one.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch("gram_matrix expects a 2-D input")
    n = X.shape[0]
    if n < 1:
        raise EmptyData("gram_matrix needs at least one row")
    K = kernel_matrix(spec, gamma, X, X)
    if spec.kind == "rbf":
        np.fill_diagonal(K, 1.0)
    upper = np.triu(K)
    return upper + np.triu(K, 1).T
