"""Dense matrix primitives shared by every other module.

Matrices are 2-D float64 ``numpy.ndarray`` values in C (row-major) order,
following the rows-are-samples convention used throughout the package.
Vectors (biases, label columns) are 1-D float64 arrays.  All operations are
deterministic: identical inputs give bit-identical outputs.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

RIDGE = 1e-8
_PIVOT_RATIO = 1e-7  # smallest/largest Cholesky pivot considered healthy


class ShapeMismatchError(ValueError):
    """Operands have incompatible shapes."""


class SingularMatrixError(ValueError):
    """System stayed numerically singular even after the ridge retry."""


def as_matrix(values) -> np.ndarray:
    """Coerce nested sequences / arrays to a 2-D float64 row-major matrix."""
    a = np.ascontiguousarray(values, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeMismatchError(f"expected a 2-D matrix, got ndim={a.ndim}")
    return a


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatchError(
            f"matmul: inner dimensions differ, {a.shape} x {b.shape}"
        )
    return a @ b


def solve_spd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b for symmetric positive (semi-)definite a.

    Uses a Cholesky factorization; if a pivot is non-positive the solve is
    retried once with a RIDGE added to the diagonal.  The ridge is scaled
    by the mean diagonal magnitude (floored at 1) so it stays effective
    when the matrix itself is far from unit scale.  A failure after the
    retry raises SingularMatrixError.
    """
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatchError(f"solve_spd: matrix must be square, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ShapeMismatchError(
            f"solve_spd: rhs has {b.shape[0]} rows, expected {a.shape[0]}"
        )
    # scipy reports non-positive pivots as LinAlgError and non-finite
    # entries as ValueError; neither shape reaches the caller raw.  A
    # factorization that technically succeeds with a vanishing pivot is
    # treated as near-singular too, otherwise it amplifies rounding noise
    # instead of converging to the minimal-norm solution.
    try:
        factor = cho_factor(a, lower=True)
        pivots = np.diag(factor[0])
        if pivots.min() < _PIVOT_RATIO * pivots.max():
            raise np.linalg.LinAlgError("near-singular pivot")
        x = cho_solve(factor, b)
    except (np.linalg.LinAlgError, ValueError):
        eps = RIDGE * max(1.0, float(np.abs(np.diag(a)).mean()))
        if not np.isfinite(eps):
            raise SingularMatrixError(
                f"solve_spd: matrix of shape {a.shape} has non-finite diagonal"
            )
        try:
            x = cho_solve(cho_factor(a + eps * np.eye(a.shape[0]), lower=True), b)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise SingularMatrixError(
                f"solve_spd: matrix of shape {a.shape} is singular even with "
                f"ridge {eps:g}"
            ) from exc
    if not np.all(np.isfinite(x)):
        raise SingularMatrixError(
            f"solve_spd: non-finite solution for matrix of shape {a.shape}"
        )
    return x


def frobenius_sq(a: np.ndarray) -> float:
    """Sum of squared entries."""
    flat = a.ravel()
    return float(flat @ flat)


def _check_same_shape(op: str, a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"{op}: shapes differ, {a.shape} vs {b.shape}")


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _check_same_shape("add", a, b)
    return a + b


def sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _check_same_shape("sub", a, b)
    return a - b


def scale(a: np.ndarray, c: float) -> np.ndarray:
    return c * a


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _check_same_shape("hadamard", a, b)
    return a * b
