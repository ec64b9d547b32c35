"""Dense numerical kernels shared by the distance-regression models.

Pairwise Euclidean distances, ridge-regularized least squares, and
hat-matrix rows for closed-form leave-one-out predictions. Everything is
float64 and deterministic: repeated calls with identical inputs give
bit-identical results.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist


class SingularSystemError(np.linalg.LinAlgError):
    """Raised when the regularized normal equations cannot be solved."""


def _as_matrix(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def pairwise_distances(A, B) -> np.ndarray:
    """Euclidean distance matrix between the rows of A (N x M) and B (K x M)."""
    A = _as_matrix(A, "A")
    B = _as_matrix(B, "B")
    if A.shape[1] != B.shape[1]:
        raise ValueError(
            f"column mismatch: A has {A.shape[1]} columns, B has {B.shape[1]}"
        )
    # cdist sums squared differences directly (no a^2+b^2-2ab shortcut),
    # so entries are exact to rounding and never negative under the sqrt.
    return cdist(A, B, metric="euclidean")


class RegularizedGram:
    """Cholesky factorization of U = Dx^T Dx + alpha*I.

    Raises SingularSystemError if U is not positive definite after the
    alpha shift.
    """

    def __init__(self, Dx, alpha: float):
        Dx = _as_matrix(Dx, "Dx")
        if alpha < 0:
            raise ValueError("alpha must be non-negative")
        self.alpha = float(alpha)
        U = Dx.T @ Dx
        if alpha > 0:
            U[np.diag_indices_from(U)] += alpha
        self.base = U
        try:
            self._factor = cho_factor(U, lower=True)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(
                "U = Dx^T Dx + alpha*I is not positive definite"
            ) from exc

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve U z = rhs."""
        return cho_solve(self._factor, rhs)


def solve_regularized_ls(Dx, Dy, alpha: float) -> np.ndarray:
    """Minimize ||Dx B - Dy||_F^2 + alpha * ||B||_F^2 for B (K x C).

    Solved through a Cholesky factorization of the shifted Gram matrix.
    Falls back to a rank-revealing SVD least-squares solve when the Gram
    matrix is numerically indefinite (possible only for alpha == 0).
    """
    Dx = _as_matrix(Dx, "Dx")
    Dy = _as_matrix(Dy, "Dy")
    if Dx.shape[0] != Dy.shape[0]:
        raise ValueError("Dx and Dy must have the same number of rows")
    try:
        gram = RegularizedGram(Dx, alpha)
        return gram.solve(Dx.T @ Dy)
    except SingularSystemError:
        if alpha > 0:
            raise
        B, _, rank, _ = np.linalg.lstsq(Dx, Dy, rcond=None)
        if not np.all(np.isfinite(B)):
            raise SingularSystemError("least-squares fallback failed")
        return B


def hat_matrix_row(gram: RegularizedGram, Dx, i: int) -> np.ndarray:
    """Row i of H = Dx U^{-1} Dx^T without materializing all of H."""
    Dx = _as_matrix(Dx, "Dx")
    n = Dx.shape[0]
    if not 0 <= i < n:
        raise IndexError(f"row index {i} out of range for {n} rows")
    return Dx @ gram.solve(Dx[i])


def leverages(gram: RegularizedGram, Dx) -> np.ndarray:
    """Diagonal of H = Dx U^{-1} Dx^T, length N."""
    Dx = _as_matrix(Dx, "Dx")
    return np.einsum("ij,ji->i", Dx, gram.solve(Dx.T))
