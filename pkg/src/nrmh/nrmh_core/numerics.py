"""
Dense small-matrix linear algebra primitives.

All matrices handled here are small (n up to a few dozen), so the routines
favour simple, well-understood algorithms over throughput: a cyclic Jacobi
eigensolver for symmetric matrices, LAPACK's Hessenberg/QR iteration for
general spectra, and a squared fixed-point iteration for the discrete
Lyapunov equation. Every function is pure and safe to call concurrently.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
import numpy.typing as npt

from .errors import (
    NoConvergence,
    NotPositiveDefinite,
    NotSymmetric,
    UnstableMatrix,
)

logger = logging.getLogger("nrmh")

Matrix = npt.NDArray[np.float64]
Vector = npt.NDArray[np.float64]

JACOBI_MAX_SWEEPS = 100
JACOBI_TOLERANCE = 1e-13
JACOBI_THETA_CUTOFF = 1e100
SYMMETRY_TOLERANCE = 1e-12
LYAPUNOV_TOLERANCE = 1e-14
LYAPUNOV_MAX_DOUBLINGS = 64


@dataclass(frozen=True)
class SymEigen:
    """Eigen-decomposition A = V diag(eigenvalues) V' of a symmetric matrix.

    Eigenvalues are ascending; the columns of ``eigenvectors`` are orthonormal.
    """

    eigenvalues: Vector
    eigenvectors: Matrix

    def reconstruct(self) -> Matrix:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T

    def apply(self, func: Callable[[Vector], Vector]) -> Matrix:
        """Evaluate the matrix function V diag(func(eigenvalues)) V'."""
        return (self.eigenvectors * func(self.eigenvalues)) @ self.eigenvectors.T


def as_matrix(A, *, square: bool = True) -> Matrix:
    """Coerce input to a finite 2-D float array (scalars become 1x1)."""
    M = np.atleast_2d(np.array(A, dtype=float))
    if M.ndim != 2 or M.size == 0:
        raise ValueError(f"Expected a non-empty 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("Matrix has non-finite entries")
    if square and M.shape[0] != M.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {M.shape}")
    return M


def symmetry_defect(A: Matrix) -> float:
    return float(np.max(np.abs(A - A.T)))


def require_symmetric(A) -> Matrix:
    """Return A as a float matrix, raising NotSymmetric beyond tolerance."""
    M = as_matrix(A)
    defect = symmetry_defect(M)
    if defect > SYMMETRY_TOLERANCE * (1.0 + np.linalg.norm(M)):
        raise NotSymmetric(f"Matrix is not symmetric (max |A - A'| = {defect:.3e})")
    return M


def cholesky(A) -> Matrix:
    """Lower-triangular L with L L' = A."""
    M = require_symmetric(A)
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite(
            "Cholesky factorization failed: matrix is not positive definite"
        ) from e


def sym_eigen(A) -> SymEigen:
    """Cyclic Jacobi eigensolver for symmetric matrices."""
    a = require_symmetric(A).copy()
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    tol = JACOBI_TOLERANCE * np.linalg.norm(a)

    for sweep in range(JACOBI_MAX_SWEEPS + 1):
        off = float(np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2)))
        if off <= tol:
            break
        if sweep == JACOBI_MAX_SWEEPS:
            raise NoConvergence(
                f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps "
                f"(off-diagonal norm {off:.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > JACOBI_THETA_CUTOFF:
                    t = 0.5 / theta
                else:
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta**2 + 1.0))
                c = 1.0 / np.sqrt(t**2 + 1.0)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
                # the rotation annihilates (p, q); drop the rounding residue
                a[p, q] = a[q, p] = 0.0

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues)
    return SymEigen(eigenvalues=eigenvalues[order], eigenvectors=v[:, order])


def sym_sqrt(A) -> Matrix:
    """Symmetric square root of a positive semidefinite matrix."""
    return sym_eigen(A).apply(lambda lam: np.sqrt(np.clip(lam, 0.0, None)))


def sym_inv_sqrt(A) -> Matrix:
    """Inverse symmetric square root of a positive definite matrix."""
    eig = sym_eigen(A)
    if eig.eigenvalues[0] <= 0.0:
        raise NotPositiveDefinite("Matrix is not positive definite")
    return eig.apply(lambda lam: 1.0 / np.sqrt(lam))


def spectral_norm(A) -> float:
    """Operator 2-norm, sqrt(lambda_max(A'A))."""
    M = as_matrix(A, square=False)
    lam_max = sym_eigen(M.T @ M).eigenvalues[-1]
    return float(np.sqrt(max(lam_max, 0.0)))


def spectral_bound_radius(A) -> Tuple[float, float]:
    """Spectral bound (max real part) and spectral radius (max modulus) of A."""
    M = as_matrix(A)
    try:
        eigenvalues = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as e:
        raise NoConvergence(f"Eigenvalue iteration failed: {e}") from e
    return float(np.max(eigenvalues.real)), float(np.max(np.abs(eigenvalues)))


def solve_discrete_lyapunov(A, Q) -> Matrix:
    """Solve R = Q + A R A' for R.

    The fixed-point sequence R_{k+1} = Q + A R_k A' started at R_0 = Q is
    followed at indices 2^k - 1 (squared Smith iteration): with A_k = A^(2^k),
    R <- R + A_k R A_k'. Iteration stops once an update is below
    LYAPUNOV_TOLERANCE relative to the current iterate.
    """
    A = as_matrix(A)
    Q = require_symmetric(Q)
    if A.shape != Q.shape:
        raise ValueError(f"Shape mismatch: A is {A.shape}, Q is {Q.shape}")

    _, radius = spectral_bound_radius(A)
    if radius >= 1.0:
        raise UnstableMatrix(f"Spectral radius {radius:.6g} is not below 1")

    R = Q.copy()
    power = A.copy()
    for doubling in range(LYAPUNOV_MAX_DOUBLINGS):
        increment = power @ R @ power.T
        R = R + increment
        power = power @ power
        if np.linalg.norm(increment) <= LYAPUNOV_TOLERANCE * np.linalg.norm(R):
            logger.debug(f"Lyapunov iteration converged after {doubling + 1} doublings")
            return 0.5 * (R + R.T)

    raise NoConvergence(
        f"Lyapunov iteration did not converge in {LYAPUNOV_MAX_DOUBLINGS} doublings "
        f"(spectral radius {radius:.6g})"
    )
