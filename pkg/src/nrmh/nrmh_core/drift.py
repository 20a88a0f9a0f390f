"""
Choice of the skew part S of the proposal drift.

The convergence rate of the proposal chain is governed by the spectral bound
s(B) of B = -(I + S) V^-1. Over skew-symmetric S the bound cannot go below
-tr(V^-1)/n, and that value is attained: in an orthogonal basis where V^-1
has constant diagonal, a weighted skew completion makes every eigenvalue of
B have real part exactly -tr(V^-1)/n. That construction seeds the search;
restarted quasi-Newton runs on a smoothed spectral bound follow, and the
best candidate by the true spectral bound wins.
"""

import logging
from typing import Tuple

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.special

from .gaussian import GaussianTarget, SkewDrift, optimal_spectral_bound
from .numerics import Matrix, Vector, spectral_bound_radius

logger = logging.getLogger("nrmh")

DEFAULT_RESTARTS = 32
SMOOTHING_TEMPERATURE = 1e3
IMPROVEMENT_TOLERANCE = 1e-9
EQUALIZE_TOLERANCE = 1e-14


def drift_spectral_bound(target: GaussianTarget, drift: SkewDrift) -> float:
    """s(B) for B = -(I + S) V^-1."""
    bound, _ = spectral_bound_radius(drift.drift_matrix(target))
    return bound


def equalizing_basis(D: Matrix) -> Matrix:
    """Orthogonal Psi with diag(Psi' D Psi) = tr(D)/n for symmetric D.

    Each Givens rotation moves one diagonal entry onto the mean, pairing it
    with an entry on the opposite side so the root is bracketed.
    """
    n = D.shape[0]
    mean = float(np.trace(D)) / n
    W = D.copy()
    Psi = np.eye(n)
    tol = EQUALIZE_TOLERANCE * max(1.0, abs(mean))
    for _ in range(n):
        deviation = np.diag(W) - mean
        i = int(np.argmax(np.abs(deviation)))
        if abs(deviation[i]) <= tol:
            break
        opposite = np.flatnonzero(np.sign(deviation) == -np.sign(deviation[i]))
        if opposite.size == 0:
            break
        j = int(opposite[np.argmax(np.abs(deviation[opposite]))])
        a, b, c = W[i, i], W[i, j], W[j, j]

        def rotated_entry(theta: float) -> float:
            cos, sin = np.cos(theta), np.sin(theta)
            return cos * cos * a + 2.0 * sin * cos * b + sin * sin * c - mean

        theta = scipy.optimize.brentq(rotated_entry, 0.0, np.pi / 2.0, xtol=1e-15)
        G = np.eye(n)
        G[i, i] = G[j, j] = np.cos(theta)
        G[j, i] = np.sin(theta)
        G[i, j] = -np.sin(theta)
        W = G.T @ W @ G
        Psi = Psi @ G
    return Psi


def equalizing_drift(target: GaussianTarget) -> SkewDrift:
    """Closed-form S with s(B) = -tr(V^-1)/n."""
    n = target.n
    if n == 1:
        return SkewDrift.zero(1)
    Psi = equalizing_basis(target.V_inv)
    D_hat = Psi.T @ target.V_inv @ Psi
    omega = np.arange(1, n + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        weights = (omega[:, None] + omega[None, :]) / (omega[:, None] - omega[None, :])
    np.fill_diagonal(weights, 0.0)
    J = Psi @ (weights * D_hat) @ Psi.T
    S = target.V_sqrt @ J @ target.V_sqrt
    return SkewDrift.from_matrix(0.5 * (S - S.T))


def _smoothed_bound(upper: Vector, target: GaussianTarget) -> Tuple[float, Vector]:
    n = target.n
    rows, cols = np.triu_indices(n, 1)
    S = np.zeros((n, n))
    S[rows, cols] = upper
    S[cols, rows] = -upper
    B = -(np.eye(n) + S) @ target.V_inv
    eigenvalues, left, right = scipy.linalg.eig(B, left=True, right=True)

    scaled = SMOOTHING_TEMPERATURE * eigenvalues.real
    value = float(scipy.special.logsumexp(scaled)) / SMOOTHING_TEMPERATURE
    weights = np.exp(scaled - scaled.max())
    weights /= weights.sum()

    # d lambda = l^H dB r / (l^H r) with dB = -dS V^-1
    overlap = np.sum(np.conj(left) * right, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        G = ((np.conj(left) * (weights / overlap)) @ (target.V_inv @ right).T).real
    gradient = -(G[rows, cols] - G[cols, rows])
    if not np.all(np.isfinite(gradient)):
        gradient = np.zeros_like(upper)
    return value, gradient


def optimize_skew_drift(
    target: GaussianTarget,
    budget: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> SkewDrift:
    """Skew drift S minimizing s(-(I + S) V^-1); never worse than S = 0."""
    n = target.n
    target_bound = optimal_spectral_bound(target)
    best = SkewDrift.zero(n)
    best_bound = drift_spectral_bound(target, best)
    if n == 1:
        return best

    def consider(candidate: SkewDrift, label: str) -> None:
        nonlocal best, best_bound
        bound = drift_spectral_bound(target, candidate)
        logger.debug(f"Drift candidate {label}: s(B) = {bound:.6g}")
        if bound < best_bound - IMPROVEMENT_TOLERANCE * abs(best_bound):
            best, best_bound = candidate, bound

    consider(equalizing_drift(target), "equalizing")

    rng = np.random.Generator(np.random.PCG64(seed))
    size = n * (n - 1) // 2
    starts = [best.upper.copy()] + [rng.normal(size=size) for _ in range(budget)]
    for restart, start in enumerate(starts):
        try:
            res = scipy.optimize.minimize(
                _smoothed_bound,
                start,
                args=(target,),
                jac=True,
                method="BFGS",
                options={"maxiter": 500},
            )
        except (np.linalg.LinAlgError, ValueError) as e:
            logger.warning(f"Drift restart {restart} failed: {e}")
            continue
        consider(SkewDrift(n=n, upper=res.x), f"restart {restart}")

    logger.info(
        f"Skew drift search: s(B) = {best_bound:.6g} "
        f"(reversible {drift_spectral_bound(target, SkewDrift.zero(n)):.6g}, optimum {target_bound:.6g})"
    )
    return best
