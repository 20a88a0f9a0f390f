"""
Exact analysis of finite chains: stationary distributions, asymptotic
variance via the fundamental matrix, continuous-time uniformization and
large-deviations rate functions of the occupation measure.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import (
    InvariantViolation,
    NoConvergence,
    NotAperiodic,
    NotInvariant,
    Reducible,
    Singular,
)
from .markov import (
    NEGATIVE_ENTRY_TOLERANCE,
    as_distribution,
    as_stochastic,
    as_vorticity,
    make_compat_triple,
    mh_kernel,
    nrmh_kernel,
    stationarity_residual,
)
from .numerics import Matrix, Vector, as_matrix, spectral_bound_radius

logger = logging.getLogger("nrmh")

GENERATOR_TOLERANCE = 1e-12
RATE_GRADIENT_TOLERANCE = 1e-9
RATE_RANDOM_STARTS = 8
INVARIANCE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class GeneratorMatrix:
    """Generator of a continuous-time chain: nonnegative off-diagonal, zero row sums."""

    G: Matrix

    def __post_init__(self):
        G = as_matrix(self.G)
        off_diagonal = G[~np.eye(G.shape[0], dtype=bool)]
        if np.any(off_diagonal < 0.0):
            raise InvariantViolation("Generator has negative off-diagonal rates")
        defect = float(np.max(np.abs(G.sum(axis=1))))
        if defect > GENERATOR_TOLERANCE * max(1.0, float(np.max(np.abs(G)))):
            raise InvariantViolation(f"Generator rows do not sum to zero ({defect:.3e})")
        object.__setattr__(self, "G", G)

    @property
    def n(self) -> int:
        return self.G.shape[0]


@dataclass(frozen=True)
class RateEvalResult:
    value: float
    maximizer: Vector
    converged: bool


def _null_vector(A: Matrix) -> Vector:
    basis = scipy.linalg.null_space(A)
    if basis.shape[1] != 1:
        raise Reducible(
            f"Chain is reducible: invariant subspace has dimension {basis.shape[1]}"
        )
    v = basis[:, 0]
    v = np.clip(v / v.sum(), 0.0, None)
    return v / v.sum()


def stationary_distribution(P) -> Vector:
    """Normalized solution of pi' P = pi' for an irreducible P."""
    P = as_stochastic(P)
    return _null_vector(P.T - np.eye(P.shape[0]))


def asymptotic_variance_exact(P, pi, f) -> float:
    """sigma^2 = <f_bar, (2Z - I) f_bar>_pi with Z = (I - P + 1 pi')^-1."""
    P = as_stochastic(P)
    p = as_distribution(pi)
    p = p / p.sum()
    f = np.asarray(f, dtype=float).reshape(-1)
    n = P.shape[0]
    if p.size != n or f.size != n:
        raise InvariantViolation(
            f"Shape mismatch: P is {P.shape}, pi has {p.size} and f has {f.size} entries"
        )
    residual = stationarity_residual(P, p)
    if residual > INVARIANCE_TOLERANCE:
        raise NotInvariant(f"pi is not stationary for P (residual {residual:.3e})")

    ergodic_projector = np.outer(np.ones(n), p)
    _, radius = spectral_bound_radius(P - ergodic_projector)
    if radius >= 1.0 - 1e-12:
        raise NotAperiodic(
            f"P - 1 pi' has spectral radius {radius:.6g}; chain is periodic or reducible"
        )
    try:
        Z = np.linalg.inv(np.eye(n) - P + ergodic_projector)
    except np.linalg.LinAlgError as e:
        raise Singular("Fundamental matrix is singular") from e

    f_bar = f - p @ f
    value = float(p @ (f_bar * (2.0 * (Z @ f_bar) - f_bar)))
    return max(value, 0.0)


def uniformize(P, rate: float = 1.0) -> GeneratorMatrix:
    """G = rate * (P - I): jumps of P after independent Exp(rate) holding times."""
    if rate <= 0.0:
        raise ValueError(f"Uniformization rate must be positive, got {rate}")
    P = as_stochastic(P)
    G = rate * (P - np.eye(P.shape[0]))
    np.fill_diagonal(G, 0.0)
    np.fill_diagonal(G, -G.sum(axis=1))
    return GeneratorMatrix(G)


def _as_generator(G) -> GeneratorMatrix:
    return G if isinstance(G, GeneratorMatrix) else GeneratorMatrix(np.asarray(G, dtype=float))


def _rate_objective(w: Vector, weighted: Matrix) -> Tuple[float, Vector]:
    # F(v) = sum_xy mu(x) G(x,y) exp(v_y - v_x) with v_0 = 0 pinned; I_G = -min F
    v = np.concatenate(([0.0], w))
    terms = weighted * np.exp(v[None, :] - v[:, None])
    gradient = terms.sum(axis=0) - terms.sum(axis=1)
    return float(terms.sum()), gradient[1:]


def ld_rate_function(
    G, mu, *, starts: int = RATE_RANDOM_STARTS, seed: int = 0
) -> RateEvalResult:
    """Donsker-Varadhan rate I_G(mu) = sup_{u > 0} -sum_x mu(x) (Gu)(x) / u(x).

    The supremum only involves states in the support of mu; off the support
    u is driven to zero, so the optimization runs on the restriction of G to
    the support with u = exp(v) and the first support coordinate pinned.
    Starts are u = 1, u* = sqrt(mu / pi) and ``starts`` random points.
    """
    gen = _as_generator(G)
    mu = np.asarray(mu, dtype=float).reshape(-1)
    if mu.size != gen.n or np.any(mu < 0.0) or abs(mu.sum() - 1.0) > 1e-9:
        raise ValueError("mu must be a probability vector over the generator's states")

    support = np.flatnonzero(mu > 0.0)
    weighted = mu[support][:, None] * gen.G[np.ix_(support, support)]
    maximizer = np.zeros(gen.n)
    if support.size == 1:
        maximizer[support] = 1.0
        return RateEvalResult(value=max(-float(weighted[0, 0]), 0.0), maximizer=maximizer, converged=True)

    initial = [np.zeros(support.size - 1)]
    try:
        pi = _null_vector(gen.G.T)
        if np.all(pi[support] > 0.0):
            v_star = 0.5 * np.log(mu[support] / pi[support])
            initial.append(v_star[1:] - v_star[0])
    except Reducible:
        logger.debug("Generator is reducible; skipping the sqrt(mu/pi) start")
    rng = np.random.Generator(np.random.PCG64(seed))
    initial.extend(rng.normal(size=support.size - 1) for _ in range(starts))

    best: Optional[scipy.optimize.OptimizeResult] = None
    for w0 in initial:
        res = scipy.optimize.minimize(
            _rate_objective,
            w0,
            args=(weighted,),
            jac=True,
            method="BFGS",
            options={"gtol": RATE_GRADIENT_TOLERANCE, "maxiter": 2000},
        )
        if best is None or res.fun < best.fun:
            best = res

    grad_norm = float(np.max(np.abs(best.jac))) if best.jac.size else 0.0
    converged = bool(best.success) or grad_norm <= RATE_GRADIENT_TOLERANCE
    if not converged and grad_norm > 1e-6 * (1.0 + abs(best.fun)):
        raise NoConvergence(
            f"Rate function optimization stalled (gradient norm {grad_norm:.3e}): {best.message}"
        )
    if not converged:
        logger.warning(f"Rate function optimizer stopped early: {best.message}")

    v = np.concatenate(([0.0], best.x))
    maximizer[support] = np.exp(v)
    return RateEvalResult(value=max(-float(best.fun), 0.0), maximizer=maximizer, converged=converged)


def equivalence_check(H, gamma, pi) -> Tuple[Matrix, Matrix, float]:
    """Compare NRMH on Q = H + diag(pi)^-1 Gamma / 2 with MH on H shifted by the same term."""
    H = as_stochastic(H)
    pi = as_distribution(pi)
    gamma = as_vorticity(gamma)
    shift = gamma.full / (2.0 * pi[:, None])
    Q = H + shift
    if np.any(Q < -NEGATIVE_ENTRY_TOLERANCE):
        raise InvariantViolation("H + diag(pi)^-1 Gamma / 2 has negative entries")
    triple = make_compat_triple(np.clip(Q, 0.0, None), gamma, pi)
    P1 = nrmh_kernel(triple)
    P2 = mh_kernel(H, pi) + shift
    return P1, P2, float(np.max(np.abs(P1 - P2)))
