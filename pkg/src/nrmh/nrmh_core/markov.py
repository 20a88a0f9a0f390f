"""
Finite state space Metropolis-Hastings and its non-reversible extension.

Transition matrices, distributions and vorticity matrices are plain numpy
arrays validated on entry; the only wrapped types are ``VorticityMatrix``
(skew-symmetry holds by construction) and ``CompatTriple`` (a validated
proposal / vorticity / target combination). Distributions need not be
normalized; all checks depend on ratios only.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from .errors import (
    InvariantViolation,
    NegativeEntry,
    NotInvariant,
    NotReversible,
    NotStochastic,
    NotVorticity,
    SymmetricStructureViolated,
    VorticityBoundViolated,
)
from .numerics import Matrix, Vector, as_matrix

logger = logging.getLogger("nrmh")

STOCHASTIC_TOLERANCE = 1e-12
VORTICITY_TOLERANCE = 1e-12
NEGATIVE_ENTRY_TOLERANCE = 1e-15


def as_distribution(pi) -> Vector:
    """Validate a strictly positive (possibly unnormalized) distribution."""
    p = np.array(pi, dtype=float).reshape(-1)
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise InvariantViolation("Distribution must be a non-empty finite vector")
    if np.any(p <= 0.0):
        raise InvariantViolation(
            f"Distribution must be strictly positive, got minimum {p.min():.3e}"
        )
    return p


def as_stochastic(P) -> Matrix:
    """Validate a row-stochastic matrix."""
    M = as_matrix(P)
    if np.any(M < 0.0):
        x, y = np.argwhere(M < 0.0)[0]
        raise NotStochastic(f"Negative transition probability at ({x}, {y})")
    defect = np.max(np.abs(M.sum(axis=1) - 1.0))
    if defect > STOCHASTIC_TOLERANCE:
        raise NotStochastic(f"Rows do not sum to one (max deviation {defect:.3e})")
    return M


def _first_pair(mask: np.ndarray) -> Optional[Tuple[int, int]]:
    hits = np.argwhere(mask)
    if hits.size == 0:
        return None
    return int(hits[0, 0]), int(hits[0, 1])


@dataclass(frozen=True)
class VorticityMatrix:
    """Skew-symmetric matrix with zero row sums.

    Only the strict upper triangle is stored (row-major order of
    ``np.triu_indices(n, 1)``); the lower triangle and the zero diagonal are
    derived, so skew-symmetry cannot be broken. Zero row sums are checked at
    construction.
    """

    n: int
    upper: Vector

    def __post_init__(self):
        expected = self.n * (self.n - 1) // 2
        if self.upper.shape != (expected,):
            raise NotVorticity(
                f"Expected {expected} upper-triangle entries for n={self.n}, got {self.upper.shape}"
            )
        full = self.full
        defect = float(np.max(np.abs(full.sum(axis=1)))) if self.n else 0.0
        if defect > VORTICITY_TOLERANCE * max(1.0, float(np.max(np.abs(full)))):
            raise NotVorticity(f"Row sums are not zero (max |row sum| = {defect:.3e})")

    @classmethod
    def from_matrix(cls, gamma) -> "VorticityMatrix":
        G = as_matrix(gamma)
        defect = float(np.max(np.abs(G + G.T)))
        if defect > VORTICITY_TOLERANCE * max(1.0, float(np.max(np.abs(G)))):
            raise NotVorticity(f"Matrix is not skew-symmetric (max |G + G'| = {defect:.3e})")
        n = G.shape[0]
        return cls(n=n, upper=G[np.triu_indices(n, 1)].copy())

    @classmethod
    def zero(cls, n: int) -> "VorticityMatrix":
        return cls(n=n, upper=np.zeros(n * (n - 1) // 2))

    @cached_property
    def full(self) -> Matrix:
        G = np.zeros((self.n, self.n))
        rows, cols = np.triu_indices(self.n, 1)
        G[rows, cols] = self.upper
        G[cols, rows] = -self.upper
        return G

    def scaled(self, factor: float) -> "VorticityMatrix":
        return VorticityMatrix(n=self.n, upper=factor * self.upper)

    def __array__(self, dtype=None, copy=None):
        return self.full.astype(dtype) if dtype is not None else self.full.copy()


def as_vorticity(gamma) -> VorticityMatrix:
    if isinstance(gamma, VorticityMatrix):
        return gamma
    return VorticityMatrix.from_matrix(gamma)


@dataclass(frozen=True)
class CompatTriple:
    """A validated compatible combination (Q, Gamma, pi)."""

    Q: Matrix
    gamma: VorticityMatrix
    pi: Vector
    strict: bool = False


def cyclic_vorticity(n: int, scale: float = 1.0) -> VorticityMatrix:
    """Scaled cyclic pattern C with C(i, i+1) = 1 = -C(i+1, i) (indices mod n)."""
    if n < 3:
        raise ValueError("A cyclic vorticity pattern needs at least 3 states")
    G = np.zeros((n, n))
    for i in range(n):
        G[i, (i + 1) % n] = scale
        G[(i + 1) % n, i] = -scale
    return VorticityMatrix.from_matrix(G)


def check_symmetric_structure(Q) -> bool:
    """True iff Q(x, y) = 0 exactly when Q(y, x) = 0."""
    M = as_matrix(Q)
    zero = M == 0.0
    return bool(np.array_equal(zero, zero.T))


def make_compat_triple(Q, gamma, pi, strict: bool = False) -> CompatTriple:
    """Validate (Q, Gamma, pi) against the symmetric structure and vorticity bound.

    The bound is Gamma(x, y) >= -pi(y) Q(y, x); with ``strict`` the inequality
    must be strict on every off-diagonal pair with Q(y, x) > 0, so that the
    resulting chain keeps every transition Q allows.
    """
    Q = as_stochastic(Q)
    pi = as_distribution(pi)
    gamma = as_vorticity(gamma)
    n = Q.shape[0]
    if pi.shape != (n,) or gamma.n != n:
        raise InvariantViolation(
            f"Shape mismatch: Q is {Q.shape}, pi has {pi.size} entries, Gamma is {gamma.n}x{gamma.n}"
        )

    zero = Q == 0.0
    pair = _first_pair(zero != zero.T)
    if pair is not None:
        raise SymmetricStructureViolated(
            f"Symmetric structure violated at {pair}: Q{pair} and its reverse disagree on zero",
            pair,
        )

    G = gamma.full
    lower = -pi[None, :] * Q.T
    tol = VORTICITY_TOLERANCE * float(np.max(pi[:, None] * Q))
    violated = G < lower - tol
    if strict:
        off_diagonal = ~np.eye(n, dtype=bool)
        violated |= off_diagonal & (Q.T > 0.0) & (G <= lower + tol)
    pair = _first_pair(violated)
    if pair is not None:
        x, y = pair
        relation = ">" if strict else ">="
        raise VorticityBoundViolated(
            f"Vorticity bound violated at ({x}, {y}): Gamma = {G[x, y]:.6g} "
            f"is not {relation} -pi(y)Q(y,x) = {lower[x, y]:.6g}",
            pair,
        )
    return CompatTriple(Q=Q, gamma=gamma, pi=pi, strict=strict)


def _acceptance(Q: Matrix, G: Matrix, pi: Vector) -> Tuple[Matrix, Matrix]:
    flux = pi[:, None] * Q
    numerator = G + flux.T
    ratio = np.ones_like(Q)
    support = flux != 0.0
    ratio[support] = numerator[support] / flux[support]
    # rounding can push a ratio a hair below zero when the bound is tight
    accept = np.clip(ratio, 0.0, 1.0)
    return ratio, accept


def _kernel(Q: Matrix, accept: Matrix) -> Matrix:
    P = Q * accept
    np.fill_diagonal(P, 0.0)
    np.fill_diagonal(P, 1.0 - P.sum(axis=1))
    return P


def hastings_ratio_matrix(t: CompatTriple) -> Tuple[Matrix, Matrix]:
    """Non-reversible Hastings ratios R_Gamma and acceptance probabilities A_Gamma."""
    return _acceptance(t.Q, t.gamma.full, t.pi)


def nrmh_kernel(t: CompatTriple) -> Matrix:
    """Transition matrix P_Gamma of non-reversible Metropolis-Hastings."""
    _, accept = hastings_ratio_matrix(t)
    return _kernel(t.Q, accept)


def mh_kernel(Q, pi) -> Matrix:
    """Classical Metropolis-Hastings transition matrix P_0."""
    Q = as_stochastic(Q)
    pi = as_distribution(pi)
    if not check_symmetric_structure(Q):
        pair = _first_pair((Q == 0.0) != (Q.T == 0.0))
        raise SymmetricStructureViolated(
            f"Symmetric structure violated at {pair}", pair
        )
    _, accept = _acceptance(Q, np.zeros_like(Q), pi)
    return _kernel(Q, accept)


def skew_flux(P, pi) -> Matrix:
    """diag(pi) P - P' diag(pi), without requiring pi to be invariant."""
    P = as_matrix(P)
    pi = as_distribution(pi)
    flux = pi[:, None] * P
    return flux - flux.T


def vorticity_of(P, pi) -> VorticityMatrix:
    """The vorticity matrix of (P, pi); raises NotInvariant unless pi P = pi."""
    G = skew_flux(as_stochastic(P), pi)
    defect = float(np.max(np.abs(G.sum(axis=1))))
    if defect > VORTICITY_TOLERANCE * max(1.0, float(np.sum(pi))):
        raise NotInvariant(
            f"Distribution is not invariant for P (max |Gamma 1| = {defect:.3e})"
        )
    return VorticityMatrix.from_matrix(G)


def stationarity_residual(P, pi) -> float:
    """max |pi P - pi| relative to the total mass of pi."""
    P = as_matrix(P)
    pi = as_distribution(pi)
    return float(np.max(np.abs(pi @ P - pi)) / pi.sum())


def is_reversible(P, pi, tol: float = VORTICITY_TOLERANCE) -> bool:
    """Detailed balance pi(x)P(x,y) = pi(y)P(y,x) within tolerance."""
    G = skew_flux(P, pi)
    return bool(np.max(np.abs(G)) <= tol * max(1.0, float(np.sum(pi))))


def time_reversal(P, pi) -> Matrix:
    """P_hat(x, y) = pi(y) P(y, x) / pi(x)."""
    vorticity_of(P, pi)
    P = as_matrix(P)
    pi = as_distribution(pi)
    return pi[None, :] * P.T / pi[:, None]


def reversible_part(P, pi) -> Matrix:
    """K = (P + P_hat) / 2, reversible with respect to pi."""
    return 0.5 * (as_matrix(P) + time_reversal(P, pi))


def additive_kernel(K, gamma, pi) -> Matrix:
    """P = K + diag(pi)^-1 Gamma / 2 for a pi-reversible K."""
    K = as_stochastic(K)
    pi = as_distribution(pi)
    gamma = as_vorticity(gamma)
    if not is_reversible(K, pi):
        raise NotReversible("K does not satisfy detailed balance with respect to pi")
    P = K + gamma.full / (2.0 * pi[:, None])
    pair = _first_pair(P < -NEGATIVE_ENTRY_TOLERANCE)
    if pair is not None:
        raise NegativeEntry(
            f"K + diag(pi)^-1 Gamma / 2 is negative at {pair}: {P[pair]:.6g}", pair
        )
    return np.clip(P, 0.0, None)


def sample_chain(P, x0: int, n: int, seed: int) -> np.ndarray:
    """Sample a length-n path of the chain P started at x0 (x0 included)."""
    P = as_stochastic(P)
    states = P.shape[0]
    if not 0 <= x0 < states:
        raise ValueError(f"Initial state {x0} outside 0..{states - 1}")
    rng = np.random.Generator(np.random.PCG64(seed))
    cumulative = np.cumsum(P, axis=1)
    cumulative[:, -1] = 1.0
    path = np.empty(n, dtype=np.int64)
    if n == 0:
        return path
    path[0] = x0
    draws = rng.random(n - 1)
    for i, u in enumerate(draws):
        path[i + 1] = np.searchsorted(cumulative[path[i]], u, side="right")
    return path
