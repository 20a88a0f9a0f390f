"""
Random generators of admissible finite-state instances.

Vorticity matrices are drawn as random skew matrices projected onto the
zero-row-sum subspace and then scaled to a random fraction of the largest
admissible scale, so every instance satisfies its bound with slack.
"""

from dataclasses import dataclass

import numpy as np

from .markov import (
    CompatTriple,
    VorticityMatrix,
    additive_kernel,
    make_compat_triple,
    mh_kernel,
)
from .numerics import Matrix, Vector


@dataclass(frozen=True)
class ReversibleInstance:
    """A pi-reversible K, a vorticity Gamma and P = K + diag(pi)^-1 Gamma / 2."""

    K: Matrix
    gamma: VorticityMatrix
    pi: Vector
    P: Matrix


@dataclass(frozen=True)
class EquivalenceInstance:
    """H and Gamma such that H + diag(pi)^-1 Gamma / 2 is a compatible proposal."""

    H: Matrix
    gamma: VorticityMatrix
    pi: Vector


def random_stochastic(n: int, rng: np.random.Generator) -> Matrix:
    """Dense row-stochastic matrix with entries bounded away from zero."""
    Q = rng.uniform(0.1, 1.0, size=(n, n))
    return Q / Q.sum(axis=1, keepdims=True)


def random_distribution(n: int, rng: np.random.Generator) -> Vector:
    pi = rng.uniform(0.5, 2.0, size=n)
    return pi / pi.sum()


def random_vorticity_pattern(n: int, rng: np.random.Generator) -> Matrix:
    """Random skew-symmetric matrix with zero row sums (identically zero for n = 2)."""
    W = rng.normal(size=(n, n))
    W = W - W.T
    a = W.sum(axis=1)
    return W - (a[:, None] - a[None, :]) / n


def _max_scale(pattern: Matrix, limit: Matrix) -> float:
    """Largest s with s * pattern >= -limit wherever the pattern is negative."""
    negative = pattern < -1e-14
    if not negative.any():
        return 0.0
    return float(np.min(limit[negative] / -pattern[negative]))


def random_compatible_triple(
    n: int, rng: np.random.Generator, strict: bool = True
) -> CompatTriple:
    Q = random_stochastic(n, rng)
    pi = random_distribution(n, rng)
    pattern = random_vorticity_pattern(n, rng)
    scale = rng.uniform(0.1, 0.9) * _max_scale(pattern, pi[None, :] * Q.T)
    return make_compat_triple(Q, VorticityMatrix.from_matrix(scale * pattern), pi, strict=strict)


def random_reversible_instance(n: int, rng: np.random.Generator) -> ReversibleInstance:
    pi = random_distribution(n, rng)
    K = mh_kernel(random_stochastic(n, rng), pi)
    pattern = random_vorticity_pattern(n, rng)
    scale = rng.uniform(0.2, 0.9) * _max_scale(pattern, 2.0 * pi[:, None] * K)
    gamma = VorticityMatrix.from_matrix(scale * pattern)
    return ReversibleInstance(K=K, gamma=gamma, pi=pi, P=additive_kernel(K, gamma, pi))


def random_equivalence_instance(n: int, rng: np.random.Generator) -> EquivalenceInstance:
    pi = random_distribution(n, rng)
    H = random_stochastic(n, rng)
    flux = pi[:, None] * H
    pattern = random_vorticity_pattern(n, rng)
    scale = rng.uniform(0.1, 0.9) * _max_scale(pattern, 2.0 * np.minimum(flux, flux.T))
    return EquivalenceInstance(H=H, gamma=VorticityMatrix.from_matrix(scale * pattern), pi=pi)
