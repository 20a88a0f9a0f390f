"""
Non-reversible Metropolis-Hastings for Gaussian targets.

The proposal is the Euler step of an Ornstein-Uhlenbeck process with skew
drift, y ~ N((I + hB) x, 2h sigma^2 I) with B = -(I + S) V^-1. The proposal
chain is stationary under N(0, R), R the solution of the discrete Lyapunov
equation, and its stationary joint density f of (X_k, X_{k+1}) yields the
vorticity density gamma(x, y) = f(x, y) - f(y, x). The acceptance ratio is

    R(x, y) = (c gamma(x, y) + pi(y) q(y, x)) / (pi(x) q(x, y)),

which is nonnegative whenever (h, sigma, c) satisfy the compatibility
conditions enforced by ``NRMHParams``.

All densities are handled in log space. The four log densities of a pair are

    l0 = log pi(x) q(x, y)    l1 = log f(x, y)
    l3 = log pi(y) q(y, x)    l2 = log f(y, x)

and the ratio is assembled relative to l0.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Literal, Tuple, Union

import numpy as np

from .errors import (
    EnvelopeViolationDetected,
    InvariantViolation,
    NonFiniteRatio,
    ParameterViolation,
    Singular,
    UnstableMatrix,
    UnstableStepSize,
)
from .numerics import (
    Matrix,
    Vector,
    as_matrix,
    cholesky,
    require_symmetric,
    solve_discrete_lyapunov,
    spectral_bound_radius,
    spectral_norm,
    sym_eigen,
)
from .rng import GaussianStream

logger = logging.getLogger("nrmh")

LOG_2PI = math.log(2.0 * math.pi)
PARAMETER_TOLERANCE = 1e-12
NEGATIVE_RATIO_TOLERANCE = 1e-12
IDENTITY_TOLERANCE = 1e-8
ORDER_TOLERANCE = 1e-10
SKEW_TOLERANCE = 1e-12

Scalars = Union[float, Vector]


@dataclass(frozen=True)
class GaussianTarget:
    """Centered Gaussian N(0, V) with cached factorizations."""

    V: Matrix
    V_inv: Matrix
    chol: Matrix
    logdet: float
    V_sqrt: Matrix
    V_inv_sqrt: Matrix

    @classmethod
    def from_covariance(cls, V) -> "GaussianTarget":
        V = require_symmetric(V)
        L = cholesky(V)
        n = V.shape[0]
        L_inv = np.linalg.solve(L, np.eye(n))
        V_inv = L_inv.T @ L_inv
        V_inv = 0.5 * (V_inv + V_inv.T)
        defect = float(np.max(np.abs(V @ V_inv - np.eye(n))))
        if defect > 1e-10 * float(np.linalg.cond(V)):
            raise Singular(f"Covariance is numerically singular (|V V^-1 - I| = {defect:.3e})")
        eig = sym_eigen(V)
        return cls(
            V=V,
            V_inv=V_inv,
            chol=L,
            logdet=float(2.0 * np.sum(np.log(np.diag(L)))),
            V_sqrt=eig.apply(np.sqrt),
            V_inv_sqrt=eig.apply(lambda lam: 1.0 / np.sqrt(lam)),
        )

    @classmethod
    def diagonal(cls, variances) -> "GaussianTarget":
        return cls.from_covariance(np.diag(np.asarray(variances, dtype=float)))

    @property
    def n(self) -> int:
        return self.V.shape[0]


@dataclass(frozen=True)
class SkewDrift:
    """Skew-symmetric S stored by its strict upper triangle."""

    n: int
    upper: Vector

    def __post_init__(self):
        if self.upper.shape != (self.n * (self.n - 1) // 2,):
            raise InvariantViolation(f"Wrong number of upper-triangle entries for n={self.n}")

    @classmethod
    def from_matrix(cls, S) -> "SkewDrift":
        S = as_matrix(S)
        defect = float(np.max(np.abs(S + S.T)))
        if defect > SKEW_TOLERANCE * max(1.0, float(np.max(np.abs(S)))):
            raise InvariantViolation(f"Drift matrix is not skew-symmetric (max |S + S'| = {defect:.3e})")
        n = S.shape[0]
        return cls(n=n, upper=S[np.triu_indices(n, 1)].copy())

    @classmethod
    def zero(cls, n: int) -> "SkewDrift":
        return cls(n=n, upper=np.zeros(n * (n - 1) // 2))

    @cached_property
    def S(self) -> Matrix:
        S = np.zeros((self.n, self.n))
        rows, cols = np.triu_indices(self.n, 1)
        S[rows, cols] = self.upper
        S[cols, rows] = -self.upper
        return S

    def drift_matrix(self, target: GaussianTarget) -> Matrix:
        """B = -(I + S) V^-1."""
        return -(np.eye(self.n) + self.S) @ target.V_inv


def _sigma_squared_limit(h: float, C1: float, C2: float) -> float:
    return (2.0 - h * C2) / (2.0 - h * (C2 - C1))


@dataclass(frozen=True)
class NRMHParams:
    """Step size h, diffusivity sigma and vorticity scale c with the constants they were checked against."""

    h: float
    sigma: float
    c: float
    C1: float
    C2: float
    n: int

    def __post_init__(self):
        h, sigma, c = self.h, self.sigma, self.c
        if not (h > 0.0 and sigma > 0.0 and c >= 0.0):
            raise ParameterViolation(f"Need h > 0, sigma > 0, c >= 0 (got h={h}, sigma={sigma}, c={c})")
        if not h < 2.0 / self.C2:
            raise ParameterViolation(f"Step size h={h:.6g} is not below 2/C2 = {2.0 / self.C2:.6g}")
        limit = _sigma_squared_limit(h, self.C1, self.C2)
        if sigma**2 > limit * (1.0 + PARAMETER_TOLERANCE):
            raise ParameterViolation(
                f"sigma^2 = {sigma**2:.6g} exceeds (2 - hC2)/(2 - h(C2 - C1)) = {limit:.6g}"
            )
        if c > sigma**self.n * (1.0 + PARAMETER_TOLERANCE):
            raise ParameterViolation(f"Vorticity scale c={c:.6g} exceeds sigma^n = {sigma**self.n:.6g}")

    @property
    def noise_variance(self) -> float:
        return 2.0 * self.h * self.sigma**2


def compute_constants(target: GaussianTarget, drift: SkewDrift) -> Tuple[float, float]:
    """C1 = |V^-1/2 (I+S) V^-1 (I-S) V^1/2| and C2 = |V^-1/2 (I+S) V^-1/2|^2 |V|."""
    _check_dimensions(target, drift)
    eye = np.eye(target.n)
    S = drift.S
    C1 = spectral_norm(target.V_inv_sqrt @ (eye + S) @ target.V_inv @ (eye - S) @ target.V_sqrt)
    C2 = spectral_norm(target.V_inv_sqrt @ (eye + S) @ target.V_inv_sqrt) ** 2 * spectral_norm(target.V)
    if C1 > C2 * (1.0 + 1e-10):
        raise InvariantViolation(f"Constants out of order: C1={C1:.6g} > C2={C2:.6g}")
    return min(C1, C2), C2


def _check_dimensions(target: GaussianTarget, drift: SkewDrift) -> None:
    if drift.n != target.n:
        raise InvariantViolation(f"Drift is {drift.n}-dimensional but target is {target.n}-dimensional")


def lyapunov_step_bound(target: GaussianTarget, drift: SkewDrift) -> float:
    """2 / |V^-1/2 (I - S^2) V^-1/2|, below which I + hB is a contraction."""
    _check_dimensions(target, drift)
    S = drift.S
    return 2.0 / spectral_norm(target.V_inv_sqrt @ (np.eye(target.n) - S @ S) @ target.V_inv_sqrt)


def optimal_spectral_bound(target: GaussianTarget) -> float:
    """-tr(V^-1)/n, the smallest spectral bound of B over skew S."""
    return -float(np.trace(target.V_inv)) / target.n


def select_params(
    target: GaussianTarget,
    drift: SkewDrift,
    strategy: Literal["optimal", "taylor"] = "optimal",
) -> NRMHParams:
    """Choose (h, sigma, c) maximizing the admissible vorticity scale h * sigma(h)^n.

    sigma(h) is the largest admissible diffusivity at step size h and
    c = sigma^n. The "taylor" strategy uses the first-order step size
    4 / ((n + 2) C2) for every C1.
    """
    C1, C2 = compute_constants(target, drift)
    return params_from_constants(C1, C2, target.n, strategy)


def params_from_constants(
    C1: float, C2: float, n: int, strategy: Literal["optimal", "taylor"] = "optimal"
) -> NRMHParams:
    """The selection rule of select_params applied to given constants 0 < C1 <= C2."""
    if not 0.0 < C1 <= C2 * (1.0 + 1e-10):
        raise ValueError(f"Need 0 < C1 <= C2, got C1={C1}, C2={C2}")
    if strategy == "taylor" or math.isclose(C1, C2, rel_tol=1e-9):
        h = 4.0 / ((n + 2) * C2)
    elif strategy == "optimal":
        gap = C2 - C1
        h = (
            2.0 / C2
            + (n + 2) * C1 / (2.0 * C2 * gap)
            - math.sqrt((n - 2) ** 2 * C1**2 + 8.0 * n * C1 * C2) / (2.0 * C2 * gap)
        )
    else:
        raise ValueError(f"Unknown parameter selection strategy: {strategy}")
    sigma = math.sqrt(_sigma_squared_limit(h, C1, C2))
    params = NRMHParams(h=h, sigma=sigma, c=sigma**n, C1=C1, C2=C2, n=n)
    logger.info(
        f"Selected parameters ({strategy}): c={params.c:.4f} h={params.h:.4g} "
        f"sigma={params.sigma:.4f} (C1={C1:.4g}, C2={C2:.4g})"
    )
    return params


@dataclass(frozen=True)
class ProposalModel:
    """The Gaussian proposal together with the stationary objects of the proposal chain."""

    target: GaussianTarget
    drift: SkewDrift
    params: NRMHParams
    A: Matrix
    R: Matrix
    R_inv: Matrix
    logdet_R: float
    M: Matrix
    M_inv: Matrix
    log_norm_f: float
    log_norm_piq: float
    noise_std: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "noise_std", math.sqrt(self.params.noise_variance))

    @property
    def n(self) -> int:
        return self.target.n


def _joint_inverse(inner: Matrix, A: Matrix, noise: float) -> Matrix:
    n = A.shape[0]
    top = inner + A.T @ A / noise
    return np.block([[top, -A.T / noise], [-A / noise, np.eye(n) / noise]])


def build_proposal(target: GaussianTarget, drift: SkewDrift, params: NRMHParams) -> ProposalModel:
    """Solve for R, assemble M and its closed-form inverse, and verify the model.

    Verified at construction: M M^-1 = I, det M = (2h sigma^2)^n det R,
    sigma^2 V <= R <= sigma^2 (2 - h(C2 - C1)) / (2 - hC2) V in the Loewner
    order and the V-norm bound on B R B'.
    """
    _check_dimensions(target, drift)
    if params.n != target.n:
        raise ParameterViolation(f"Parameters were selected for n={params.n}, target has n={target.n}")
    n = target.n
    h, sigma2 = params.h, params.sigma**2
    noise = params.noise_variance

    step_bound = lyapunov_step_bound(target, drift)
    if h >= step_bound:
        raise UnstableStepSize(f"Step size h={h:.6g} is not below the contraction bound {step_bound:.6g}")
    B = drift.drift_matrix(target)
    A = np.eye(n) + h * B
    _, radius = spectral_bound_radius(A)
    if radius >= 1.0:
        raise UnstableStepSize(f"I + hB has spectral radius {radius:.6g} at h={h:.6g}")

    try:
        R = solve_discrete_lyapunov(A, noise * np.eye(n))
    except UnstableMatrix as e:
        raise UnstableStepSize(str(e)) from e
    L = cholesky(R)
    L_inv = np.linalg.solve(L, np.eye(n))
    R_inv = L_inv.T @ L_inv
    R_inv = 0.5 * (R_inv + R_inv.T)
    logdet_R = float(2.0 * np.sum(np.log(np.diag(L))))

    M = np.block([[R, R @ A.T], [A @ R, R]])
    M_inv = _joint_inverse(R_inv, A, noise)

    defect = float(np.max(np.abs(M @ M_inv - np.eye(2 * n))))
    if defect > IDENTITY_TOLERANCE * max(1.0, float(np.max(np.abs(M)))):
        raise InvariantViolation(f"Closed-form M^-1 does not invert M (defect {defect:.3e})")

    _, logdet_M = np.linalg.slogdet(M)
    expected = n * math.log(noise) + logdet_R
    if abs(math.expm1(logdet_M - expected)) > IDENTITY_TOLERANCE:
        raise InvariantViolation(
            f"det M = (2h sigma^2)^n det R fails (log det M = {logdet_M:.12g}, expected {expected:.12g})"
        )

    scale = float(np.max(np.abs(R)))
    lower_gap = sym_eigen(R - sigma2 * target.V).eigenvalues[0]
    if lower_gap < -ORDER_TOLERANCE * scale:
        raise InvariantViolation(f"R >= sigma^2 V fails (smallest eigenvalue {lower_gap:.3e})")
    factor = (2.0 - h * (params.C2 - params.C1)) / (2.0 - h * params.C2)
    upper_gap = sym_eigen(R - sigma2 * factor * target.V).eigenvalues[-1]
    if upper_gap > ORDER_TOLERANCE * scale:
        raise InvariantViolation(f"R <= sigma^2 factor V fails (largest eigenvalue {upper_gap:.3e})")
    brb_norm = spectral_norm(target.V_inv_sqrt @ B @ R @ B.T @ target.V_sqrt)
    brb_bound = 2.0 * sigma2 * params.C1 / (2.0 - h * params.C2)
    if brb_norm > brb_bound * (1.0 + 1e-8) + ORDER_TOLERANCE:
        raise InvariantViolation(f"|B R B'|_V = {brb_norm:.6g} exceeds {brb_bound:.6g}")

    model = ProposalModel(
        target=target,
        drift=drift,
        params=params,
        A=A,
        R=R,
        R_inv=R_inv,
        logdet_R=logdet_R,
        M=M,
        M_inv=M_inv,
        log_norm_f=-n * LOG_2PI - 0.5 * (n * math.log(noise) + logdet_R),
        log_norm_piq=-n * LOG_2PI - 0.5 * target.logdet - 0.5 * n * math.log(noise),
    )
    logger.debug(f"Built proposal model for n={n}: h={h:.6g}, radius(I+hB)={radius:.6g}")
    return model


@dataclass(frozen=True)
class NonnegativityCertificate:
    """Quantities that certify c gamma(y, x) + pi(x) q(x, y) >= 0 everywhere."""

    min_precision_gap: float
    normalizer_gap: float
    holds: bool


def nonnegativity_certificate(model: ProposalModel) -> NonnegativityCertificate:
    """M^-1 - N^-1 = diag(R^-1 - V^-1, 0) must be PSD and c f must be dominated at the normalizer level."""
    n = model.n
    N_inv = _joint_inverse(model.target.V_inv, model.A, model.params.noise_variance)
    gap = model.M_inv - N_inv
    if float(np.max(np.abs(gap[n:, :]))) + float(np.max(np.abs(gap[:, n:]))) > IDENTITY_TOLERANCE * float(
        np.max(np.abs(model.M_inv))
    ):
        raise InvariantViolation("M^-1 - N^-1 is not supported on the leading block")
    min_gap = float(sym_eigen(model.R_inv - model.target.V_inv).eigenvalues[0])
    c = model.params.c
    normalizer_gap = math.inf if c == 0.0 else model.log_norm_piq - (math.log(c) + model.log_norm_f)
    scale = float(np.max(np.abs(model.R_inv)))
    holds = min_gap >= -ORDER_TOLERANCE * scale and normalizer_gap >= -1e-12
    return NonnegativityCertificate(min_precision_gap=min_gap, normalizer_gap=normalizer_gap, holds=holds)


def _rows(v) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(v, dtype=float)
    return np.atleast_2d(arr), arr.ndim == 1


def _quad(X: np.ndarray, Q: Matrix) -> Vector:
    return np.einsum("ij,jk,ik->i", X, Q, X)


def _unbatch(values: Vector, single: bool) -> Scalars:
    return float(values[0]) if single else values


def log_target_density(target: GaussianTarget, x) -> Scalars:
    X, single = _rows(x)
    values = -0.5 * (target.n * LOG_2PI + target.logdet) - 0.5 * _quad(X, target.V_inv)
    return _unbatch(values, single)


def log_proposal_density(model: ProposalModel, x, y) -> Scalars:
    """log q(x, y) for q(x, .) = N((I + hB) x, 2h sigma^2 I)."""
    X, single = _rows(x)
    Y, _ = _rows(y)
    noise = model.params.noise_variance
    d = Y - X @ model.A.T
    values = -0.5 * model.n * (LOG_2PI + math.log(noise)) - 0.5 * np.sum(d * d, axis=1) / noise
    return _unbatch(values, single)


def _log_parts(model: ProposalModel, X: np.ndarray, Y: np.ndarray):
    noise = model.params.noise_variance
    d_xy = Y - X @ model.A.T
    d_yx = X - Y @ model.A.T
    jump_xy = 0.5 * np.sum(d_xy * d_xy, axis=1) / noise
    jump_yx = 0.5 * np.sum(d_yx * d_yx, axis=1) / noise
    logf_xy = model.log_norm_f - 0.5 * _quad(X, model.R_inv) - jump_xy
    logf_yx = model.log_norm_f - 0.5 * _quad(Y, model.R_inv) - jump_yx
    logpiq_xy = model.log_norm_piq - 0.5 * _quad(X, model.target.V_inv) - jump_xy
    logpiq_yx = model.log_norm_piq - 0.5 * _quad(Y, model.target.V_inv) - jump_yx
    return logf_xy, logf_yx, logpiq_xy, logpiq_yx


def log_vorticity_parts(model: ProposalModel, x, y) -> Tuple[Scalars, Scalars, Scalars, Scalars]:
    """(log f(x,y), log f(y,x), log pi(x)q(x,y), log pi(y)q(y,x)) for a pair or stacked pairs."""
    X, single = _rows(x)
    Y, _ = _rows(y)
    return tuple(_unbatch(part, single) for part in _log_parts(model, X, Y))


def _assemble_ratio(l0: Vector, l1: Vector, l2: Vector, l3: Vector, c: float) -> Vector:
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = np.exp(l3 - l0) * (1.0 - c * np.exp(l2 - l3)) + c * np.exp(l1 - l0)
    if np.any(np.isnan(ratio)):
        raise NonFiniteRatio("Hastings ratio evaluated to NaN")
    negative = ratio < 0.0
    if np.any(negative):
        if np.any(ratio < -NEGATIVE_RATIO_TOLERANCE):
            raise ParameterViolation(
                f"Negative Hastings ratio {float(ratio.min()):.3e}: parameters are not compatible"
            )
        ratio = np.where(negative, 0.0, ratio)
    return ratio


def _ratio(model: ProposalModel, X: np.ndarray, Y: np.ndarray, c: float) -> Vector:
    logf_xy, logf_yx, logpiq_xy, logpiq_yx = _log_parts(model, X, Y)
    return _assemble_ratio(logpiq_xy, logf_xy, logf_yx, logpiq_yx, c)


def hastings_ratio(model: ProposalModel, x, y) -> Scalars:
    """(c gamma(x, y) + pi(y) q(y, x)) / (pi(x) q(x, y)), clamped at 0 for rounding noise."""
    X, single = _rows(x)
    Y, _ = _rows(y)
    return _unbatch(_ratio(model, X, Y, model.params.c), single)


def nonnegativity_margin(model: ProposalModel, x, y) -> Scalars:
    """(c gamma(y, x) + pi(x) q(x, y)) / (pi(x) q(x, y)); nonnegative for compatible parameters."""
    X, single = _rows(x)
    Y, _ = _rows(y)
    logf_xy, logf_yx, logpiq_xy, _ = _log_parts(model, X, Y)
    c = model.params.c
    with np.errstate(over="ignore"):
        margin = 1.0 + c * (np.exp(logf_yx - logpiq_xy) - np.exp(logf_xy - logpiq_xy))
    return _unbatch(margin, single)


def _propose(model: ProposalModel, x: Vector, stream: GaussianStream) -> Vector:
    return model.A @ x + model.noise_std * stream.normals(model.n)


def _accept_with(ratio: float, stream: GaussianStream) -> bool:
    # a uniform is drawn on every step so that paired chains stay aligned
    return stream.uniform() < ratio


def nrmh_step(model: ProposalModel, x: Vector, stream: GaussianStream) -> Tuple[Vector, bool]:
    """One non-reversible Metropolis-Hastings transition."""
    y = _propose(model, x, stream)
    ratio = float(_ratio(model, x[None, :], y[None, :], model.params.c)[0])
    if _accept_with(ratio, stream):
        return y, True
    return x, False


def mh_step(model: ProposalModel, x: Vector, stream: GaussianStream) -> Tuple[Vector, bool]:
    """Classical Metropolis-Hastings correction of the same skew-drift proposal."""
    y = _propose(model, x, stream)
    ratio = float(_ratio(model, x[None, :], y[None, :], 0.0)[0])
    if _accept_with(ratio, stream):
        return y, True
    return x, False


def mala_baseline_step(
    target: GaussianTarget, h: float, x: Vector, stream: GaussianStream
) -> Tuple[Vector, bool]:
    """MALA for N(0, V): proposal N((I - hV^-1) x, 2h I), classical MH acceptance."""
    if h <= 0.0:
        raise ParameterViolation(f"Step size must be positive, got {h}")
    A = np.eye(target.n) - h * target.V_inv
    y = A @ x + math.sqrt(2.0 * h) * stream.normals(target.n)
    d_xy = y - A @ x
    d_yx = x - A @ y
    log_ratio = (
        -0.5 * (y @ target.V_inv @ y - x @ target.V_inv @ x)
        - (d_yx @ d_yx - d_xy @ d_xy) / (4.0 * h)
    )
    if _accept_with(math.exp(min(log_ratio, 0.0)), stream):
        return y, True
    return x, False


@dataclass(frozen=True)
class GeneralTarget:
    """Unnormalized log density with a Gaussian envelope satisfying k * pi_0 <= pi."""

    log_pi: Callable[[Vector], float]
    envelope: GaussianTarget
    k: float

    def __post_init__(self):
        if not self.k > 0.0:
            raise ParameterViolation(f"Envelope constant must be positive, got {self.k}")


def _check_envelope_model(gt: GeneralTarget, model: ProposalModel) -> None:
    if model.target is not gt.envelope and not np.array_equal(model.target.V, gt.envelope.V):
        raise InvariantViolation("Proposal model was not built for the target's envelope")


def _general_ratio(gt: GeneralTarget, model: ProposalModel, X: np.ndarray, Y: np.ndarray) -> Vector:
    logf_xy, logf_yx, logpiq_xy, logpiq_yx = _log_parts(model, X, Y)
    log_pi_x = np.array([gt.log_pi(row) for row in X], dtype=float)
    log_pi_y = np.array([gt.log_pi(row) for row in Y], dtype=float)
    # swap the envelope density for the target's inside pi(x) q(x, y)
    a0 = logpiq_xy + log_pi_x - log_target_density(gt.envelope, X)
    a3 = logpiq_yx + log_pi_y - log_target_density(gt.envelope, Y)
    scale = gt.k * model.params.c
    with np.errstate(over="ignore", invalid="ignore"):
        vorticity = scale * (np.exp(logf_xy - a0) - np.exp(logf_yx - a0))
        ratio = np.exp(a3 - a0) + vorticity
    if np.any(np.isnan(ratio)):
        raise NonFiniteRatio("General target Hastings ratio evaluated to NaN")
    tolerance = NEGATIVE_RATIO_TOLERANCE * np.maximum(1.0, np.abs(vorticity))
    if np.any(ratio < -tolerance):
        i = int(np.argmin(ratio + tolerance))
        raise EnvelopeViolationDetected(
            f"Negative numerator at x={X[i]}, y={Y[i]}: k * pi_0 <= pi does not hold"
        )
    return np.clip(ratio, 0.0, None)


def general_target_ratio(gt: GeneralTarget, model: ProposalModel, x, y) -> Scalars:
    """(k c gamma(x, y) + pi(y) q(y, x)) / (pi(x) q(x, y)) with gamma built for the envelope."""
    _check_envelope_model(gt, model)
    X, single = _rows(x)
    Y, _ = _rows(y)
    return _unbatch(_general_ratio(gt, model, X, Y), single)


def general_nrmh_step(
    gt: GeneralTarget, model: ProposalModel, x: Vector, stream: GaussianStream
) -> Tuple[Vector, bool]:
    _check_envelope_model(gt, model)
    y = _propose(model, x, stream)
    ratio = float(_general_ratio(gt, model, x[None, :], y[None, :])[0])
    if _accept_with(ratio, stream):
        return y, True
    return x, False


def check_envelope(
    gt: GeneralTarget,
    model: ProposalModel,
    rng: np.random.Generator,
    pairs: int = 100_000,
    spread: float = 2.0,
) -> float:
    """Spot check the envelope on sampled pairs; returns the smallest normalized numerator.

    Points x are drawn from N(0, spread^2 V) and y from the proposal at x.
    Raises EnvelopeViolationDetected when k pi_0(x) > pi(x) at a sampled x or
    when a sampled pair has a negative ratio numerator.
    """
    _check_envelope_model(gt, model)
    n = model.n
    X = spread * rng.standard_normal((pairs, n)) @ gt.envelope.chol.T
    Y = X @ model.A.T + model.noise_std * rng.standard_normal((pairs, n))

    log_pi_x = np.array([gt.log_pi(row) for row in X], dtype=float)
    excess = math.log(gt.k) + log_target_density(gt.envelope, X) - log_pi_x
    if np.any(excess > 1e-12):
        i = int(np.argmax(excess))
        raise EnvelopeViolationDetected(f"k * pi_0(x) > pi(x) at x={X[i]} (log excess {excess[i]:.3e})")

    ratio = _general_ratio(gt, model, X, Y)
    worst = float(ratio.min())
    logger.info(f"Envelope check passed on {pairs} pairs (smallest ratio {worst:.4g})")
    return worst
