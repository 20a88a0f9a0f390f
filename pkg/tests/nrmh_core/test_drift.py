import numpy as np
import pytest

from nrmh.nrmh_core.drift import (
    drift_spectral_bound,
    equalizing_basis,
    equalizing_drift,
    optimize_skew_drift,
)
from nrmh.nrmh_core.gaussian import GaussianTarget, SkewDrift, optimal_spectral_bound
from tests.utils.helpers import BUILTIN_3D_SKEW, BUILTIN_3D_VARIANCES, NINE_DIM_VARIANCES


def test_reversible_spectral_bound():
    """Test s(-V^-1) = -1 / lambda_max(V)."""
    assert drift_spectral_bound(GaussianTarget.diagonal(BUILTIN_3D_VARIANCES), SkewDrift.zero(3)) == pytest.approx(-1.0)
    nine = GaussianTarget.diagonal(NINE_DIM_VARIANCES)
    assert drift_spectral_bound(nine, SkewDrift.zero(9)) == pytest.approx(-1.0444, abs=1e-3)


def test_known_3d_drift_is_optimal():
    target = GaussianTarget.diagonal(BUILTIN_3D_VARIANCES)
    bound = drift_spectral_bound(target, SkewDrift.from_matrix(BUILTIN_3D_SKEW))
    assert bound == pytest.approx(-2.0, abs=1e-8)
    assert bound == pytest.approx(optimal_spectral_bound(target), abs=1e-8)


def test_equalizing_basis():
    rng = np.random.Generator(np.random.PCG64(21))
    X = rng.normal(size=(6, 6))
    D = X @ X.T + np.eye(6)
    Psi = equalizing_basis(D)
    np.testing.assert_allclose(Psi.T @ Psi, np.eye(6), atol=1e-12)
    np.testing.assert_allclose(np.diag(Psi.T @ D @ Psi), np.trace(D) / 6.0, atol=1e-10)


def test_equalizing_basis_constant_diagonal():
    D = np.array([[2.0, 1.0], [1.0, 2.0]])
    np.testing.assert_array_equal(equalizing_basis(D), np.eye(2))


@pytest.mark.parametrize(
    "variances",
    [BUILTIN_3D_VARIANCES, NINE_DIM_VARIANCES, (1.0, 3.0), (0.5, 0.5, 0.5, 2.0)],
)
def test_equalizing_drift_attains_the_optimum(variances):
    target = GaussianTarget.diagonal(variances)
    drift = equalizing_drift(target)
    np.testing.assert_allclose(drift.S, -drift.S.T, atol=0.0)
    assert drift_spectral_bound(target, drift) == pytest.approx(optimal_spectral_bound(target), abs=1e-8)


def test_equalizing_drift_dense_covariance():
    rng = np.random.Generator(np.random.PCG64(22))
    X = rng.normal(size=(5, 5))
    target = GaussianTarget.from_covariance(X @ X.T + 0.5 * np.eye(5))
    drift = equalizing_drift(target)
    assert drift_spectral_bound(target, drift) == pytest.approx(optimal_spectral_bound(target), abs=1e-7)


def test_optimize_skew_drift_9d():
    target = GaussianTarget.diagonal(NINE_DIM_VARIANCES)
    drift = optimize_skew_drift(target, budget=2, seed=0)
    bound = drift_spectral_bound(target, drift)
    assert optimal_spectral_bound(target) == pytest.approx(-3.2891, abs=1e-4)
    assert bound <= 0.95 * -3.2891
    assert bound >= optimal_spectral_bound(target) - 1e-8


def test_optimize_skew_drift_never_worse_than_reversible():
    """Test an isotropic target keeps S = 0, where no drift can improve on -1 / sigma^2."""
    target = GaussianTarget.diagonal([2.0, 2.0, 2.0])
    drift = optimize_skew_drift(target, budget=3, seed=1)
    np.testing.assert_array_equal(drift.upper, 0.0)


def test_optimize_skew_drift_one_dimension():
    drift = optimize_skew_drift(GaussianTarget.diagonal([3.0]), budget=4)
    assert drift.n == 1
    assert drift.upper.size == 0
