import numpy as np
import pytest

from nrmh.nrmh_core.analysis import (
    GeneratorMatrix,
    asymptotic_variance_exact,
    equivalence_check,
    ld_rate_function,
    stationary_distribution,
    uniformize,
)
from nrmh.nrmh_core.errors import (
    InvariantViolation,
    NotAperiodic,
    NotInvariant,
    Reducible,
)
from nrmh.nrmh_core.instances import (
    random_distribution,
    random_equivalence_instance,
    random_reversible_instance,
)
from nrmh.nrmh_core.markov import cyclic_vorticity, nrmh_kernel
from tests.utils.helpers import cyclic_triple

PI_3 = np.full(3, 1.0 / 3.0)


def reversible_rate_closed_form(K, pi, mu):
    """1 - sum_xy sqrt(mu(x) pi(x)) K(x, y) sqrt(mu(y) / pi(y)) for pi-reversible K."""
    left = np.sqrt(mu * pi)
    right = np.sqrt(mu / pi)
    return 1.0 - float(left @ K @ right)


def test_stationary_distribution():
    P = nrmh_kernel(cyclic_triple())
    np.testing.assert_allclose(stationary_distribution(P), PI_3, atol=1e-14)

    P = np.array([[0.9, 0.1], [0.3, 0.7]])
    np.testing.assert_allclose(stationary_distribution(P), [0.75, 0.25], atol=1e-14)


def test_stationary_distribution_reducible():
    with pytest.raises(Reducible):
        stationary_distribution(np.eye(2))


def test_asymptotic_variance_independent_draws():
    """Test a chain of independent draws has asymptotic variance equal to the variance."""
    pi = np.array([0.25, 0.75])
    P = np.tile(pi, (2, 1))
    assert asymptotic_variance_exact(P, pi, [0.0, 1.0]) == pytest.approx(0.1875, abs=1e-14)


def test_asymptotic_variance_two_state_chain():
    """Test the two-state formula var * (1 + lambda) / (1 - lambda)."""
    P = np.array([[0.75, 0.25], [0.25, 0.75]])
    assert asymptotic_variance_exact(P, [0.5, 0.5], [1.0, 0.0]) == pytest.approx(0.75, abs=1e-13)


def test_asymptotic_variance_accepts_unnormalized_pi():
    P = np.array([[0.75, 0.25], [0.25, 0.75]])
    assert asymptotic_variance_exact(P, [3.0, 3.0], [1.0, 0.0]) == pytest.approx(0.75, abs=1e-13)


def test_asymptotic_variance_constant_function():
    P = nrmh_kernel(cyclic_triple())
    assert asymptotic_variance_exact(P, PI_3, [2.0, 2.0, 2.0]) == pytest.approx(0.0, abs=1e-14)


def test_asymptotic_variance_errors():
    with pytest.raises(NotAperiodic):
        asymptotic_variance_exact([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5], [1.0, 0.0])
    with pytest.raises(NotInvariant):
        asymptotic_variance_exact([[0.9, 0.1], [0.3, 0.7]], [0.5, 0.5], [1.0, 0.0])
    with pytest.raises(InvariantViolation):
        asymptotic_variance_exact([[0.9, 0.1], [0.3, 0.7]], [0.75, 0.25], [1.0, 0.0, 2.0])


def test_added_vorticity_never_increases_asymptotic_variance():
    rng = np.random.Generator(np.random.PCG64(31))
    strict_decrease = False
    for _ in range(40):
        n = int(rng.integers(3, 7))
        inst = random_reversible_instance(n, rng)
        for _ in range(5):
            f = rng.normal(size=n)
            reversible = asymptotic_variance_exact(inst.K, inst.pi, f)
            non_reversible = asymptotic_variance_exact(inst.P, inst.pi, f)
            assert non_reversible <= reversible + 1e-10
            strict_decrease |= non_reversible < reversible - 1e-8
    assert strict_decrease


def test_uniformize():
    P = nrmh_kernel(cyclic_triple())
    G = uniformize(P)
    off_diagonal = ~np.eye(3, dtype=bool)
    np.testing.assert_allclose(G.G[off_diagonal], P[off_diagonal], atol=0.0)
    np.testing.assert_allclose(G.G.sum(axis=1), 0.0, atol=1e-15)
    np.testing.assert_allclose(uniformize(P, rate=2.0).G, 2.0 * G.G, atol=1e-15)

    with pytest.raises(ValueError):
        uniformize(P, rate=0.0)


def test_generator_matrix_validation():
    with pytest.raises(InvariantViolation):
        GeneratorMatrix(np.array([[-1.0, 1.0], [-0.5, 0.5]]))
    with pytest.raises(InvariantViolation):
        GeneratorMatrix(np.array([[-1.0, 0.5], [0.5, -0.5]]))


def test_rate_function_vanishes_at_stationarity():
    rng = np.random.Generator(np.random.PCG64(12))
    inst = random_reversible_instance(4, rng)
    result = ld_rate_function(uniformize(inst.P), inst.pi)
    assert result.value <= 1e-8
    assert result.converged


def test_rate_function_reversible_closed_form():
    """Test the optimizer reaches the value attained at u = sqrt(mu / pi) for reversible chains."""
    rng = np.random.Generator(np.random.PCG64(13))
    for _ in range(10):
        inst = random_reversible_instance(4, rng)
        mu = random_distribution(4, rng)
        result = ld_rate_function(uniformize(inst.K), mu)
        assert result.value == pytest.approx(reversible_rate_closed_form(inst.K, inst.pi, mu), abs=1e-8)
        assert result.value > 0.0


def test_rate_function_increases_with_vorticity():
    rng = np.random.Generator(np.random.PCG64(14))
    for _ in range(100):
        inst = random_reversible_instance(4, rng)
        mu = random_distribution(4, rng)
        G = uniformize(inst.P)
        reversible = ld_rate_function(uniformize(inst.K), mu).value
        non_reversible = ld_rate_function(G, mu).value
        assert non_reversible >= reversible - 1e-7
        assert ld_rate_function(G, inst.pi).value <= 1e-8


def test_rate_function_is_scale_invariant_in_maximizer():
    rng = np.random.Generator(np.random.PCG64(15))
    inst = random_reversible_instance(4, rng)
    mu = random_distribution(4, rng)
    result = ld_rate_function(uniformize(inst.P), mu)
    assert result.maximizer[0] == pytest.approx(1.0)
    G = uniformize(inst.P).G
    u = 3.0 * result.maximizer
    assert -float(mu @ (G @ u / u)) == pytest.approx(result.value, abs=1e-10)


def test_rate_function_restricts_to_support():
    rng = np.random.Generator(np.random.PCG64(16))
    inst = random_reversible_instance(4, rng)
    mu = np.array([0.5, 0.5, 0.0, 0.0])
    result = ld_rate_function(uniformize(inst.K), mu)
    assert result.value > 0.0
    np.testing.assert_array_equal(result.maximizer[2:], 0.0)

    point = np.array([0.0, 0.0, 1.0, 0.0])
    single = ld_rate_function(uniformize(inst.K), point)
    assert single.value == pytest.approx(1.0 - inst.K[2, 2])


def test_rate_function_rejects_bad_measure():
    G = uniformize(nrmh_kernel(cyclic_triple()))
    with pytest.raises(ValueError):
        ld_rate_function(G, [0.5, 0.6, -0.1])
    with pytest.raises(ValueError):
        ld_rate_function(G, [0.5, 0.5])


def test_equivalence_check_cyclic_example():
    _, _, diff = equivalence_check(np.full((3, 3), 1.0 / 3.0), cyclic_vorticity(3, 1.0 / 18.0), PI_3)
    assert diff <= 1e-14


def test_equivalence_check_random_instances():
    rng = np.random.Generator(np.random.PCG64(17))
    for _ in range(500):
        inst = random_equivalence_instance(int(rng.integers(2, 9)), rng)
        P1, P2, diff = equivalence_check(inst.H, inst.gamma, inst.pi)
        assert diff <= 1e-12
        np.testing.assert_allclose(P1.sum(axis=1), 1.0, atol=1e-14)
