import numpy as np

from nrmh.nrmh_core.instances import (
    random_compatible_triple,
    random_equivalence_instance,
    random_reversible_instance,
    random_vorticity_pattern,
)
from nrmh.nrmh_core.markov import is_reversible, stationarity_residual


def test_vorticity_pattern_has_zero_row_sums():
    rng = np.random.Generator(np.random.PCG64(1))
    W = random_vorticity_pattern(5, rng)
    np.testing.assert_allclose(W, -W.T, atol=1e-15)
    np.testing.assert_allclose(W.sum(axis=1), 0.0, atol=1e-14)
    np.testing.assert_array_equal(random_vorticity_pattern(2, rng), 0.0)


def test_random_instances_are_admissible():
    rng = np.random.Generator(np.random.PCG64(2))
    for n in (3, 4, 6):
        triple = random_compatible_triple(n, rng)
        assert triple.strict
        assert np.any(triple.gamma.full != 0.0)

        inst = random_reversible_instance(n, rng)
        assert is_reversible(inst.K, inst.pi)
        assert not is_reversible(inst.P, inst.pi)
        assert np.all(inst.P > 0.0)
        assert stationarity_residual(inst.P, inst.pi) <= 1e-12

        eq = random_equivalence_instance(n, rng)
        Q = eq.H + eq.gamma.full / (2.0 * eq.pi[:, None])
        assert np.all(Q > 0.0)


def test_random_instances_are_seeded():
    first = random_reversible_instance(4, np.random.Generator(np.random.PCG64(9)))
    second = random_reversible_instance(4, np.random.Generator(np.random.PCG64(9)))
    np.testing.assert_array_equal(first.P, second.P)
