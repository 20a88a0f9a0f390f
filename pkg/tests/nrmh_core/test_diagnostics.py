import json

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import signal

from nrmh.nrmh_core.diagnostics import (
    ChainTrace,
    TraceMetadata,
    acceptance_ratio,
    batch_means_asvar,
    eacf,
    summarize,
    write_acceptance_csv,
    write_eacf_csv,
    write_metadata,
    write_summary_csv,
    write_trace_csv,
)
from nrmh.nrmh_core.errors import InvariantViolation, TraceTooShort


def make_trace(states, accepted=None, algorithm="nrmh"):
    states = np.asarray(states, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    if accepted is None:
        accepted = np.ones(states.shape[0], dtype=bool)
    meta = TraceMetadata(
        algorithm=algorithm,
        seed=1,
        prng="PCG64/marsaglia-polar",
        steps=states.shape[0],
        dimension=states.shape[1],
    )
    return ChainTrace(states=states, accepted=np.asarray(accepted, dtype=bool), meta=meta)


def test_eacf_alternating_trace():
    trace = make_trace([1.0, -1.0, 1.0, -1.0])
    result = eacf(trace, 1)
    np.testing.assert_array_equal(result.lags, [0, 1])
    np.testing.assert_allclose(result.values[:, 0], [1.0, -1.0])
    np.testing.assert_allclose(result.normalized[:, 0], [1.0, -1.0])


def test_eacf_constant_coordinate_normalizes_to_zero():
    trace = make_trace(np.column_stack([np.ones(10), np.arange(10.0)]))
    result = eacf(trace, 3)
    np.testing.assert_array_equal(result.normalized[:, 0], 0.0)
    assert result.normalized[0, 1] == 1.0


def test_eacf_lag_too_large():
    with pytest.raises(TraceTooShort):
        eacf(make_trace(np.zeros(5)), 5)


def test_batch_means_known_batches():
    """Test 16 states split into 4 batches with means 0, 1, 2, 3."""
    trace = make_trace(np.repeat([0.0, 1.0, 2.0, 3.0], 4))
    np.testing.assert_allclose(batch_means_asvar(trace), [4.0 * 5.0 / 3.0])


def test_batch_means_drops_remainder():
    states = np.concatenate([np.repeat([0.0, 1.0, 2.0, 3.0], 4), [100.0, 100.0, 100.0]])
    np.testing.assert_allclose(batch_means_asvar(make_trace(states)), [4.0 * 5.0 / 3.0])


def test_batch_means_too_short():
    with pytest.raises(TraceTooShort):
        batch_means_asvar(make_trace(np.zeros(15)))


def test_acceptance_ratio():
    trace = make_trace(np.zeros(4), accepted=[True, False, True, True])
    assert acceptance_ratio(trace) == 0.75
    with pytest.raises(TraceTooShort):
        acceptance_ratio(make_trace(np.zeros((0, 2))))


def test_chain_trace_length_mismatch():
    with pytest.raises(InvariantViolation):
        make_trace(np.zeros(4), accepted=[True, False])


def test_summarize():
    rows = summarize(make_trace(np.column_stack([np.repeat([0.0, 1.0, 2.0, 3.0], 4), np.ones(16)])))
    assert [row.coord for row in rows] == [1, 2]
    assert rows[0].mean == pytest.approx(1.5)
    assert rows[0].variance == pytest.approx(1.25)
    assert rows[1].batch_means_asvar == 0.0


def test_metadata_validation():
    with pytest.raises(ValidationError):
        TraceMetadata(algorithm="nrmh", seed=-1, prng="x", steps=1, dimension=1)
    meta = TraceMetadata(algorithm="nrmh", seed=1, prng="x", steps=1, dimension=1)
    with pytest.raises(ValidationError):
        meta.steps = 2


def test_writers(tmp_path):
    trace = make_trace(np.column_stack([np.repeat([0.0, 1.0, 2.0, 3.0], 4), np.arange(16.0)]))

    write_eacf_csv(tmp_path / "eacf.csv", eacf(trace, 2))
    lines = (tmp_path / "eacf.csv").read_text().splitlines()
    assert lines[0] == "lag,coord_1,coord_2,coordn_1,coordn_2"
    assert len(lines) == 4
    assert lines[1].startswith("0,")

    write_summary_csv(tmp_path / "summary.csv", summarize(trace))
    lines = (tmp_path / "summary.csv").read_text().splitlines()
    assert lines[0] == "coord,batch_means_asvar,mean,variance"
    assert lines[1].startswith("1,")

    write_trace_csv(tmp_path / "trace.csv", trace)
    lines = (tmp_path / "trace.csv").read_text().splitlines()
    assert lines[0] == "step,x_1,x_2,accepted"
    assert lines[1] == "1,0,0,1"
    assert len(lines) == 17

    write_acceptance_csv(tmp_path / "acceptance.csv", {"nrmh": 0.5, "mala": 0.25})
    assert (tmp_path / "acceptance.csv").read_text() == "algorithm,acceptance_ratio\nnrmh,0.5\nmala,0.25\n"

    write_metadata(tmp_path / "metadata.json", trace.meta)
    data = json.loads((tmp_path / "metadata.json").read_text())
    assert data["algorithm"] == "nrmh"
    assert data["prng"] == "PCG64/marsaglia-polar"
    assert data["h"] is None


def test_eacf_of_white_noise_within_sampling_bound():
    length = 100_000
    trace = make_trace(np.random.default_rng(41).standard_normal(length))
    normalized = eacf(trace, 20).normalized[1:, 0]
    exceedances = np.count_nonzero(np.abs(normalized) >= 3.0 / np.sqrt(length))
    assert exceedances <= 2


def test_batch_means_of_white_noise():
    trace = make_trace(np.random.default_rng(42).standard_normal(4_000_000))
    (asvar,) = batch_means_asvar(trace)
    assert 0.9 <= asvar <= 1.1


def test_batch_means_of_autoregressive_trace():
    """AR(1) with coefficient 0.5 and unit innovations has asymptotic variance 1 / (1 - 0.5)^2 = 4."""
    rho = 0.5
    innovations = np.random.default_rng(43).standard_normal(1_000_000)
    start = np.sqrt(1.0 / (1.0 - rho**2)) * innovations[0]
    states, _ = signal.lfilter([1.0], [1.0, -rho], innovations[1:], zi=[rho * start])
    (asvar,) = batch_means_asvar(make_trace(states))
    assert asvar == pytest.approx(4.0, rel=0.15)


def test_eacf_is_translation_invariant():
    states = np.random.default_rng(44).standard_normal((5_000, 3))
    shift = np.array([10.0, -3.5, 0.25])
    base = eacf(make_trace(states), 25)
    shifted = eacf(make_trace(states + shift), 25)
    np.testing.assert_allclose(shifted.values, base.values, rtol=0.0, atol=1e-10)


def test_batch_means_commute_with_coordinate_permutation():
    rng = np.random.default_rng(45)
    states = rng.standard_normal((10_000, 4)).cumsum(axis=0) * [1.0, 0.1, 3.0, 0.5]
    perm = rng.permutation(4)
    np.testing.assert_allclose(
        batch_means_asvar(make_trace(states[:, perm])),
        batch_means_asvar(make_trace(states))[perm],
        rtol=1e-12,
    )


def test_acceptance_ratio_ignores_states():
    flags = np.random.default_rng(46).random(1_000) < 0.3
    first = acceptance_ratio(make_trace(np.zeros(1_000), accepted=flags))
    second = acceptance_ratio(make_trace(np.arange(3_000.0).reshape(1_000, 3), accepted=flags))
    assert first == second == np.count_nonzero(flags) / 1_000
