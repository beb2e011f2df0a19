import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hawkesrank.core import EventStream, HawkesModel, simulate
from hawkesrank.leadlag import (
    BinnedSeries,
    bin_events,
    lagged_correlation,
    leadlag_adjacency,
    sensitivity_sweep,
)


def test_binning_example():
    ev = EventStream([[0.1, 0.6, 0.9]], 1.0)
    np.testing.assert_array_equal(bin_events(ev, 0.5).counts, [[1, 2]])


def test_event_at_horizon_goes_to_last_bin():
    ev = EventStream([[1.0]], 1.0)
    np.testing.assert_array_equal(bin_events(ev, 0.5).counts, [[0, 1]])


def test_partial_last_bin_kept():
    ev = EventStream([[0.1, 0.95]], 1.0)
    assert len(bin_events(ev, 0.4)) == 3


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), b=st.floats(0.05, 3.0))
def test_binning_conserves_events(seed, b):
    rng = np.random.default_rng(seed)
    T = 10.0
    times = [np.sort(rng.uniform(0, T, rng.integers(0, 30))) for _ in range(3)]
    times = [np.unique(t) for t in times]
    ev = EventStream(times, T)
    counts = bin_events(ev, b).counts
    np.testing.assert_array_equal(counts.sum(axis=1), ev.counts())


def test_bin_width_validation():
    with pytest.raises(ValueError):
        bin_events(EventStream([[0.5]], 1.0), 0.0)


def test_shifted_copy_has_unit_correlation():
    rng = np.random.default_rng(0)
    x = rng.poisson(3.0, 500).astype(float)
    y = np.roll(x, 2)
    series = BinnedSeries(1.0, np.vstack([x, y]))
    A = leadlag_adjacency(series, 2)
    assert A.raw[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_white_noise_is_near_zero():
    rng = np.random.default_rng(1)
    series = BinnedSeries(1.0, rng.poisson(2.0, (3, 10_000)))
    C = lagged_correlation(series.counts, 1)
    assert np.max(np.abs(C)) < 0.1


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), ell=st.integers(0, 3))
def test_normalization_and_nonnegativity(seed, ell):
    rng = np.random.default_rng(seed)
    series = BinnedSeries(1.0, rng.poisson(2.0, (4, 200)))
    A = leadlag_adjacency(series, ell)
    assert np.all(A.entries >= 0)
    assert np.linalg.norm(A.entries) == pytest.approx(1.0)


def test_affine_invariance():
    rng = np.random.default_rng(2)
    x = rng.poisson(2.0, (3, 300)).astype(float)
    a = lagged_correlation(x, 1)
    b = lagged_correlation(3.0 * x + 7.0, 1)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_constant_series_flagged():
    counts = np.vstack([np.ones(50), np.arange(50) % 3])
    with pytest.warns(UserWarning, match="constant"):
        A = leadlag_adjacency(BinnedSeries(1.0, counts), 1)
    assert A.constant_types == (0,)
    assert np.all(A.raw[0] == 0) and np.all(A.raw[:, 0] == 0)


def test_all_zero_matrix_left_unnormalized():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        A = leadlag_adjacency(BinnedSeries(1.0, np.zeros((2, 20))), 1)
    assert np.all(A.entries == 0) and A.norm == 0


def test_series_too_short():
    with pytest.raises(ValueError):
        leadlag_adjacency(BinnedSeries(1.0, np.ones((2, 3))), 1)


@pytest.fixture(scope="module")
def hawkes_events():
    model = HawkesModel.from_arrays([0.5, 0.5, 0.5], [[0.2, 0.4, 0.0], [0.0, 0.2, 0.4],
                                                      [0.1, 0.0, 0.2]], 0.5)
    return simulate(model, 2000.0, seed=0)


def test_sweep_single_pair(hawkes_events):
    res = sensitivity_sweep(hawkes_events, [0.5], [1])
    assert res.distances.shape == (1, 1) and res.distances[0, 0] == 0


def test_sweep_duplicates_agree(hawkes_events):
    res = sensitivity_sweep(hawkes_events, [0.5, 0.5], [2])
    assert res.distances[0, 1] == 0


def test_sweep_grid_varies(hawkes_events):
    res = sensitivity_sweep(hawkes_events, [0.25, 0.5, 1.0], [1, 2, 4])
    assert len(res.params) == 9
    np.testing.assert_allclose(res.distances, res.distances.T)
    assert res.distances.max() > 0
    d = res.to_dict()
    assert d["max_distance"] == pytest.approx(res.distances.max())
