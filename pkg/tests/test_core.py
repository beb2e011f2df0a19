import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hawkesrank.core import (
    BranchingMatrix,
    EventStream,
    ExoSchedule,
    ExplosiveProcessError,
    HawkesError,
    HawkesModel,
    Kernel,
    default_grid,
    effective_memory,
    endo_exo_ratio,
    evaluate_intensity,
    impulse_response,
    intensity_at_events,
    simulate,
    stationary_mean,
)

from conftest import random_stable


def brute_intensity(model, events, t):
    """Double sum over all past events, no recursion."""
    lam = model.exo.rate_at(np.array([t]))[0].copy()
    for j, tj in enumerate(events.times):
        for s in tj:
            if s < t:
                lam += model.N[j] * math.exp(-(t - s) / model.tau) / model.tau
    return lam


# --- validation -------------------------------------------------------------

def test_schedule_validation():
    with pytest.raises(HawkesError):
        ExoSchedule(np.array([1.0]), np.array([[1.0]]))
    with pytest.raises(HawkesError):
        ExoSchedule(np.array([0.0, 0.0]), np.ones((2, 1)))
    with pytest.raises(HawkesError):
        ExoSchedule.constant([-1.0])


def test_kernel_and_model_validation():
    with pytest.raises(HawkesError):
        Kernel(0.0)
    with pytest.raises(HawkesError):
        HawkesModel.from_arrays([1.0, 1.0], [[0.1]], 1.0)
    with pytest.raises(HawkesError):
        BranchingMatrix(np.array([[-0.1]]))


def test_event_stream_validation():
    with pytest.raises(HawkesError):
        EventStream([[1.0, 1.0]], 2.0)
    with pytest.raises(HawkesError):
        EventStream([[3.0]], 2.0)
    ev = EventStream.from_marked([0.5, 0.2, 0.9], [1, 0, 1], 1.0)
    assert ev.dim == 2
    assert ev.counts().tolist() == [1, 2]
    times, types = ev.merged()
    assert times.tolist() == [0.2, 0.5, 0.9]
    assert types.tolist() == [0, 1, 1]


def test_kernel_integrates_to_one():
    k = Kernel(2.0)
    assert k.integral(np.inf) == pytest.approx(1.0)
    assert k(1e-300) == pytest.approx(0.5)
    assert k(0.0) == 0.0


# --- intensity --------------------------------------------------------------

def test_single_event_intensity():
    model = HawkesModel.from_arrays([0.0], [[0.5]], 1.0)
    ev = EventStream([[0.0]], 2.0)
    tr = evaluate_intensity(model, ev, np.array([0.0, 1.0]))
    assert tr.values[1, 0] == pytest.approx(0.5 * math.exp(-1.0), abs=1e-12)
    # an event exactly at the grid time does not count yet
    assert tr.values[0, 0] == 0.0


def test_no_events_gives_exogenous_rate():
    model = HawkesModel.from_arrays([0.3, 0.7], np.full((2, 2), 0.2), 1.0)
    ev = EventStream([[], []], 10.0)
    tr = evaluate_intensity(model, ev)
    np.testing.assert_array_equal(tr.values, np.tile([0.3, 0.7], (tr.grid.size, 1)))
    assert np.all(tr.endo_part == 0)


def test_recursive_matches_double_sum(two_type_model):
    ev = simulate(two_type_model, 60.0, seed=3)
    grid = np.linspace(0, 60, 97)
    tr = evaluate_intensity(two_type_model, ev, grid)
    for k in range(0, grid.size, 8):
        np.testing.assert_allclose(tr.values[k], brute_intensity(two_type_model, ev, grid[k]),
                                   rtol=0, atol=1e-10)


def test_intensity_at_events_is_left_limit(two_type_model):
    ev = simulate(two_type_model, 30.0, seed=5)
    at = intensity_at_events(two_type_model, ev)
    for i, ti in enumerate(ev.times):
        for k in range(min(5, ti.size)):
            assert at[i][k] == pytest.approx(brute_intensity(two_type_model, ev, ti[k])[i],
                                             abs=1e-10)


def test_grid_validation(two_type_model):
    ev = EventStream([[], []], 5.0)
    with pytest.raises(HawkesError):
        evaluate_intensity(two_type_model, ev, np.array([0.0, 6.0]))
    with pytest.raises(HawkesError):
        evaluate_intensity(two_type_model, ev, np.array([1.0, 0.5]))
    with pytest.raises(HawkesError):
        evaluate_intensity(two_type_model, EventStream([[]], 5.0))


def test_default_grid():
    g = default_grid(1.0)
    assert g.size == 11
    assert g[-1] == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), M=st.integers(1, 4))
def test_decomposition_and_nonnegativity(seed, M):
    rng = np.random.default_rng(seed)
    model = HawkesModel.from_arrays(rng.uniform(0.05, 0.5, M), random_stable(rng, M), 0.5 + rng.uniform())
    ev = simulate(model, 20.0, seed)
    tr = evaluate_intensity(model, ev)
    assert np.all(tr.values >= 0)
    np.testing.assert_array_equal(tr.exo_part + tr.endo_part, tr.values)


def test_intensity_decays_between_events():
    model = HawkesModel.from_arrays([0.1], [[0.5]], 1.0)
    ev = EventStream([[1.0, 2.0]], 10.0)
    grid = np.linspace(2.01, 10.0, 50)
    endo = evaluate_intensity(model, ev, grid).endo_part[:, 0]
    assert np.all(np.diff(endo) < 0)


# --- simulation -------------------------------------------------------------

def test_simulation_is_deterministic(two_type_model):
    a = simulate(two_type_model, 50.0, seed=11)
    b = simulate(two_type_model, 50.0, seed=11)
    c = simulate(two_type_model, 50.0, seed=12)
    assert a == b
    assert a != c


def test_poisson_limit():
    model = HawkesModel.from_arrays([0.2], [[0.0]], 1.0)
    ev = simulate(model, 1e4, seed=0)
    # 3 standard deviations of a Poisson(2000) count
    assert abs(len(ev) - 2000) <= 3 * math.sqrt(2000)


def test_stationary_rate_univariate():
    model = HawkesModel.from_arrays([0.1], [[0.6]], 1.0)
    ev = simulate(model, 1e5, seed=1)
    assert len(ev) / 1e5 == pytest.approx(0.25, rel=0.05)


def test_stationary_rate_multivariate(two_type_model):
    T = 4e4
    ev = simulate(two_type_model, T, seed=2)
    np.testing.assert_allclose(ev.counts() / T, stationary_mean(two_type_model), rtol=0.05)


def test_thinning_bound_holds():
    rng = np.random.default_rng(4)
    for seed in range(5):
        model = HawkesModel.from_arrays(rng.uniform(0.1, 1, 3), random_stable(rng, 3, 0.8), 0.3)
        simulate(model, 50.0, seed, check_bound=True)


def test_piecewise_schedule_is_respected():
    exo = ExoSchedule(np.array([0.0, 100.0]), np.array([[0.0], [2.0]]))
    model = HawkesModel(exo, BranchingMatrix(np.array([[0.0]])), Kernel(1.0))
    ev = simulate(model, 200.0, seed=0)
    assert ev.times[0].min() >= 100.0
    assert abs(len(ev) - 200) <= 3 * math.sqrt(200)


def test_explosive_model_refused():
    model = HawkesModel.from_arrays([0.1], [[1.2]], 1.0)
    with pytest.raises(ExplosiveProcessError) as info:
        simulate(model, 10.0, seed=0)
    assert info.value.radius == pytest.approx(1.2)


def test_zero_rates_give_empty_stream():
    model = HawkesModel.from_arrays([0.0, 0.0], np.full((2, 2), 0.1), 1.0)
    assert len(simulate(model, 100.0, seed=0)) == 0


# --- endo / exo ratio -------------------------------------------------------

def test_endo_ratio_cases():
    model = HawkesModel.from_arrays([0.0, 0.5], [[0.5, 0.0], [0.0, 0.0]], 1.0)
    ev = EventStream([[1.0], []], 5.0)
    tr = evaluate_intensity(model, ev, np.array([0.5, 2.0]))
    r = endo_exo_ratio(tr)
    assert r.silent[0, 0]
    assert r.ratio[0, 0] == 0.0
    assert r.ratio[1, 0] == pytest.approx(1.0)
    assert np.all(r.ratio[:, 1] == 0.0)
    assert r.any_silent


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_endo_ratio_in_unit_interval(seed):
    rng = np.random.default_rng(seed)
    model = HawkesModel.from_arrays(rng.uniform(0.1, 1, 3), random_stable(rng, 3), 1.0)
    r = endo_exo_ratio(evaluate_intensity(model, simulate(model, 30.0, seed)))
    assert np.all((r.ratio >= 0) & (r.ratio <= 1))


# --- stationary mean and memory ---------------------------------------------

def test_stationary_mean_matches_neumann_series():
    rng = np.random.default_rng(0)
    for _ in range(20):
        N = random_stable(rng, 4)
        mu = rng.uniform(0.1, 1.0, 4)
        series = np.zeros(4)
        term = mu.copy()
        for _ in range(2000):
            series += term
            term = N.T @ term
        model = HawkesModel.from_arrays(mu, N, 1.0)
        np.testing.assert_allclose(stationary_mean(model), series, rtol=1e-10)


def test_stationary_mean_univariate():
    model = HawkesModel.from_arrays([0.1], [[0.6]], 1.0)
    assert stationary_mean(model)[0] == pytest.approx(0.25)


def test_stationary_mean_refuses_piecewise():
    exo = ExoSchedule(np.array([0.0, 1.0]), np.array([[0.1], [0.2]]))
    model = HawkesModel(exo, BranchingMatrix(np.array([[0.5]])), Kernel(1.0))
    with pytest.raises(HawkesError):
        stationary_mean(model)


@pytest.mark.parametrize("n, expected", [(0.5, 4.0), (0.9, 20.0)])
def test_effective_memory(n, expected):
    model = HawkesModel.from_arrays([0.1], [[n]], 2.0)
    assert effective_memory(model) == pytest.approx(expected)


# --- impulse response -------------------------------------------------------

def test_impulse_response_value():
    model = HawkesModel.from_arrays([0.1], [[0.5]], 2.0)
    y = impulse_response(model, np.array([0.0, 4.0]))
    assert y[0, 0] == 0.0
    assert y[1, 0] == pytest.approx(0.25 * math.exp(-1.0), rel=1e-12)


@pytest.mark.parametrize("n", [0.5, 0.9])
def test_impulse_response_log_linear(n):
    tau = 2.0
    model = HawkesModel.from_arrays([0.1], [[n]], tau)
    t = np.linspace(0.5, 50.0, 200)
    y = impulse_response(model, t)[:, 0]
    slope, intercept = np.polyfit(t, np.log(y), 1)
    resid = np.log(y) - (slope * t + intercept)
    assert -slope == pytest.approx((1 - n) / tau, rel=1e-10)
    assert np.max(np.abs(resid)) < 1e-8


def test_impulse_response_matches_discrete_convolution():
    """Renewal equation ``y = phi N_s + (phi * y) N`` solved on a fine grid."""
    rng = np.random.default_rng(7)
    N = random_stable(rng, 3, 0.7)
    tau = 1.5
    model = HawkesModel.from_arrays(np.ones(3), N, tau)
    h = 1e-3
    t = np.arange(0, 8.0 + h / 2, h)
    phi = np.exp(-t / tau) / tau
    y = np.zeros((t.size, 3))
    # trapezoidal Volterra solve
    y[0] = phi[0] * N[1]
    for k in range(1, t.size):
        conv = 0.5 * phi[k] * y[0] + (phi[k - 1:0:-1, None] * y[1:k]).sum(axis=0)
        y[k] = (phi[k] * N[1] + h * (conv @ N)) @ np.linalg.inv(np.eye(3) - 0.5 * h * phi[0] * N)
    exact = impulse_response(model, t[1:], source=1)
    np.testing.assert_allclose(y[1:][::500], exact[::500], rtol=1e-4, atol=1e-8)


def test_impulse_response_source_validation(two_type_model):
    with pytest.raises(HawkesError):
        impulse_response(two_type_model, np.array([1.0]), source=2)
