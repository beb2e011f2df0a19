import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import spearmanr

from hawkesrank.core import ExoSchedule
from hawkesrank.experiments import (
    BenchmarkConfig,
    BenchmarkError,
    ShockSpec,
    apply_shock,
    build_model,
    run_benchmark,
    smooth,
    spearman,
    spearman_rows,
)
from hawkesrank.netgen import powerlaw_exo


# --- Spearman ---------------------------------------------------------------

def test_spearman_examples():
    assert spearman([1, 2, 3], [10, 20, 30]).rho == pytest.approx(1.0)
    assert spearman([1, 2, 3], [3, 2, 1]).rho == pytest.approx(-1.0)
    assert spearman([1, 2, 3, 4, 5], [2, 1, 4, 3, 5]).rho == pytest.approx(0.8)
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]).rho == pytest.approx(0.8)


def test_spearman_degenerate():
    r = spearman([1, 1, 1], [1, 2, 3])
    assert r.degenerate and r.rho == 0.0
    with pytest.raises(ValueError):
        spearman([1], [1])
    with pytest.raises(ValueError):
        spearman([1, np.nan], [1, 2])


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(3, 30))
def test_spearman_matches_scipy_with_ties(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 5, n).astype(float)
    b = rng.integers(0, 5, n).astype(float)
    ours = spearman(a, b)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ref = spearmanr(a, b).statistic
    if np.isnan(ref):
        assert ours.degenerate
    else:
        assert ours.rho == pytest.approx(ref, abs=1e-12)
        assert spearman(b, a).rho == pytest.approx(ours.rho, abs=1e-12)
        # monotone transforms leave the ranks alone
        assert spearman(np.exp(a), b ** 3).rho == pytest.approx(ours.rho, abs=1e-12)


def test_spearman_rows():
    rows = np.array([[1.0, 2.0, 3.0], [3.0, 2.0, 1.0], [1.0, 1.0, 1.0]])
    out = spearman_rows(rows, [1, 2, 3])
    np.testing.assert_allclose(out[:2], [1.0, -1.0])
    assert np.isnan(out[2])


# --- shock ------------------------------------------------------------------

def test_apply_shock():
    exo = ExoSchedule.constant(powerlaw_exo(10))
    shocked = apply_shock(exo, ShockSpec(), T=200.0)
    np.testing.assert_allclose(shocked.breakpoints, [0, 150, 200])
    r = shocked.rate_at(np.array([100.0, 150.0, 199.9, 200.0]))
    assert r[1, 9] == pytest.approx(10 / np.sqrt(10))
    assert r[2, 9] == pytest.approx(3.1623, abs=1e-4)
    assert r[0, 9] == r[3, 9] == pytest.approx(10 ** -0.5)
    np.testing.assert_array_equal(r[1, :9], powerlaw_exo(10)[:9])
    gain = shocked.integral(200.0) - exo.integral(200.0)
    assert gain[9] == pytest.approx(9 * 50 * 10 ** -0.5)


def test_unit_shock_changes_nothing():
    exo = ExoSchedule.constant([1.0, 2.0])
    shocked = apply_shock(exo, ShockSpec(time=1.0, duration=2.0, factor=1.0, target=0), T=5.0)
    t = np.linspace(0, 5, 41)
    np.testing.assert_array_equal(shocked.rate_at(t), exo.rate_at(t))


def test_shock_validation():
    exo = ExoSchedule.constant([1.0, 2.0])
    with pytest.raises(BenchmarkError):
        apply_shock(exo, ShockSpec(time=150, duration=60), T=200.0)
    with pytest.raises(BenchmarkError):
        apply_shock(exo, ShockSpec(target=2), T=200.0)


# --- smoothing --------------------------------------------------------------

def test_smooth_cases():
    x = np.random.default_rng(0).normal(size=20)
    np.testing.assert_array_equal(smooth(x, 1), x)
    np.testing.assert_allclose(smooth(np.full(30, 4.2), 7), 4.2)
    ramp = np.arange(40.0)
    np.testing.assert_allclose(smooth(ramp, 9), ramp)
    np.testing.assert_allclose(smooth(ramp, 8), smooth(ramp, 9))
    with pytest.raises(ValueError):
        smooth(x, 0)


# --- benchmark --------------------------------------------------------------

def test_config_validation():
    with pytest.raises(BenchmarkError):
        BenchmarkConfig(M=1, eta=1)
    with pytest.raises(BenchmarkError):
        BenchmarkConfig(time_unit="days")
    with pytest.raises(BenchmarkError):
        BenchmarkConfig(seeds=())
    assert BenchmarkConfig().burn_in == pytest.approx(25.0)


def test_effective_time_unit_scales_shock():
    cfg = BenchmarkConfig(time_unit="effective", T=100, shock=ShockSpec(time=50, duration=20))
    model = build_model(cfg, 0)
    np.testing.assert_allclose(model.exo.breakpoints, [0, 125, 175])


def test_benchmark_reproducible():
    cfg = BenchmarkConfig(seeds=(0, 1), T=60, shock=ShockSpec(time=30, duration=10))
    a = run_benchmark(cfg)
    b = run_benchmark(cfg)
    for m in a.raw:
        np.testing.assert_array_equal(a.raw[m], b.raw[m])
    s = a.summary()
    assert set(s) >= {"post_burn_in_means", "pre_shock_means", "shock_means", "ordering"}
    assert s["n_seeds"] == 2


def test_benchmark_parallel_matches_serial():
    cfg = BenchmarkConfig(seeds=(3, 4), T=40, shock=ShockSpec(enabled=False))
    a = run_benchmark(cfg)
    b = run_benchmark(cfg, n_jobs=2)
    for m in a.raw:
        np.testing.assert_array_equal(a.raw[m], b.raw[m])


@pytest.mark.slow
@pytest.mark.parametrize("eta", [1, 5, 8])
@pytest.mark.parametrize("n", [0.3, 0.6, 0.9])
def test_first_moment_best_across_grid(eta, n):
    cfg = BenchmarkConfig(eta=eta, target_n=n, shock=ShockSpec(enabled=False))
    post = run_benchmark(cfg).summary()["post_burn_in_means"]
    assert post["first_moment"] >= max(post["katz"], post["eigenvector"], post["pagerank"])
