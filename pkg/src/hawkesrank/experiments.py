"""
Static rankings versus the dynamic intensity ranking.

A network-driven Hawkes process is simulated, its realized intensities
``lambda_i(t)`` give the ground-truth ranking at each grid time, and four
static centralities are scored against it by Spearman correlation, with and
without an exogenous shock.
"""
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.stats import rankdata

from hawkesrank import centrality
from hawkesrank.core import (
    ExoSchedule,
    HawkesModel,
    Kernel,
    evaluate_intensity,
    simulate,
)
from hawkesrank.netgen import BaGraphConfig, generate_ba_branching, powerlaw_exo

METHODS = centrality.METHODS


class BenchmarkError(ValueError):
    pass


# --- rank correlation -------------------------------------------------------

@dataclass(frozen=True)
class SpearmanResult:
    rho: float
    degenerate: bool = False

    def __float__(self):
        return self.rho


def spearman(r1, r2) -> SpearmanResult:
    """Spearman correlation with average ranks for ties.

    All-equal input on either side has no defined correlation; the result is
    then 0 with ``degenerate=True``.
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    if r1.shape != r2.shape or r1.ndim != 1:
        raise ValueError("score vectors must be 1-d and of equal length")
    if r1.size < 2:
        raise ValueError("rank correlation needs at least 2 items")
    if not (np.all(np.isfinite(r1)) and np.all(np.isfinite(r2))):
        raise ValueError("scores must be finite")
    rho = spearman_rows(r1[None, :], r2)[0]
    if np.isnan(rho):
        return SpearmanResult(0.0, True)
    return SpearmanResult(float(rho), False)


def spearman_rows(scores, reference) -> np.ndarray:
    """Spearman correlation of every row of ``scores`` with ``reference``.

    Rows (or a reference) without variation give NaN.
    """
    ranks = rankdata(scores, axis=1)
    ref = rankdata(reference)
    ranks = ranks - ranks.mean(axis=1, keepdims=True)
    ref = ref - ref.mean()
    num = ranks @ ref
    den = np.sqrt((ranks ** 2).sum(axis=1) * (ref ** 2).sum())
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / den, np.nan)


# --- shocks and smoothing ---------------------------------------------------

@dataclass(frozen=True)
class ShockSpec:
    time: float = 150.0
    target: Optional[int] = None  # None: the last (smallest-rate) type
    factor: float = 10.0
    duration: float = 50.0
    enabled: bool = True


def apply_shock(schedule: ExoSchedule, shock: ShockSpec, T: Optional[float] = None) -> ExoSchedule:
    """Multiply the target type's rate by ``factor`` on ``[time, time + duration)``."""
    start, end = shock.time, shock.time + shock.duration
    if start < 0 or shock.duration <= 0 or (T is not None and end > T):
        raise BenchmarkError(f"shock interval [{start}, {end}) outside the window [0, {T}]")
    target = schedule.dim - 1 if shock.target is None else shock.target
    if not 0 <= target < schedule.dim:
        raise BenchmarkError(f"shock target {target} out of range")
    if shock.factor < 0:
        raise BenchmarkError("shock factor must be nonnegative")
    bps = list(schedule.breakpoints)
    rates = [r.copy() for r in schedule.rates]
    for b in (start, end):
        if b not in bps:
            k = int(np.searchsorted(bps, b, side="right")) - 1
            bps.insert(k + 1, b)
            rates.insert(k + 1, rates[k].copy())
    for k, b in enumerate(bps):
        if start <= b < end:
            rates[k][target] *= shock.factor
    return ExoSchedule(np.array(bps), np.array(rates))


def smooth(series, window: int) -> np.ndarray:
    """Centered moving average, truncated symmetrically at the boundaries.

    Point ``k`` averages ``x[k-h .. k+h]`` with ``h = min(window // 2, k,
    n-1-k)``, so interior points of an affine series are unchanged. An even
    window is widened by one point to stay centered.
    """
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        raise ValueError("cannot smooth an empty series")
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    n = x.size
    half = window // 2
    if half == 0:
        return x.copy()
    k = np.arange(n)
    h = np.minimum(half, np.minimum(k, n - 1 - k))
    csum = np.concatenate([[0.0], np.cumsum(x)])
    return (csum[k + h + 1] - csum[k - h]) / (2 * h + 1)


# --- benchmark --------------------------------------------------------------

@dataclass(frozen=True)
class BenchmarkConfig:
    M: int = 10
    eta: int = 5
    target_n: float = 0.6
    tau: float = 1.0
    T: float = 200.0
    grid_step: float = 0.1
    shock: ShockSpec = field(default_factory=ShockSpec)
    smoothing_window: float = 50.0
    seeds: tuple = tuple(range(20))
    katz_alpha: float = 1.0
    pagerank_damping: float = 0.85
    time_unit: str = "raw"

    def __post_init__(self):
        if self.M < 2:
            raise BenchmarkError("rank correlation needs M >= 2")
        if not 1 <= self.eta < self.M:
            raise BenchmarkError(f"eta must satisfy 1 <= eta < M, got {self.eta}")
        if not 0 < self.target_n < 1:
            raise BenchmarkError("target_n must lie in (0, 1)")
        if self.tau <= 0 or self.T <= 0 or self.grid_step <= 0:
            raise BenchmarkError("tau, T and grid_step must be positive")
        if self.smoothing_window <= 0:
            raise BenchmarkError("smoothing_window must be positive")
        if self.time_unit not in ("raw", "effective"):
            raise BenchmarkError("time_unit must be 'raw' or 'effective'")
        if not self.seeds:
            raise BenchmarkError("at least one seed is required")
        if self.shock.enabled:
            if self.shock.target is not None and not 0 <= self.shock.target < self.M:
                raise BenchmarkError(f"shock target {self.shock.target} out of range")
            if self.shock.time < 0 or self.shock.time + self.shock.duration > self.T:
                raise BenchmarkError("shock interval must lie within [0, T]")

    @property
    def time_scale(self) -> float:
        """Multiplier from configured time units to model time."""
        if self.time_unit == "effective":
            return self.tau / (1.0 - self.target_n)
        return 1.0

    @property
    def burn_in(self) -> float:
        """Ten effective memory times, in model time."""
        return 10.0 * self.tau / (1.0 - self.target_n)

    def to_dict(self):
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        return d


@dataclass
class SeedRun:
    seed: int
    model: HawkesModel
    grid: np.ndarray
    intensities: np.ndarray
    static_scores: dict
    raw: dict
    n_events: int


@dataclass
class BenchmarkResult:
    config: BenchmarkConfig
    grid: np.ndarray
    raw: dict  # method -> (n_seeds, n_grid)
    degenerate: np.ndarray  # (n_seeds, n_grid) ground truth without variation
    runs: list

    def mean_raw(self):
        return {m: np.nanmean(v, axis=0) for m, v in self.raw.items()}

    def smoothed(self):
        window = max(1, int(round(self.config.smoothing_window / self.config.grid_step)))
        return {m: smooth(np.nan_to_num(s), window) for m, s in self.mean_raw().items()}

    def window_means(self, start, end):
        """Seed-averaged mean correlation per method over ``start <= t < end``."""
        sel = (self.grid >= start) & (self.grid < end)
        return {m: float(np.nanmean(v[:, sel])) for m, v in self.raw.items()}

    def summary(self):
        cfg = self.config
        s = cfg.time_scale
        post = self.window_means(cfg.burn_in, cfg.T * s)
        out = {
            "n_seeds": len(cfg.seeds),
            "burn_in": cfg.burn_in,
            "post_burn_in_means": post,
            "ordering": sorted(post, key=post.get, reverse=True),
        }
        if cfg.shock.enabled:
            t0 = cfg.shock.time * s
            t1 = (cfg.shock.time + cfg.shock.duration) * s
            out["pre_shock_means"] = self.window_means(cfg.burn_in, t0)
            out["shock_means"] = self.window_means(t0, t1)
        return out


def static_scores(N, mu, alpha=1.0, d=0.85):
    """The four static benchmark vectors for branching matrix ``N`` and rates ``mu``."""
    M = N.shape[0]
    with warnings.catch_warnings():
        # BA graphs have no edges into late nodes, so N is reducible by design
        warnings.simplefilter("ignore", UserWarning)
        eig = centrality.eigenvector_centrality(N).scores
    return {
        "first_moment": centrality.first_moment_rank(N, mu).scores,
        "katz": centrality.katz(N, alpha, np.ones(M)).scores,
        "eigenvector": eig,
        "pagerank": centrality.pagerank(N, d).scores,
    }


def build_model(config: BenchmarkConfig, seed: int) -> HawkesModel:
    branching = generate_ba_branching(BaGraphConfig(config.M, config.eta, seed=seed),
                                      config.target_n, weight_seed=seed + 1_000_003)
    exo = ExoSchedule.constant(powerlaw_exo(config.M))
    if config.shock.enabled:
        s = config.time_scale
        shock = replace(config.shock, time=config.shock.time * s,
                        duration=config.shock.duration * s)
        exo = apply_shock(exo, shock, config.T * s)
    return HawkesModel(exo, branching, Kernel(config.tau))


def run_seed(config: BenchmarkConfig, seed: int) -> SeedRun:
    model = build_model(config, seed)
    s = config.time_scale
    T = config.T * s
    events = simulate(model, T, seed)
    n = int(np.floor(config.T / config.grid_step + 1e-9))
    grid = np.arange(n + 1) * config.grid_step * s
    trace = evaluate_intensity(model, events, grid)
    mu = model.exo.rates[0]  # the unshocked baseline is what static methods see
    scores = static_scores(model.N, mu, config.katz_alpha, config.pagerank_damping)
    raw = {m: spearman_rows(trace.values, v) for m, v in scores.items()}
    return SeedRun(seed, model, grid, trace.values, scores, raw, len(events))


def _run_seed_args(args):
    return run_seed(*args)


def run_benchmark(config: BenchmarkConfig, n_jobs: int = 1) -> BenchmarkResult:
    """Run every seed and stack the per-time Spearman series by method."""
    tasks = [(config, int(seed)) for seed in config.seeds]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            runs = list(pool.map(_run_seed_args, tasks))
    else:
        runs = [run_seed(*t) for t in tasks]
    grid = runs[0].grid
    raw = {m: np.stack([r.raw[m] for r in runs]) for m in METHODS}
    degenerate = np.isnan(raw["first_moment"])
    return BenchmarkResult(config, grid, raw, degenerate, runs)
