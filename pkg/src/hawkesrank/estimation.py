"""
Maximum-likelihood estimation of exponential-kernel Hawkes models.

The log-likelihood of a stream on ``[0, T]`` is

    LL = sum_k log lambda_{c_k}(t_k-) - sum_i int_0^T lambda_i(s) ds

with the compensator available in closed form for piecewise-constant
exogenous rates. Optimization runs in log-parameter space, so every
parameter stays positive without explicit constraints.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numba
import numpy as np
from scipy.optimize import minimize

from hawkesrank.core import (
    BranchingMatrix,
    EventStream,
    ExoSchedule,
    HawkesError,
    HawkesModel,
    Kernel,
)

log = logging.getLogger(__name__)

# log-parameter box that keeps exp() finite
_LOG_LO, _LOG_HI = -40.0, 12.0


class InsufficientDataError(HawkesError):
    pass


@numba.njit(cache=True)
def _loglik_kernel(times, types, T, seg_starts, mu, N, tau, want_grad):
    """Log-likelihood and its gradient w.r.t. (mu, N, tau).

    ``times`` sorted, ``types`` aligned, ``mu`` shape (S, M). Events sharing
    a timestamp do not excite each other.
    """
    n_ev = times.shape[0]
    S, M = mu.shape
    g_mu = np.zeros((S, M))
    g_N = np.zeros((M, M))
    g_tau = 0.0
    E = np.zeros(M)  # sum exp(-u/tau) over past events, per source type
    F = np.zeros(M)  # sum u exp(-u/tau)
    ll = 0.0
    t_state = 0.0
    seg = 0
    k = 0
    inv_tau = 1.0 / tau
    while k < n_ev:
        t = times[k]
        dt = t - t_state
        if dt > 0.0:
            d = math.exp(-dt * inv_tau)
            for j in range(M):
                F[j] = d * (F[j] + dt * E[j])
                E[j] = d * E[j]
            t_state = t
        while seg + 1 < S and seg_starts[seg + 1] <= t:
            seg += 1
        g = k
        while g < n_ev and times[g] == t:
            g += 1
        for idx in range(k, g):
            i = types[idx]
            lam = mu[seg, i]
            for j in range(M):
                lam += N[j, i] * E[j] * inv_tau
            if not lam > 0.0:
                return -np.inf, g_mu, g_N, g_tau
            ll += math.log(lam)
            if want_grad:
                w = 1.0 / lam
                g_mu[seg, i] += w
                for j in range(M):
                    g_N[j, i] += w * E[j] * inv_tau
                    g_tau += w * N[j, i] * (F[j] * inv_tau - E[j]) * inv_tau * inv_tau
        for idx in range(k, g):
            E[types[idx]] += 1.0
        k = g

    # compensator
    for s in range(S):
        start = seg_starts[s]
        end = seg_starts[s + 1] if s + 1 < S else T
        length = min(end, T) - start
        if length < 0.0:
            length = 0.0
        for i in range(M):
            ll -= mu[s, i] * length
            g_mu[s, i] -= length
    for idx in range(n_ev):
        j = types[idx]
        u = T - times[idx]
        e = math.exp(-u * inv_tau)
        w = 1.0 - e
        for i in range(M):
            ll -= N[j, i] * w
            if want_grad:
                g_N[j, i] -= w
                g_tau += N[j, i] * u * e * inv_tau * inv_tau
    return ll, g_mu, g_N, g_tau


def _check_stream(model, events):
    if events.dim != model.dim:
        raise HawkesError(
            f"event stream has {events.dim} types but the model has dimension {model.dim}"
        )


def log_likelihood(model: HawkesModel, events: EventStream) -> float:
    """Exact log-likelihood; ``-inf`` if some event has zero intensity."""
    _check_stream(model, events)
    times, types = events.merged()
    ll, *_ = _loglik_kernel(times, types, events.T, model.exo.breakpoints,
                            model.exo.rates, model.N, model.tau, False)
    return float(ll)


def log_likelihood_grad(model: HawkesModel, events: EventStream):
    """Log-likelihood with gradients ``(d/dmu, d/dN, d/dtau)`` in natural parameters."""
    _check_stream(model, events)
    times, types = events.merged()
    ll, g_mu, g_N, g_tau = _loglik_kernel(times, types, events.T, model.exo.breakpoints,
                                          model.exo.rates, model.N, model.tau, True)
    return float(ll), g_mu, g_N, float(g_tau)


@dataclass
class FitConfig:
    max_iterations: int = 500
    gradient_tolerance: float = 1e-6
    tau_shared: bool = True
    mu_mode: str = "constant"
    segment_boundaries: Sequence[float] = ()
    initial_guess: Optional[HawkesModel] = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.gradient_tolerance > 0:
            raise ValueError("gradient_tolerance must be positive")
        if not self.tau_shared:
            raise ValueError("only a shared memory scale tau is supported")
        if self.mu_mode not in ("constant", "piecewise"):
            raise ValueError(f"mu_mode must be 'constant' or 'piecewise', got {self.mu_mode!r}")

    def breakpoints(self, T):
        if self.mu_mode == "constant":
            return np.array([0.0])
        b = np.asarray(sorted(self.segment_boundaries), dtype=float)
        if b.size and (b[0] <= 0 or b[-1] >= T):
            raise ValueError(f"segment boundaries must lie strictly inside (0, {T})")
        return np.concatenate([[0.0], b])


@dataclass
class FitResult:
    model: HawkesModel
    log_likelihood: float
    converged: bool
    iterations: int
    stationarity_warning: bool
    initial_log_likelihood: float = field(default=float("nan"))
    message: str = ""


def initial_model(events: EventStream, breakpoints) -> HawkesModel:
    """Sub-critical starting point: half the empirical rates, flat N, median gap for tau."""
    M = events.dim
    T = events.T
    times, _ = events.merged()
    counts = events.counts()
    mu0 = 0.5 * np.maximum(counts, 0.5) / T
    gaps = np.diff(times)
    gaps = gaps[gaps > 0]
    tau0 = float(np.median(gaps)) if gaps.size else T / 10
    rates = np.tile(mu0, (len(breakpoints), 1))
    N0 = np.full((M, M), 0.2 / M)
    return HawkesModel.from_arrays(rates, N0, tau0, breakpoints=breakpoints)


def _pack(model):
    with np.errstate(divide="ignore"):
        return np.log(np.concatenate([model.exo.rates.ravel(), model.N.ravel(), [model.tau]]))


def _unpack(theta, breakpoints, M):
    S = len(breakpoints)
    p = np.exp(theta)
    rates = p[: S * M].reshape(S, M)
    N = p[S * M: S * M + M * M].reshape(M, M)
    return rates, N, p[-1]


def fit_mle(events: EventStream, config: Optional[FitConfig] = None) -> FitResult:
    """Maximize the log-likelihood over ``(mu, N, tau)`` with L-BFGS-B."""
    config = config or FitConfig()
    if len(events) < 2:
        raise InsufficientDataError(f"too few events to fit ({len(events)})")
    M = events.dim
    T = events.T
    times, types = events.merged()

    if config.initial_guess is not None:
        start = config.initial_guess
        if start.dim != M:
            raise HawkesError("initial guess dimension does not match the data")
        bps = start.exo.breakpoints
    else:
        bps = config.breakpoints(T)
        start = initial_model(events, bps)

    def objective(theta):
        rates, N, tau = _unpack(theta, bps, M)
        ll, g_mu, g_N, g_tau = _loglik_kernel(times, types, T, bps, rates, N, tau, True)
        if not np.isfinite(ll):
            return np.inf, np.zeros_like(theta)
        grad = np.concatenate([g_mu.ravel(), g_N.ravel(), [g_tau]]) * np.exp(theta)
        return -ll, -grad

    # a zero starting parameter has no log; nudge it inside the box
    theta0 = np.clip(_pack(start), _LOG_LO, _LOG_HI)
    f0, _ = objective(theta0)
    if not np.isfinite(f0):
        raise InsufficientDataError("log-likelihood is not finite at the initial point")

    res = minimize(objective, theta0, jac=True, method="L-BFGS-B",
                   bounds=[(_LOG_LO, _LOG_HI)] * theta0.size,
                   options={"maxiter": config.max_iterations,
                            "gtol": config.gradient_tolerance,
                            "ftol": 1e-13})
    theta = res.x
    f_best = res.fun
    if not np.isfinite(f_best) or f_best > f0:
        theta, f_best = theta0, f0
    rates, N, tau = _unpack(theta, bps, M)
    model = HawkesModel(ExoSchedule(bps, rates), BranchingMatrix(N), Kernel(tau))
    warn = model.branching_ratio >= 1.0
    if warn:
        log.warning("fitted branching ratio %.4f >= 1; exogenous rates may be misspecified",
                    model.branching_ratio)
    return FitResult(
        model=model,
        log_likelihood=-float(f_best),
        converged=bool(res.success),
        iterations=int(res.nit),
        stationarity_warning=bool(warn),
        initial_log_likelihood=-float(f0),
        message=str(res.message),
    )

