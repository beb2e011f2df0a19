"""
Multivariate Hawkes processes with a shared exponential memory kernel.

Conventions
-----------
Event types are indexed ``0 .. M-1``. The branching matrix is stored
source-row: ``N[j, i]`` is the expected number of type-``i`` events directly
triggered by one type-``j`` event, so the conditional intensity reads

.. math::
    \\lambda_i(t) = \\mu_i(t) + \\sum_j \\sum_{t^j_k < t} N_{j,i}\\,\\phi(t - t^j_k),
    \\qquad \\phi(u) = \\tau^{-1} e^{-u/\\tau}\\,\\mathbf{1}\\{u > 0\\}.

In vector form the endogenous term is ``N.T @ R(t)`` where ``R_j(t)`` is the
kernel-weighted count of past type-``j`` events.
"""
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from hawkesrank.linalg import solve_linear, spectral_radius


class HawkesError(ValueError):
    """Raised for invalid models, streams or evaluation requests."""


class ExplosiveProcessError(HawkesError):
    """The branching ratio is >= 1 so the requested operation is undefined."""

    def __init__(self, radius, what="this operation"):
        self.radius = float(radius)
        super().__init__(
            f"spectral radius n = {self.radius:.6g} >= 1; {what} requires a "
            "sub-critical process"
        )


def _as_float_array(x, ndim, name):
    arr = np.array(x, dtype=float)
    if arr.ndim != ndim:
        raise HawkesError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise HawkesError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ExoSchedule:
    """Piecewise-constant exogenous rates.

    ``rates[k]`` applies on ``[breakpoints[k], breakpoints[k+1])``; the last
    segment extends to infinity. The first breakpoint must be 0.
    """

    breakpoints: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        bp = _as_float_array(self.breakpoints, 1, "breakpoints")
        rates = _as_float_array(self.rates, 2, "rates")
        if bp.size == 0:
            raise HawkesError("an exogenous schedule needs at least one segment")
        if bp[0] != 0.0:
            raise HawkesError("the first breakpoint must be 0")
        if np.any(np.diff(bp) <= 0):
            raise HawkesError("breakpoints must be strictly increasing")
        if rates.shape[0] != bp.size:
            raise HawkesError(
                f"{bp.size} breakpoints but {rates.shape[0]} rate vectors"
            )
        if np.any(rates < 0):
            raise HawkesError("exogenous rates must be nonnegative")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "rates", rates)

    @classmethod
    def constant(cls, mu):
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        return cls(np.array([0.0]), mu[None, :])

    @property
    def dim(self) -> int:
        return self.rates.shape[1]

    @property
    def n_segments(self) -> int:
        return self.breakpoints.size

    @property
    def is_constant(self) -> bool:
        return self.n_segments == 1

    def segment_index(self, t):
        """Index of the segment containing each time in ``t``."""
        return np.searchsorted(self.breakpoints, t, side="right") - 1

    def rate_at(self, t):
        """Rate vectors at the times ``t``, shape ``(len(t), M)``."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise HawkesError("exogenous rates are only defined for t >= 0")
        return self.rates[self.segment_index(t)]

    def integral(self, T):
        """Per-type integral of the rates over ``[0, T]``."""
        ends = np.append(self.breakpoints[1:], np.inf)
        lengths = np.clip(np.minimum(ends, T) - self.breakpoints, 0.0, None)
        return lengths @ self.rates

    def segment_lengths(self, T):
        ends = np.append(self.breakpoints[1:], np.inf)
        return np.clip(np.minimum(ends, T) - self.breakpoints, 0.0, None)

    def with_rates(self, rates):
        return ExoSchedule(self.breakpoints, rates)

    def __eq__(self, other):
        if not isinstance(other, ExoSchedule):
            return NotImplemented
        return np.array_equal(self.breakpoints, other.breakpoints) and np.array_equal(
            self.rates, other.rates
        )


@dataclass(frozen=True, eq=False)
class BranchingMatrix:
    """Nonnegative source-row matrix of mean offspring counts."""

    entries: np.ndarray
    spectral_radius: float = field(init=False)

    def __post_init__(self):
        arr = _as_float_array(self.entries, 2, "branching matrix")
        if arr.shape[0] != arr.shape[1]:
            raise HawkesError(f"branching matrix must be square, got {arr.shape}")
        if np.any(arr < 0):
            raise HawkesError("branching matrix entries must be nonnegative")
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "spectral_radius", spectral_radius(arr))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_stationary(self) -> bool:
        return self.spectral_radius < 1.0

    def __eq__(self, other):
        if not isinstance(other, BranchingMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)


@dataclass(frozen=True)
class Kernel:
    """Normalized exponential kernel ``phi(t) = exp(-t/tau)/tau`` for ``t > 0``."""

    tau: float

    def __post_init__(self):
        tau = float(self.tau)
        if not (np.isfinite(tau) and tau > 0):
            raise HawkesError(f"memory scale tau must be positive and finite, got {self.tau}")
        object.__setattr__(self, "tau", tau)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = np.exp(-t[pos] / self.tau) / self.tau
        return out

    def integral(self, t):
        """``int_0^t phi(u) du``."""
        t = np.asarray(t, dtype=float)
        return np.where(t > 0, -np.expm1(-np.clip(t, 0, None) / self.tau), 0.0)


@dataclass(frozen=True)
class HawkesModel:
    """Exogenous schedule, branching matrix and kernel of an M-type process."""

    exo: ExoSchedule
    branching: BranchingMatrix
    kernel: Kernel

    def __post_init__(self):
        if self.exo.dim != self.branching.dim:
            raise HawkesError(
                f"exogenous rates have dimension {self.exo.dim} but the branching "
                f"matrix is {self.branching.dim}x{self.branching.dim}"
            )

    @classmethod
    def from_arrays(cls, mu, N, tau, breakpoints=None):
        """Build a model from plain arrays.

        ``mu`` is either an M-vector (constant rates) or an ``(S, M)`` array
        of segment rates starting at ``breakpoints``.
        """
        mu = np.asarray(mu, dtype=float)
        if mu.ndim <= 1:
            exo = ExoSchedule.constant(mu)
        else:
            if breakpoints is None and mu.shape[0] == 1:
                breakpoints = [0.0]
            exo = ExoSchedule(breakpoints, mu)
        return cls(exo, BranchingMatrix(np.atleast_2d(N)), Kernel(tau))

    @property
    def dim(self) -> int:
        return self.branching.dim

    @property
    def N(self) -> np.ndarray:
        return self.branching.entries

    @property
    def tau(self) -> float:
        return self.kernel.tau

    @property
    def branching_ratio(self) -> float:
        return self.branching.spectral_radius

    def require_stationary(self, what="this operation"):
        if not self.branching.is_stationary:
            raise ExplosiveProcessError(self.branching_ratio, what)


class EventStream:
    """Per-type sorted event times observed on ``[0, T]``."""

    def __init__(self, times: Sequence, T: float):
        T = float(T)
        if not (np.isfinite(T) and T > 0):
            raise HawkesError(f"observation window T must be positive, got {T}")
        arrays = []
        for i, ti in enumerate(times):
            arr = np.array(ti, dtype=float).reshape(-1)
            if arr.size and (arr[0] < 0 or arr[-1] > T):
                raise HawkesError(f"type {i} has timestamps outside [0, {T}]")
            if np.any(np.diff(arr) <= 0):
                raise HawkesError(
                    f"type {i} timestamps must be strictly increasing "
                    "(duplicates within a type are not allowed)"
                )
            if not np.all(np.isfinite(arr)):
                raise HawkesError(f"type {i} has non-finite timestamps")
            arr.setflags(write=False)
            arrays.append(arr)
        if not arrays:
            raise HawkesError("an event stream needs at least one type")
        self._times = tuple(arrays)
        self.T = T

    @classmethod
    def from_marked(cls, times, types, T, dim=None):
        """Build from parallel arrays of timestamps and type indices."""
        times = np.asarray(times, dtype=float)
        types = np.asarray(types, dtype=int)
        if times.shape != types.shape:
            raise HawkesError("times and types must have the same length")
        if types.size and types.min() < 0:
            raise HawkesError("type indices must be nonnegative")
        if dim is None:
            dim = int(types.max()) + 1 if types.size else 1
        elif types.size and types.max() >= dim:
            raise HawkesError(f"type index {types.max()} out of range for dimension {dim}")
        per_type = [np.sort(times[types == i]) for i in range(dim)]
        return cls(per_type, T)

    @property
    def times(self):
        return self._times

    @property
    def dim(self) -> int:
        return len(self._times)

    def __len__(self):
        return sum(t.size for t in self._times)

    def counts(self):
        return np.array([t.size for t in self._times])

    def merged(self):
        """All events sorted by time (ties broken by type), as ``(times, types)``."""
        times = np.concatenate(self._times)
        types = np.concatenate(
            [np.full(t.size, i, dtype=np.int64) for i, t in enumerate(self._times)]
        )
        order = np.lexsort((types, times))
        return times[order], types[order]

    def __eq__(self, other):
        if not isinstance(other, EventStream):
            return NotImplemented
        return (
            self.T == other.T
            and self.dim == other.dim
            and all(np.array_equal(a, b) for a, b in zip(self._times, other._times))
        )

    def __repr__(self):
        return f"EventStream(dim={self.dim}, events={len(self)}, T={self.T})"


@dataclass(frozen=True, eq=False)
class IntensityTrace:
    """Intensities on a time grid, split into exogenous and endogenous parts.

    ``values``, ``exo_part`` and ``endo_part`` have shape ``(len(grid), M)``.
    """

    grid: np.ndarray
    values: np.ndarray
    exo_part: np.ndarray
    endo_part: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def default_grid(T, step=0.1):
    """Uniform grid ``0, step, 2*step, ... <= T``."""
    n = int(np.floor(T / step + 1e-9))
    return np.arange(n + 1) * step


def _check_dims(model, events):
    if events.dim != model.dim:
        raise HawkesError(
            f"event stream has {events.dim} types but the model has dimension {model.dim}"
        )


def _post_event_states(times, tau):
    """Kernel sums ``sum_{l<=k} exp(-(t_k - t_l)/tau)`` right after each event."""
    out = np.empty(times.size)
    s = 0.0
    prev = 0.0
    for k, t in enumerate(times.tolist()):
        s = s * math.exp(-(t - prev) / tau) + 1.0
        out[k] = s
        prev = t
    return out


def kernel_sums(times, tau, at):
    """``sum_{t_l < s} exp(-(s - t_l)/tau)`` for each ``s`` in ``at``.

    Uses the running decay state of the sorted event times, so the cost is
    ``O(len(times) + len(at))``. Events at exactly ``s`` are excluded.
    """
    at = np.asarray(at, dtype=float)
    if times.size == 0:
        return np.zeros(at.shape)
    states = _post_event_states(times, tau)
    last = np.searchsorted(times, at, side="left") - 1
    out = np.zeros(at.shape)
    has = last >= 0
    idx = last[has]
    out[has] = states[idx] * np.exp(-(at[has] - times[idx]) / tau)
    return out


def evaluate_intensity(model: HawkesModel, events: EventStream, grid=None) -> IntensityTrace:
    """Conditional intensities of ``model`` given ``events`` on ``grid``.

    Events that occur exactly at a grid time do not contribute to the
    intensity at that time.
    """
    _check_dims(model, events)
    grid = default_grid(events.T) if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise HawkesError("grid must be a non-empty 1-d array")
    if np.any(np.diff(grid) <= 0):
        raise HawkesError("grid must be strictly increasing")
    if grid[0] < 0 or grid[-1] > events.T:
        raise HawkesError(f"grid points must lie within [0, {events.T}]")

    tau = model.tau
    R = np.column_stack([kernel_sums(t, tau, grid) for t in events.times]) / tau
    endo = R @ model.N
    exo = model.exo.rate_at(grid)
    values = exo + endo
    if not np.all(np.isfinite(values)):
        raise HawkesError("non-finite intensity; inputs overflow the evaluation")
    return IntensityTrace(grid, values, exo, endo)


def intensity_at_events(model: HawkesModel, events: EventStream):
    """Left-limit intensity of each event's own type at its timestamp.

    Returns one array per type, aligned with ``events.times``.
    """
    _check_dims(model, events)
    tau = model.tau
    out = []
    for i, ti in enumerate(events.times):
        if ti.size == 0:
            out.append(np.zeros(0))
            continue
        R = np.column_stack([kernel_sums(tj, tau, ti) for tj in events.times]) / tau
        out.append(model.exo.rate_at(ti)[:, i] + R @ model.N[:, i])
    return out


def simulate(model: HawkesModel, T: float, seed: int, check_bound: bool = False) -> EventStream:
    """Sample an event stream on ``[0, T]`` by Ogata thinning.

    Between events the total intensity only decays, so its value just after
    the last accepted event bounds it until the next exogenous breakpoint.
    Candidates never cross a breakpoint; the bound is rebuilt there.
    """
    T = float(T)
    if not (np.isfinite(T) and T > 0):
        raise HawkesError(f"horizon T must be positive, got {T}")
    model.require_stationary("simulation")

    rng = np.random.default_rng(seed)
    M = model.dim
    tau = model.tau
    jumps = model.N / tau
    bps = model.exo.breakpoints.tolist() + [np.inf]
    rates = model.exo.rates

    times = [[] for _ in range(M)]
    state = np.zeros(M)  # endogenous intensity per target type
    t = 0.0
    seg = 0
    mu = rates[0]
    mu_total = float(mu.sum())
    while True:
        bound = mu_total + float(state.sum())
        seg_end = min(bps[seg + 1], T)
        if bound <= 0.0:
            # nothing can happen until the rates change
            t_next = seg_end
        else:
            t_next = t + rng.exponential(1.0 / bound)
        if t_next >= seg_end:
            state *= np.exp(-(seg_end - t) / tau)
            t = seg_end
            if t >= T:
                break
            seg += 1
            mu = rates[seg]
            mu_total = float(mu.sum())
            continue
        state *= np.exp(-(t_next - t) / tau)
        t = t_next
        lam = mu + state
        lam_total = float(lam.sum())
        if check_bound and lam_total > bound * (1 + 1e-12):
            raise AssertionError(f"thinning bound violated at t={t}: {lam_total} > {bound}")
        u = rng.uniform() * bound
        if u >= lam_total:
            continue
        i = int(np.searchsorted(np.cumsum(lam), u, side="right"))
        i = min(i, M - 1)
        if times[i] and times[i][-1] >= t:
            # duplicate timestamp within a type; reject to keep lists strict
            continue
        times[i].append(t)
        state += jumps[i]
    return EventStream(times, T)


@dataclass(frozen=True, eq=False)
class EndoExoRatio:
    """Endogenous share of the intensity; ``silent`` marks points with ``lambda = 0``."""

    grid: np.ndarray
    ratio: np.ndarray
    silent: np.ndarray

    @property
    def any_silent(self) -> bool:
        return bool(self.silent.any())


def endo_exo_ratio(trace: IntensityTrace) -> EndoExoRatio:
    """Fraction of each intensity coming from self- and cross-excitation.

    Where the total intensity is exactly zero the ratio is set to 0 and the
    point is flagged in ``silent``.
    """
    silent = trace.values == 0
    safe = np.where(silent, 1.0, trace.values)
    ratio = np.where(silent, 0.0, trace.endo_part / safe)
    return EndoExoRatio(trace.grid, ratio, silent)


def stationary_mean(model: HawkesModel) -> np.ndarray:
    """Long-run expected intensity ``(I - N^T)^{-1} mu``."""
    model.require_stationary("the stationary mean")
    if not model.exo.is_constant:
        raise HawkesError("stationary mean is undefined for a time-varying exogenous schedule")
    N = model.N
    return solve_linear(np.eye(model.dim) - N.T, model.exo.rates[0])


def effective_memory(model: HawkesModel) -> float:
    """Relaxation time ``tau / (1 - n)`` renormalized by the cascade."""
    model.require_stationary("the effective memory")
    return model.tau / (1.0 - model.branching_ratio)


def impulse_response(model: HawkesModel, grid, source: int = 0) -> np.ndarray:
    """Expected intensity after a single type-``source`` event at ``t = 0``.

    The delta spike of the source event itself is excluded. With an
    exponential kernel the response solves a linear ODE, giving

    .. math:: y(t) = \\tau^{-1} \\exp(-(I - N^T) t/\\tau)\\, N^T e_s,

    which for ``M = 1`` is ``(n/tau) exp(-(1-n) t/tau)``.
    Returns shape ``(len(grid), M)``; zero for ``t <= 0``.
    """
    model.require_stationary("the impulse response")
    grid = np.asarray(grid, dtype=float)
    M = model.dim
    if not 0 <= source < M:
        raise HawkesError(f"source type {source} out of range for dimension {M}")
    tau = model.tau
    N = model.N
    out = np.zeros((grid.size, M))
    pos = grid > 0
    if M == 1:
        n = N[0, 0]
        out[pos, 0] = (n / tau) * np.exp(-(1.0 - n) * grid[pos] / tau)
        return out
    generator = -(np.eye(M) - N.T) / tau
    start = N[source] / tau
    for k in np.flatnonzero(pos):
        out[k] = expm(generator * grid[k]) @ start
    return out
