"""
Lead-lag correlation networks from binned event counts.

This is the heuristic construction that a fitted branching matrix replaces:
its output depends on the bin width ``b`` and the lag ``ell``, and
:func:`sensitivity_sweep` measures how much.
"""
import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from hawkesrank.centrality import AdjacencyMatrix
from hawkesrank.core import EventStream


@dataclass(frozen=True, eq=False)
class BinnedSeries:
    """``counts[i, k]`` = number of type-``i`` events in ``[k b, (k+1) b)``."""

    bin_width: float
    counts: np.ndarray

    @property
    def dim(self) -> int:
        return self.counts.shape[0]

    def __len__(self):
        return self.counts.shape[1]


def bin_events(events: EventStream, b: float) -> BinnedSeries:
    """Count events per bin of width ``b``; the final partial bin is kept.

    An event at exactly ``T`` falls into the last bin.
    """
    if not b > 0:
        raise ValueError(f"bin width must be positive, got {b}")
    n_bins = max(1, int(np.ceil(events.T / b - 1e-12)))
    counts = np.zeros((events.dim, n_bins), dtype=np.int64)
    for i, t in enumerate(events.times):
        idx = np.minimum(np.floor(t / b).astype(np.int64), n_bins - 1)
        counts[i] = np.bincount(idx, minlength=n_bins)
    return BinnedSeries(float(b), counts)


@dataclass(frozen=True, eq=False)
class LeadLagMatrix(AdjacencyMatrix):
    """Normalized lead-lag adjacency; ``raw`` keeps the clipped correlations."""

    raw: np.ndarray = field(default=None)
    constant_types: tuple = ()
    norm: float = 0.0


def lagged_correlation(x, ell: int) -> np.ndarray:
    """``C[j, i]`` = Pearson correlation of ``x[j, t]`` with ``x[i, t + ell]``.

    Rows with zero variance on the overlap get correlation 0.
    """
    x = np.asarray(x, dtype=float)
    L = x.shape[1]
    lead = x[:, : L - ell]
    lag = x[:, ell:]
    lead = lead - lead.mean(axis=1, keepdims=True)
    lag = lag - lag.mean(axis=1, keepdims=True)
    s_lead = np.sqrt((lead ** 2).sum(axis=1))
    s_lag = np.sqrt((lag ** 2).sum(axis=1))
    cov = lead @ lag.T
    denom = np.outer(s_lead, s_lag)
    with np.errstate(divide="ignore", invalid="ignore"):
        C = np.where(denom > 0, cov / denom, 0.0)
    return np.clip(C, -1.0, 1.0)


def leadlag_adjacency(series: BinnedSeries, ell: int) -> LeadLagMatrix:
    """Lead-lag network, source-row: entry ``[j, i]`` is the edge ``j -> i``.

    Negative correlations are floored at 0 and the matrix is divided by its
    Frobenius norm (left unnormalized if it is all zeros). Types whose count
    series is constant get zero correlations and are reported in
    ``constant_types``.
    """
    if ell < 0:
        raise ValueError(f"lag must be nonnegative, got {ell}")
    L = len(series)
    if L <= ell + 2:
        raise ValueError(f"series of length {L} too short for lag {ell}")
    x = np.asarray(series.counts, dtype=float)
    constant = tuple(
        int(i) for i in range(series.dim)
        if np.ptp(x[i, : L - ell]) == 0 or np.ptp(x[i, ell:]) == 0
    )
    if constant:
        warnings.warn(f"constant count series for types {constant}; correlations set to 0",
                      stacklevel=2)
    raw = np.clip(lagged_correlation(x, ell), 0.0, None)
    norm = float(np.linalg.norm(raw))
    entries = raw / norm if norm > 0 else raw
    return LeadLagMatrix(entries, raw=raw, constant_types=constant, norm=norm)


@dataclass
class SweepResult:
    params: list
    matrices: list
    distances: np.ndarray

    def to_dict(self):
        return {
            "params": [{"b": b, "ell": ell} for b, ell in self.params],
            "matrices": [m.entries.tolist() for m in self.matrices],
            "distances": self.distances.tolist(),
            "max_distance": float(self.distances.max()) if self.distances.size else 0.0,
        }


def sensitivity_sweep(events: EventStream, b_values, ell_values) -> SweepResult:
    """Lead-lag matrices over the grid ``b_values x ell_values`` and their pairwise
    Frobenius distances."""
    params = [(float(b), int(ell)) for b, ell in itertools.product(b_values, ell_values)]
    if not params:
        raise ValueError("empty parameter grid")
    matrices = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for b, ell in params:
            matrices.append(leadlag_adjacency(bin_events(events, b), ell))
    stack = np.stack([m.entries for m in matrices])
    diff = stack[:, None] - stack[None, :]
    distances = np.sqrt((diff ** 2).sum(axis=(2, 3)))
    return SweepResult(params, matrices, distances)
