"""Synthetic branching matrices from a directed Barabasi-Albert ensemble."""
from dataclasses import dataclass

import numpy as np

from hawkesrank.core import BranchingMatrix
from hawkesrank.linalg import spectral_radius


@dataclass(frozen=True)
class BaGraphConfig:
    """Directed preferential-attachment graph with ``eta`` out-edges per new node."""

    M: int
    eta: int
    seed: int = 0
    include_self_loops: bool = True

    def __post_init__(self):
        if self.M < 2:
            raise ValueError(f"need at least 2 nodes, got M={self.M}")
        if not 1 <= self.eta < self.M:
            raise ValueError(f"eta must satisfy 1 <= eta < M, got eta={self.eta}, M={self.M}")


def ba_adjacency(config: BaGraphConfig) -> np.ndarray:
    """Unweighted 0/1 adjacency, source-row (``A[v, u] = 1`` for an edge ``v -> u``).

    The first ``eta + 1`` nodes form a complete directed seed. Every later node
    picks ``eta`` distinct earlier nodes with probability proportional to their
    current total degree (in + out, a self-loop counted once).
    """
    rng = np.random.default_rng(config.seed)
    M, eta = config.M, config.eta
    A = np.zeros((M, M))
    n_seed = eta + 1
    A[:n_seed, :n_seed] = 1.0
    np.fill_diagonal(A, 0.0)
    degree = np.zeros(M)
    degree[:n_seed] = 2 * eta
    if config.include_self_loops:
        degree[:n_seed] += 1
    for v in range(n_seed, M):
        p = degree[:v] / degree[:v].sum()
        targets = rng.choice(v, size=eta, replace=False, p=p)
        A[v, targets] = 1.0
        degree[targets] += 1
        degree[v] = eta + (1 if config.include_self_loops else 0)
    if config.include_self_loops:
        np.fill_diagonal(A, 1.0)
    return A


def rescale_to_radius(entries, target_n):
    """Multiply every entry by ``target_n / lambda_max``."""
    lam = spectral_radius(entries)
    if lam == 0:
        raise ValueError("matrix has zero spectral radius and cannot be rescaled")
    return np.asarray(entries, dtype=float) * (target_n / lam)


def generate_ba_branching(config: BaGraphConfig, target_n: float, weight_seed: int = 0,
                          weights=None) -> BranchingMatrix:
    """BA structure, random weights on its edges, rescaled to branching ratio ``target_n``.

    ``weights`` is an optional callable ``(rng, size) -> array`` of positive
    draws; by default weights are uniform on (0, 1).
    """
    if not 0 < target_n < 1:
        raise ValueError(f"target branching ratio must lie in (0, 1), got {target_n}")
    A = ba_adjacency(config)
    rng = np.random.default_rng(weight_seed)
    mask = A > 0
    if weights is None:
        draws = rng.uniform(0.0, 1.0, size=int(mask.sum()))
        # uniform() can return exactly 0, which would drop an edge
        while np.any(draws == 0):
            draws[draws == 0] = rng.uniform(0.0, 1.0, size=int((draws == 0).sum()))
    else:
        draws = np.asarray(weights(rng, int(mask.sum())), dtype=float)
    W = np.zeros_like(A)
    W[mask] = draws
    return BranchingMatrix(rescale_to_radius(W, target_n))


def powerlaw_exo(M: int) -> np.ndarray:
    """Exogenous rates ``mu_i = i^{-1/2}`` for ``i = 1..M``."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    return np.arange(1, M + 1, dtype=float) ** -0.5
