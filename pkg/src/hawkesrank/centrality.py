"""
Static centralities: Katz, eigenvector, PageRank and the first-moment Hawkes ranking.

Adjacency matrices follow the same source-row layout as branching matrices:
``A[j, i]`` is the strength of the directed influence ``j -> i``. With this
layout Katz centrality is ``(I - alpha A^T)^{-1} beta`` and the first-moment
ranking of a Hawkes process with branching matrix ``N`` is Katz on ``A = N``
with ``alpha = 1``.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from hawkesrank.core import BranchingMatrix, ExplosiveProcessError
from hawkesrank.linalg import solve_linear, spectral_radius

METHODS = ("first_moment", "katz", "eigenvector", "pagerank")


class CentralityError(ValueError):
    pass


class ConvergenceError(CentralityError):
    pass


@dataclass(frozen=True, eq=False)
class AdjacencyMatrix:
    entries: np.ndarray
    lambda_max: float = field(init=False)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise CentralityError(f"adjacency matrix must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise CentralityError("adjacency matrix contains non-finite values")
        if np.any(arr < 0):
            raise CentralityError("adjacency entries must be nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "lambda_max", spectral_radius(arr))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_irreducible(self) -> bool:
        n_comp, _ = connected_components(self.entries > 0, directed=True, connection="strong")
        return n_comp == 1


@dataclass(frozen=True, eq=False)
class CentralityVector:
    scores: np.ndarray
    method: str
    reducible: bool = False

    def ranks(self):
        """Rank 1 for the highest score; ties broken by lower index."""
        return rank_order(self.scores)


def rank_order(scores):
    order = np.argsort(-np.asarray(scores), kind="stable")
    ranks = np.empty(order.size, dtype=int)
    ranks[order] = np.arange(1, order.size + 1)
    return ranks


def _as_adjacency(A):
    if isinstance(A, AdjacencyMatrix):
        return A
    if isinstance(A, BranchingMatrix):
        return AdjacencyMatrix(A.entries)
    return AdjacencyMatrix(A)


def katz(A, alpha, beta) -> CentralityVector:
    """Katz centrality ``(I - alpha A^T)^{-1} beta``.

    Requires ``0 < alpha < 1/lambda_max``.
    """
    A = _as_adjacency(A)
    beta = np.broadcast_to(np.asarray(beta, dtype=float), (A.dim,))
    if not np.all(np.isfinite(beta)):
        raise CentralityError("beta must be finite")
    bound = np.inf if A.lambda_max == 0 else 1.0 / A.lambda_max
    if not (0 < alpha < bound):
        raise CentralityError(
            f"alpha = {alpha} outside the convergent range (0, {bound:.6g})"
        )
    try:
        c = solve_linear(np.eye(A.dim) - alpha * A.entries.T, beta)
    except np.linalg.LinAlgError as exc:
        raise CentralityError(f"Katz system is numerically singular: {exc}") from exc
    return CentralityVector(c, "katz")


def katz_iterative(A, alpha, beta, tol=1e-14, max_iter=1_000_000):
    """Katz centrality by iterating ``c <- alpha A^T c + beta`` from ``beta``."""
    A = _as_adjacency(A)
    beta = np.broadcast_to(np.asarray(beta, dtype=float), (A.dim,))
    At = alpha * A.entries.T
    c = beta.copy()
    for _ in range(max_iter):
        nxt = At @ c + beta
        if np.max(np.abs(nxt - c)) <= tol * max(1.0, np.max(np.abs(nxt))):
            return nxt
        c = nxt
    raise ConvergenceError("Katz fixed-point iteration did not converge")


def _power_iterate(B, x, tol, max_iter):
    x = x / x.sum()
    for it in range(max_iter):
        y = B @ x
        s = y.sum()
        if s <= 0:
            return x, 0.0, it
        y = y / s
        if np.abs(y - x).sum() < tol:
            return y, s, it
        x = y
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations "
        "(near-degenerate leading eigenvalues?)"
    )


def eigenvector_centrality(A, tol=1e-10, max_iter=100_000) -> CentralityVector:
    """Perron vector of ``A^T``, L1-normalized.

    Power iteration runs on ``A^T + (lambda_max/2) I``, which has the same
    leading eigenvector but no other eigenvalue on the spectral circle. For
    reducible matrices a warning flag is set and the result is the limit from
    the lowest-index unit start vector whose growth rate reaches
    ``lambda_max``, so degenerate spectra resolve to the lowest index.
    """
    A = _as_adjacency(A)
    lam = A.lambda_max
    if lam == 0:
        raise CentralityError("eigenvector centrality is undefined for a nilpotent/zero matrix")
    shift = 0.5 * lam
    B = A.entries.T + shift * np.eye(A.dim)
    if A.is_irreducible():
        c, _, _ = _power_iterate(B, np.ones(A.dim), tol, max_iter)
        return CentralityVector(c, "eigenvector")

    warnings.warn("reducible adjacency matrix: eigenvector centrality is not unique",
                  stacklevel=2)
    for i in range(A.dim):
        start = np.zeros(A.dim)
        start[i] = 1.0
        c, growth, _ = _power_iterate(B, start, tol, max_iter)
        if abs(growth - (lam + shift)) <= 1e-8 * (lam + shift):
            return CentralityVector(c, "eigenvector", reducible=True)
    raise ConvergenceError("no start vector reached the leading eigenvalue")


def pagerank(A, d=0.85, tol=1e-12, max_iter=1_000_000) -> CentralityVector:
    """PageRank on the row-normalized link matrix; dangling rows teleport uniformly."""
    A = _as_adjacency(A)
    if not 0 < d < 1:
        raise CentralityError(f"damping factor must lie in (0, 1), got {d}")
    M = A.dim
    out = A.entries.sum(axis=1)
    dangling = out == 0
    S = np.where(dangling[:, None], 1.0 / M, A.entries / np.where(dangling, 1.0, out)[:, None])
    St = S.T
    pr = np.full(M, 1.0 / M)
    for _ in range(max_iter):
        nxt = (1 - d) / M + d * (St @ pr)
        nxt /= nxt.sum()
        if np.abs(nxt - pr).sum() < tol:
            return CentralityVector(nxt, "pagerank")
        pr = nxt
    raise ConvergenceError("PageRank power iteration did not converge")


def first_moment_rank(N, mu) -> CentralityVector:
    """Stationary first moment ``(I - N^T)^{-1} mu`` of a Hawkes process."""
    if not isinstance(N, BranchingMatrix):
        N = BranchingMatrix(N)
    if not N.is_stationary:
        raise ExplosiveProcessError(N.spectral_radius, "the first-moment ranking")
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (N.dim,))
    if np.any(mu < 0):
        raise CentralityError("exogenous rates must be nonnegative")
    c = solve_linear(np.eye(N.dim) - N.entries.T, mu)
    return CentralityVector(c, "first_moment")
