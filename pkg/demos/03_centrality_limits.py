"""Katz, eigenvector centrality and the Hawkes first moment on one matrix.

The first moment (I - N^T)^{-1} mu is Katz centrality with beta = mu and
alpha A = N. Pushing alpha up to 1/lambda_max makes Katz follow the
eigenvector ranking.

Run: python demos/03_centrality_limits.py
"""
import numpy as np

from hawkesrank.centrality import (
    AdjacencyMatrix,
    eigenvector_centrality,
    first_moment_rank,
    katz,
    pagerank,
    rank_order,
)

rng = np.random.default_rng(6)
# sparse random weights plus a weak ring, which keeps A irreducible
A = rng.uniform(0, 1, (6, 6)) * (rng.uniform(0, 1, (6, 6)) < 0.45)
A += 0.3 * np.roll(np.eye(6), 1, axis=1)
lam = AdjacencyMatrix(A).lambda_max
mu = rng.uniform(0.1, 1.0, 6)

alpha = 0.6 / lam
print("first moment == Katz:",
      np.allclose(first_moment_rank(alpha * A, mu).scores, katz(A, alpha, mu).scores))

eig = rank_order(eigenvector_centrality(A).scores)
print("eigenvector ranks:", eig)
for eps in (0.5, 1e-2, 1e-6):
    ranks = rank_order(katz(A, (1 - eps) / lam, 1.0).scores)
    print(f"katz ranks, alpha=(1-{eps:g})/lambda_max:", ranks,
          "matches" if np.array_equal(ranks, eig) else "")
print("pagerank ranks:   ", rank_order(pagerank(A).scores))
