"""Recover a branching matrix from events by maximum likelihood.

Run: python demos/05_fit_model.py
"""
import numpy as np

from hawkesrank import FitConfig, HawkesModel, fit_mle, simulate

truth = HawkesModel.from_arrays([0.2, 0.3], [[0.3, 0.15], [0.2, 0.35]], 1.0)
events = simulate(truth, 50_000.0, seed=0)
result = fit_mle(events, FitConfig())

print("converged:", result.converged, "after", result.iterations, "iterations")
print("mu: ", np.round(result.model.exo.rates[0], 3), "true", truth.exo.rates[0])
print("N:\n", np.round(result.model.N, 3))
print("tau:", round(result.model.tau, 3), " branching ratio:", round(result.model.branching_ratio, 3))
