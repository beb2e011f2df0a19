"""Simulate a two-type Hawkes process and look at its intensity.

Run: python demos/01_simulate_and_intensity.py
"""
import numpy as np

from hawkesrank import HawkesModel, evaluate_intensity, simulate, stationary_mean

# type 0 excites type 1 more than the reverse (N is source-row: N[j, i] is j -> i)
model = HawkesModel.from_arrays(mu=[0.2, 0.3], N=[[0.3, 0.25], [0.05, 0.35]], tau=1.0)
print("branching ratio:", round(model.branching_ratio, 4))

T = 20_000.0
events = simulate(model, T, seed=0)
print("events per type:", events.counts())

# the long-run rate should approach the first moment
print("empirical rates:  ", np.round(events.counts() / T, 4))
print("stationary means: ", np.round(stationary_mean(model), 4))

trace = evaluate_intensity(model, events)
k = int(np.argmax(trace.values.sum(axis=1)))
print(f"busiest grid time t={trace.grid[k]:.1f}: lambda={np.round(trace.values[k], 3)}, "
      f"of which endogenous {np.round(trace.endo_part[k], 3)}")
