"""How much of the activity is self-generated?

The endogenous share of the intensity averages to the branching ratio for a
univariate stationary process.

Run: python demos/02_endo_exo_ratio.py
"""
from hawkesrank import HawkesModel, endo_exo_ratio, evaluate_intensity, simulate

for n in (0.2, 0.5, 0.8):
    model = HawkesModel.from_arrays([0.5], [[n]], 1.0)
    events = simulate(model, 20_000.0, seed=1)
    trace = evaluate_intensity(model, events)
    ratio = endo_exo_ratio(trace)
    # time-averaged share of the mean intensity
    share = trace.endo_part.mean() / trace.values.mean()
    print(f"n={n}: endogenous share {share:.3f}, mean pointwise ratio {ratio.ratio.mean():.3f}")
