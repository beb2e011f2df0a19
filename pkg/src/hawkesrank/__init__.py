"""Dynamic event-intensity rankings from multivariate Hawkes processes.

Static centralities (Katz, eigenvector, PageRank) appear as mean-field limits
of the stationary first moment; the realized intensities give a ranking that
moves with every event and every exogenous shock.
"""
__version__ = "0.1.0"

from hawkesrank.core import (  # noqa: E402
    BranchingMatrix,
    EndoExoRatio,
    EventStream,
    ExoSchedule,
    ExplosiveProcessError,
    HawkesError,
    HawkesModel,
    IntensityTrace,
    Kernel,
    effective_memory,
    endo_exo_ratio,
    evaluate_intensity,
    impulse_response,
    simulate,
    stationary_mean,
)
from hawkesrank.centrality import (  # noqa: E402
    AdjacencyMatrix,
    CentralityVector,
    eigenvector_centrality,
    first_moment_rank,
    katz,
    pagerank,
)
from hawkesrank.estimation import FitConfig, FitResult, fit_mle, log_likelihood  # noqa: E402
from hawkesrank.leadlag import bin_events, leadlag_adjacency, sensitivity_sweep  # noqa: E402
from hawkesrank.netgen import BaGraphConfig, generate_ba_branching, powerlaw_exo  # noqa: E402
from hawkesrank.experiments import (  # noqa: E402
    BenchmarkConfig,
    ShockSpec,
    apply_shock,
    run_benchmark,
    smooth,
    spearman,
)
