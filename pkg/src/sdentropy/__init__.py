"""Entropy and mutual-information bounds for finite-alphabet linear Gaussian
channels, computed with sphere-decoder tree searches."""

__version__ = "0.1.0"

from .errors import (
    InvalidArgumentError, NumericDomainError, OracleSizeError, SingularMatrixError,
)
from .model import (
    ChannelInstance, Constellation, fir_channel, make_constellation, memory10_taps,
    selective_channel,
)
from .search import (
    CandidateSet, SearchParams, bfs_search, complexity_C, dfs_search, k_for_budget,
    run_search,
)
from .estimators import (
    EntropyEstimate, gaussian_bound, log_density_bounds, mc_entropy, rho_c, seb,
    true_entropy_oracle, true_log_density,
)
from .sdea import ApproxEstimate, choose_thresholds, partition, sdea_log_pdf, sdea_mi
from .baselines import bcjr_mi, hd1_log_pdf, hd1_mi, rsub_complexity, sa_log_pdf, sa_mi

__all__ = [
    "InvalidArgumentError", "NumericDomainError", "OracleSizeError", "SingularMatrixError",
    "ChannelInstance", "Constellation", "fir_channel", "make_constellation",
    "memory10_taps", "selective_channel",
    "CandidateSet", "SearchParams", "bfs_search", "complexity_C", "dfs_search",
    "k_for_budget", "run_search",
    "EntropyEstimate", "gaussian_bound", "log_density_bounds", "mc_entropy", "rho_c",
    "seb", "true_entropy_oracle", "true_log_density",
    "ApproxEstimate", "choose_thresholds", "partition", "sdea_log_pdf", "sdea_mi",
    "bcjr_mi", "hd1_log_pdf", "hd1_mi", "rsub_complexity", "sa_log_pdf", "sa_mi",
]
