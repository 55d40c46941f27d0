"""Credit-contagion simulator for networks with CDS three-node exposures.

Dual-engine design: an exact macroscopic solver for sector-level default
fractions and loss distributions, plus a microscopic Monte Carlo oracle on
sampled random networks for cross-validation.
"""

from .errors import (
    CdsnetError, ConfigError, DomainError, EmptyInput, NotFound, ParseError,
    ValidationError,
)
from .scenarios import (
    ScenarioSpec, Sector, PairExposureStats, TripleExposureStats,
    NoiseSpec, HeterogeneitySpec, MoneyStreamSpec,
    builtin_scenario, scenario_names, parse_scenario, serialize_scenario,
    hedge_sweep, with_speculative,
)
from .kernels import ChannelMoments, DefaultHistory, total_moments, reported_mean
from .macro import QuadGrid, basel_rho, build_grid, run_trajectory, run_trajectories
from .micro import (
    MicroWorld, MicroState, build_world, simulate_path, estimate_macro,
    sample_pair_graph, sample_cds_hypergraph,
)
from .risk import RiskReport, Xi0Grid, sweep, density, quantile, far, value_at_risk

__version__ = "0.1.0"

__all__ = [
    "CdsnetError", "ConfigError", "DomainError", "EmptyInput", "NotFound",
    "ParseError", "ValidationError",
    "ScenarioSpec", "Sector", "PairExposureStats", "TripleExposureStats",
    "NoiseSpec", "HeterogeneitySpec", "MoneyStreamSpec",
    "builtin_scenario", "scenario_names", "parse_scenario", "serialize_scenario",
    "hedge_sweep", "with_speculative",
    "ChannelMoments", "DefaultHistory", "total_moments", "reported_mean",
    "QuadGrid", "basel_rho", "build_grid", "run_trajectory", "run_trajectories",
    "MicroWorld", "MicroState", "build_world", "simulate_path", "estimate_macro",
    "sample_pair_graph", "sample_cds_hypergraph",
    "RiskReport", "Xi0Grid", "sweep", "density", "quantile", "far", "value_at_risk",
]
