"""Simulation and phase-shift optimization for surface-assisted
multi-pair wireless links under statistical channel knowledge.

The package provides Rician fading channel generation (`channel`),
Monte-Carlo and closed-form achievable rates (`rate`), genetic-algorithm
phase optimization with exhaustive and random baselines (`optimize`),
and sweep/validation experiment drivers (`experiments`, `cli`).
"""

from .channel import (
    ChannelRealization,
    PairParams,
    SystemParams,
    los_steering,
    sample_fading_batch,
    sample_realization,
    sample_rician,
    substream,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    OracleCheck,
    OracleReport,
    REFERENCE_PAIRS,
    ResultRow,
    config_from_dict,
    default_config,
    default_system,
    derive_point_seed,
    emit_results,
    load_config,
    render_results,
    run_point,
    run_sweep,
    snr_to_power,
    validate_oracles,
)
from .optimize import (
    ContinuousPhases,
    DegenerateObjectiveError,
    DiscretePhases,
    GaConfig,
    Individual,
    InfeasibleSearchError,
    OptResult,
    PhaseDomain,
    crossover,
    domain_of,
    evaluate_and_sort,
    exhaustive_search,
    fitness,
    ga_optimize,
    init_population,
    mutate,
    quantize,
    random_search,
    select,
)
from .rate import (
    PhaseConfig,
    RateModel,
    RateReport,
    approx_rates,
    effective_channel_power,
    instantaneous_sinr,
    monte_carlo_rates,
    omega,
    omega_double_sum,
    rate_model,
    second_moment,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # channel
    "PairParams",
    "SystemParams",
    "ChannelRealization",
    "substream",
    "los_steering",
    "sample_rician",
    "sample_realization",
    "sample_fading_batch",
    # rate
    "PhaseConfig",
    "RateReport",
    "RateModel",
    "rate_model",
    "effective_channel_power",
    "instantaneous_sinr",
    "monte_carlo_rates",
    "omega",
    "omega_double_sum",
    "second_moment",
    "approx_rates",
    # optimize
    "DegenerateObjectiveError",
    "InfeasibleSearchError",
    "ContinuousPhases",
    "DiscretePhases",
    "PhaseDomain",
    "domain_of",
    "GaConfig",
    "Individual",
    "OptResult",
    "fitness",
    "init_population",
    "evaluate_and_sort",
    "select",
    "crossover",
    "mutate",
    "ga_optimize",
    "exhaustive_search",
    "random_search",
    "quantize",
    # experiments
    "ConfigError",
    "REFERENCE_PAIRS",
    "ExperimentConfig",
    "ResultRow",
    "OracleCheck",
    "OracleReport",
    "snr_to_power",
    "default_system",
    "default_config",
    "config_from_dict",
    "load_config",
    "run_sweep",
    "run_point",
    "derive_point_seed",
    "render_results",
    "emit_results",
    "validate_oracles",
]
