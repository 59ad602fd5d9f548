"""Natural evolution strategies for unconstrained and implicitly
constrained black-box optimization.

The engine implements one configurable generation loop; named presets
recover FM-NES (full feature set), DX-NES-IC (no rank-one stretch, no
reset), xNES (fixed rates, rank weights only), the resampling baseline
xNES/R, and the ablation variants Method A/B/C.
"""

from .distribution import (
    STRATEGY_MODES,
    DerivedParams,
    SearchState,
    StrategyConfig,
    chi_d,
    compute_distance_weights,
    compute_mu_eff,
    compute_rank_weights,
    config_for_strategy,
    dump_config,
    load_config,
    parse_config,
    save_config,
)
from .engine import (
    INFEASIBLE_VALUE,
    EvaluatedSolution,
    NaturalGradients,
    Optimizer,
    Phase,
    StepSizeRangeError,
)
from .harness import (
    ExperimentSpec,
    SummaryRow,
    TrialRecord,
    emit_csv,
    emit_json,
    run_experiment,
    run_trial,
)
from .problems import (
    BENCHMARK_NAMES,
    EvalCounter,
    Problem,
    evaluate,
    make_benchmark,
    resample_ask,
)

__all__ = [
    "BENCHMARK_NAMES",
    "DerivedParams",
    "EvalCounter",
    "EvaluatedSolution",
    "ExperimentSpec",
    "INFEASIBLE_VALUE",
    "NaturalGradients",
    "Optimizer",
    "Phase",
    "Problem",
    "STRATEGY_MODES",
    "SearchState",
    "StepSizeRangeError",
    "StrategyConfig",
    "SummaryRow",
    "TrialRecord",
    "chi_d",
    "compute_distance_weights",
    "compute_mu_eff",
    "compute_rank_weights",
    "config_for_strategy",
    "dump_config",
    "emit_csv",
    "emit_json",
    "evaluate",
    "load_config",
    "make_benchmark",
    "parse_config",
    "resample_ask",
    "run_experiment",
    "run_trial",
    "save_config",
]

__version__ = "0.1.0"
