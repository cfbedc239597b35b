"""crowdpac: PAC learning from a noisy crowd of labelers, plus a seeded
simulation harness that measures query cost, per-labeler load, and
golden-query usage."""

from .crowd import (
    AdaptiveAdversary,
    Colluder,
    FiniteSupport,
    FixedHypothesis,
    HashNoise,
    InfinitePoolSpec,
    FinitePoolSpec,
    LabelerPool,
    MetricsRecord,
    Perfect,
    QueryLedger,
    UniformUnit,
    World,
    exact_disagreement_mass,
    ledger_report,
    majority_label,
    majority_size,
)
from .detection import (
    AgreementGraph,
    DetectionWorld,
    connected_components,
    detect_good_labelers,
    disagree,
)
from .errors import CrowdPacError
from .harness import (
    ExperimentConfig,
    SummaryRecord,
    TrialResult,
    aggregate_trials,
    estimate_error,
    exact_error,
    load_config,
    run_experiment,
    trial_seed,
)
from .hypotheses import (
    Complement,
    Conjunction,
    Hypothesis,
    HypothesisClass,
    Interval,
    Majority3,
    Threshold,
    consistent_hypothesis,
    evaluate,
    sample_complexity,
)
from .learner import (
    FilterParams,
    Labeled,
    Pruned,
    RunReport,
    baseline,
    combine_majority3,
    correct_label,
    filter_instances,
    interleave_learn,
    prune_and_label,
    restart_budget,
    robust_learn,
    ruin_probability,
    sample_balanced_mix,
    sample_disagreement_region,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
