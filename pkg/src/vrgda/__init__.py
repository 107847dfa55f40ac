"""Shuffling gradient descent-ascent with variance reduction for finite-sum
nonconvex-strongly-concave minimax problems, with baselines, theory-tied
diagnostics, and an experiment harness."""

from .errors import (
    ConstructionFailure,
    InvalidArgument,
    NumericFailure,
    ParseError,
    ResourceExhausted,
)
from .oracle import (
    AnchorCache,
    CountingProblem,
    FullGradientPair,
    MinimaxProblem,
    OracleCounter,
    full_gradient,
    per_sample_gradient_cache,
)
from .optim import (
    ALGO_GDA,
    ALGO_SGDA,
    ALGO_VR,
    EpochState,
    MetricContext,
    OptimizerConfig,
    TrajectoryRecord,
    gda_step,
    run,
    sgda_epoch,
    theorem1_step_sizes,
    theory_conditions,
    vr_shuffle_epoch,
)
from .shuffle import IG, RR, SO, ShufflingScheme, permutation_for_epoch, rng_for

__version__ = "0.1.0"

__all__ = [
    "ALGO_GDA",
    "ALGO_SGDA",
    "ALGO_VR",
    "AnchorCache",
    "ConstructionFailure",
    "CountingProblem",
    "EpochState",
    "FullGradientPair",
    "IG",
    "InvalidArgument",
    "MetricContext",
    "MinimaxProblem",
    "NumericFailure",
    "OptimizerConfig",
    "OracleCounter",
    "ParseError",
    "RR",
    "ResourceExhausted",
    "SO",
    "ShufflingScheme",
    "TrajectoryRecord",
    "full_gradient",
    "gda_step",
    "per_sample_gradient_cache",
    "permutation_for_epoch",
    "rng_for",
    "run",
    "sgda_epoch",
    "theorem1_step_sizes",
    "theory_conditions",
    "vr_shuffle_epoch",
]
