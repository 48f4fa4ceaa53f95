"""paradec: limits of parallel decoding in masked-diffusion language models.

Exact information-theoretic bounds on tractable list-operation tasks, an
ideal-posterior decoding simulator covering every standard unmasking
strategy, closed-form accuracy predictions with Monte Carlo validation,
and a procedural benchmark generator with its scoring harness.
"""

from ._backend import kernel_available
from .accuracy import (
    AccuracyEstimate,
    monte_carlo_accuracy,
    monte_carlo_run,
    replace_random_greedy_topk_accuracy,
    replace_random_temperature_onestep_accuracy,
    shuffle_topk_accuracy,
    threshold_accuracy,
)
from .decoding import (
    DecodeTrace,
    SamplerConfig,
    StrategyConfig,
    StrategyFamily,
    decode,
    sample_token,
    select_unmask,
)
from .info import (
    Partition,
    closed_form_C,
    closed_form_C_limit,
    entropy,
    optimal_lower_bound,
    partition_lower_bound,
    shuffle_stepwise_bound,
    total_correlation,
)
from .oracle import (
    IdealModel,
    InconsistentStateError,
    PosteriorTable,
    SequenceState,
    consistency_check,
    posterior_marginals,
)
from .rng import SplitMix64, substream_seed
from .tasks import (
    JointDistribution,
    TaskKind,
    TaskSpec,
    enumerate_valid_outputs,
    is_valid_output,
    make_task,
    sample_output,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyEstimate",
    "DecodeTrace",
    "IdealModel",
    "InconsistentStateError",
    "JointDistribution",
    "Partition",
    "PosteriorTable",
    "SamplerConfig",
    "SequenceState",
    "SplitMix64",
    "StrategyConfig",
    "StrategyFamily",
    "TaskKind",
    "TaskSpec",
    "closed_form_C",
    "closed_form_C_limit",
    "consistency_check",
    "decode",
    "entropy",
    "enumerate_valid_outputs",
    "is_valid_output",
    "kernel_available",
    "make_task",
    "monte_carlo_accuracy",
    "monte_carlo_run",
    "optimal_lower_bound",
    "partition_lower_bound",
    "posterior_marginals",
    "replace_random_greedy_topk_accuracy",
    "replace_random_temperature_onestep_accuracy",
    "sample_output",
    "sample_token",
    "select_unmask",
    "shuffle_stepwise_bound",
    "shuffle_topk_accuracy",
    "substream_seed",
    "threshold_accuracy",
    "total_correlation",
]
