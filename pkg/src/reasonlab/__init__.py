"""Process- vs outcome-feedback experiments on step-wise reasoning traces.

A desk-scale toolkit around one trace format (calculator-annotated steps plus
a final-answer line): synthetic arithmetic-chain tasks with a step oracle,
pluggable sampling policies, outcome/process step labeling, trainable and
oracle reward models, sample-aggregation decoding, expert iteration,
selective prediction, evaluation metrics, and a human-annotation service
with an HTTP API.
"""

from .calculator import eval_calculator, parse_number  # noqa: F401
from .errors import AllSamplesAnswerless, ReasonLabError  # noqa: F401
from .traces import (  # noqa: F401
    FINAL_ANSWER_MARKER,
    Problem,
    Step,
    Trace,
    extract_final_answer,
    final_answer_match,
    normalize_answer,
    parse_trace,
    render_trace,
    verify_calc_annotations,
)
from .labeling import (  # noqa: F401
    StepLabels,
    Verdict,
    heuristic_step_labels,
    oracle_step_labels,
    orm_labels,
    prm_labels_from_annotation,
)
from .policy import (  # noqa: F401
    RemotePolicy,
    SampleRequest,
    SynthPolicyParams,
    SyntheticPolicy,
)
from .decoding import (  # noqa: F401
    best_of,
    majority_vote,
    rm_weighted,
    selective_predict,
    selective_threshold,
    step_level_rerank,
)
from .reward_model import (  # noqa: F401
    OracleRewardModel,
    RmTrainConfig,
    TrainedRewardModel,
)
from .synthetic import SynthSpec, generate_problems, oracle_first_mistake  # noqa: F401
from .bench import standard_benchmark  # noqa: F401

__version__ = "0.1.0"
