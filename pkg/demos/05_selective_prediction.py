"""Trade answer coverage for accuracy by abstaining on low-scored solutions.

Rerank with a calibrated scorer, then sweep the abstention fraction r: at
each r the threshold is the r-quantile of solution scores, and only
higher-scored problems are answered.
"""

from reasonlab import (
    AllSamplesAnswerless,
    OracleRewardModel,
    SampleRequest,
    SynthPolicyParams,
    SynthSpec,
    SyntheticPolicy,
    final_answer_match,
    generate_problems,
    rm_weighted,
)
from reasonlab.metrics import EvalOutcome, selective_error_curve

corpus = generate_problems(SynthSpec(num_problems=200, seed=4))
policy = SyntheticPolicy(SynthPolicyParams(0.3, 0.05), corpus)
scorer = OracleRewardModel(corpus)

outcomes = []
for sp in corpus:
    samples = policy.sample_full(SampleRequest(sp.problem, num_samples=32),
                                 seed=2)
    try:
        scores = [scorer.score(sp.problem, t) for t in samples]
        result = rm_weighted(samples, scores)
        correct = final_answer_match(result.selected_final,
                                     sp.problem.reference_final)
        picked = scores[samples.index(result.selected)].solution_prob
    except AllSamplesAnswerless:
        correct, picked = False, 0.0
    outcomes.append(EvalOutcome(sp.problem.id, correct, (), picked))

print("r     selective_error  reduction")
for p in selective_error_curve(outcomes, [0.0, 0.1, 0.2, 0.3, 0.5]):
    print(f"{p.r:.2f}  {p.selective_error:15.4f}  {p.reduction_factor:9.2f}")
