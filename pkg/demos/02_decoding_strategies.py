"""Compare greedy decoding, majority voting, and reward-model reranking.

A synthetic policy with a known per-step error rate stands in for a language
model, and an oracle scorer (exact prefix-correctness) stands in for a
well-calibrated reward model, so strategy differences are pure decoding
effects.
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
    majority_vote,
    rm_weighted,
)

corpus = generate_problems(SynthSpec(num_problems=100, seed=0))
policy = SyntheticPolicy(SynthPolicyParams(step_error_rate=0.3,
                                           recovery_rate=0.05), corpus)
scorer = OracleRewardModel(corpus)

wrong = {"greedy": 0, "majority": 0, "rm_weighted": 0}
for sp in corpus:
    ref = sp.problem.reference_final
    if not final_answer_match(policy.greedy(sp.problem).final_answer, ref):
        wrong["greedy"] += 1
    samples = policy.sample_full(SampleRequest(sp.problem, num_samples=32),
                                 seed=1)
    for name, decode in (
        ("majority", lambda: majority_vote(samples, seed=1)),
        ("rm_weighted", lambda: rm_weighted(
            samples, [scorer.score(sp.problem, t) for t in samples])),
    ):
        try:
            if not final_answer_match(decode().selected_final, ref):
                wrong[name] += 1
        except AllSamplesAnswerless:
            wrong[name] += 1

print("final-answer error by strategy (100 problems, 32 samples):")
for name, count in wrong.items():
    print(f"  {name:12s} {count / len(corpus):.3f}")
print("\nexpected ordering: greedy >= majority >= rm_weighted")
