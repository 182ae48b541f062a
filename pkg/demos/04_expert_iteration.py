"""Expert iteration under outcome-only vs step-level supervision.

Filtering experts by final answer alone lets the policy learn to reach right
answers through wrong steps (its recovery rate climbs); picking experts with
a step-level scorer drives the hidden step-error rate toward zero instead.
The evaluation prints both the visible final-answer error and the oracle
trace error that a real experiment could not observe.
"""

from reasonlab import (
    OracleRewardModel,
    SynthPolicyParams,
    SynthSpec,
    SyntheticPolicy,
    generate_problems,
)
from reasonlab.expert_iteration import ExpertConfig, run_expert_iteration

corpus = generate_problems(SynthSpec(num_problems=130, seed=9001))
train = [sp.problem for sp in corpus[:100]]
val = [sp.problem for sp in corpus[100:]]

for mode in ("final_answer", "orm"):
    policy = SyntheticPolicy(SynthPolicyParams(0.5, 0.1), corpus)
    scorer = OracleRewardModel(corpus) if mode == "orm" else None
    cfg = ExpertConfig(improvement=mode, epochs=3, k=32, seed=1)
    report = run_expert_iteration(cfg, train, val, policy, scorer=scorer)
    print(f"\nimprovement mode: {mode}")
    for rec in report.epochs:
        trace = ("n/a" if rec.val_oracle_trace_error is None
                 else f"{rec.val_oracle_trace_error:.3f}")
        print(f"  epoch {rec.epoch}: final_err={rec.val_final_answer_error:.3f}"
              f" trace_err={trace} policy={rec.policy_params}")
    print(f"  chose epoch {report.chosen_epoch}")
