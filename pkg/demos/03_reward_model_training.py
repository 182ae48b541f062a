"""Train a step-scoring reward model from final-answer-labeled samples.

The trainable model is logistic regression over hashed text features plus
structural trace features (verified-calculator flags carry most of the
signal). After training, corrupting one calculator span visibly drops the
per-step score.
"""

from reasonlab import (
    SampleRequest,
    SynthPolicyParams,
    SynthSpec,
    SyntheticPolicy,
    generate_problems,
    render_trace,
    parse_trace,
)
from reasonlab.labeling import build_orm_dataset
from reasonlab.reward_model import RmTrainConfig, score, train

corpus = generate_problems(SynthSpec(num_problems=30, seed=12))
policy = SyntheticPolicy(SynthPolicyParams(0.4, 0.1), corpus)

dataset = build_orm_dataset([sp.problem for sp in corpus], policy, k=8, seed=3)
print(f"training on {len(dataset)} labeled samples...")
params = train(dataset, RmTrainConfig(max_steps=400, seed=0))
meta = params.metadata
print(f"best checkpoint at step {meta['best_step']}, "
      f"validation loss {meta['best_validation_loss']:.4f}")

sp = corpus[0]
clean = sp.problem.reference_trace
print(f"\nclean reference scores: "
      f"{[round(p, 3) for p in score(params, sp.problem, clean).per_step_prob]}")

lines = render_trace(clean).split("\n")
k = 1
wrong = sp.truth[k] + 3
op, operand = sp.ops[k]
expr = f"{sp.truth[k - 1]}{op}{operand}"
lines[k] = f"Next, compute {expr}=<<{expr}={wrong}>>{wrong}."
bad = parse_trace("\n".join(lines))
print(f"after corrupting step {k}:   "
      f"{[round(p, 3) for p in score(params, sp.problem, bad).per_step_prob]}")
