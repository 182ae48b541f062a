"""Run the first-mistake annotation pipeline end to end, in process.

Raters qualify on gold tasks (3 of 4 needed), a seeded 20% of real tasks is
double-labeled for agreement measurement, and the export recomputes step
labels from each kept verdict. The whole run is an append-only event log, so
reloading the store replays to an identical snapshot.
"""

import tempfile

from reasonlab import (
    SampleRequest,
    SynthPolicyParams,
    SynthSpec,
    SyntheticPolicy,
    Verdict,
    generate_problems,
    oracle_first_mistake,
    parse_trace,
)
from reasonlab.annotation import AnnotationService

corpus = generate_problems(SynthSpec(num_problems=20, seed=61))
table = {sp.problem.id: sp for sp in corpus}
policy = SyntheticPolicy(SynthPolicyParams(0.5, 0.1), corpus)


def truth(task):
    mistake = oracle_first_mistake(table[task.problem_id],
                                   parse_trace("\n".join(task.steps)))
    return (Verdict.no_mistake() if mistake is None
            else Verdict.first_mistake(mistake + 1))


store = tempfile.mkdtemp(prefix="annotation-demo-")
service = AnnotationService(store)

gold = []
for sp in corpus[:4]:
    (t,) = policy.sample_full(SampleRequest(sp.problem, num_samples=1), seed=5)
    m = oracle_first_mistake(sp, t)
    gold.append((sp.problem, t, Verdict.no_mistake() if m is None
                 else Verdict.first_mistake(m + 1)))
service.enqueue_gold(gold)

samples = []
for i, sp in enumerate(corpus):
    (t,) = policy.sample_full(SampleRequest(sp.problem, num_samples=1),
                              seed=10 + i)
    samples.append((sp.problem, t))
service.enqueue_batch(samples, duplicate_fraction=0.2, seed=0)

for name in ("alice", "bob"):
    service.register_annotator(name)
    while (task := service.next_task(name)) is not None:
        service.submit_verdict(task.task_id, name, truth(task))
    print(f"{name}: {service.annotators[name].to_json()}")

examples, report = service.export_prm_dataset()
print(f"\nexported {len(examples)} labeled examples")
print(f"duplicate pairs: {service.agreement_stats()['duplicate_pairs']}, "
      f"kappa: {service.agreement_stats()['cohens_kappa']}")

replayed = AnnotationService(store)
print(f"log replay reproduces the snapshot byte-exact: "
      f"{replayed.snapshot_bytes() == service.snapshot_bytes()}")
print(f"\n(event log at {store}/events.jsonl; "
      f"serve it over HTTP with: reasonlab serve-annotation --store {store})")
