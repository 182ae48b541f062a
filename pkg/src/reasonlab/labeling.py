"""Step-label dataset construction and annotation cleaning.

ORM labels mark every step of a sample with whether its final answer matched
the reference. PRM labels come from first-mistake annotations: everything
before the first major mistake is correct, the remainder incorrect. A
string-matching heuristic labeler and the synthetic oracle labeler share the
same StepLabels shape so scorers can be trained against any provenance.
"""

from dataclasses import dataclass, field
import json
import random

from .errors import AmbiguousVerdict
from .synthetic import SynthProblem, oracle_first_mistake
from .traces import Problem, Trace, final_answer_match, normalize_answer

PROVENANCES = ("orm", "prm_annotation", "heuristic", "oracle")

FIRST_MISTAKE = "first_mistake"
NO_MISTAKE = "no_mistake"
AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class Verdict:
    kind: str  # first_mistake | no_mistake | ambiguous
    index: int | None = None  # 1-based step index, first_mistake only

    def __post_init__(self):
        if self.kind == FIRST_MISTAKE and (self.index is None or self.index < 1):
            raise ValueError("first_mistake verdicts need a 1-based index")
        if self.kind in (NO_MISTAKE, AMBIGUOUS) and self.index is not None:
            raise ValueError(f"{self.kind} verdicts carry no index")

    @staticmethod
    def first_mistake(index: int) -> "Verdict":
        return Verdict(FIRST_MISTAKE, index)

    @staticmethod
    def no_mistake() -> "Verdict":
        return Verdict(NO_MISTAKE)

    @staticmethod
    def ambiguous() -> "Verdict":
        return Verdict(AMBIGUOUS)

    def to_json(self) -> dict:
        obj = {"kind": self.kind}
        if self.index is not None:
            obj["index"] = self.index
        return obj

    @staticmethod
    def from_json(obj: dict) -> "Verdict":
        return Verdict(obj["kind"], obj.get("index"))


@dataclass(frozen=True)
class StepLabels:
    labels: tuple  # per-step bools, True = correct
    provenance: str

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def is_prefix_monotone(self) -> bool:
        seen_incorrect = False
        for label in self.labels:
            if seen_incorrect and label:
                return False
            if not label:
                seen_incorrect = True
        return True


@dataclass(frozen=True)
class AnnotationRecord:
    problem_id: str
    sample_id: str
    annotator_id: str
    verdict: Verdict
    timestamp: float = 0.0


@dataclass(frozen=True)
class LabeledExample:
    problem: Problem
    trace: Trace
    labels: StepLabels
    sample_id: str = ""


def orm_labels(trace: Trace, reference_final: str | None) -> StepLabels:
    """Every step shares one label: did the sample's final answer match."""
    correct = final_answer_match(trace.final_answer, reference_final)
    return StepLabels((correct,) * len(trace.steps), "orm")


def prm_labels_from_annotation(trace: Trace, verdict: Verdict) -> StepLabels:
    """Steps before the first major mistake are correct, the rest incorrect."""
    n = len(trace.steps)
    if verdict.kind == AMBIGUOUS:
        raise AmbiguousVerdict("ambiguous verdicts yield no labels")
    if verdict.kind == NO_MISTAKE:
        return StepLabels((True,) * n, "prm_annotation")
    first_bad = verdict.index  # 1-based
    return StepLabels(tuple(i + 1 < first_bad for i in range(n)), "prm_annotation")


def oracle_step_labels(problem: SynthProblem, trace: Trace) -> StepLabels:
    """PRM-style labels with the synthetic oracle standing in for the rater."""
    m = oracle_first_mistake(problem, trace)
    n = len(trace.steps)
    if m is None:
        return StepLabels((True,) * n, "oracle")
    return StepLabels(tuple(i < m for i in range(n)), "oracle")


def heuristic_step_labels(trace: Trace, reference_trace: Trace) -> StepLabels:
    """Step-level string-matching heuristic over intermediate numeric results.

    A step is correct iff each of its declared calculator results appears
    among the reference trace's intermediate results (or it has no calculator
    span); a prefix-monotone closure is then applied.
    """
    reference_results = {
        normalize_answer(ann.declared_result)
        for step in reference_trace.steps
        for ann in step.calc_annotations
    }
    labels = []
    broken = False
    for step in trace.steps:
        ok = all(normalize_answer(ann.declared_result) in reference_results
                 for ann in step.calc_annotations)
        broken = broken or not ok
        labels.append(not broken)
    return StepLabels(tuple(labels), "heuristic")


def build_orm_dataset(problems, policy, k: int = 96, temperature: float = 1.0,
                      seed: int = 0, max_steps: int = 15):
    """K sampled traces per problem, each labeled via orm_labels."""
    from .policy import SampleRequest

    examples = []
    for problem in problems:
        traces = policy.sample_full(
            SampleRequest(problem, num_samples=k, temperature=temperature,
                          max_steps=max_steps), seed=seed)
        for j, trace in enumerate(traces):
            examples.append(LabeledExample(
                problem, trace, orm_labels(trace, problem.reference_final),
                sample_id=f"{problem.id}#{j}"))
    return examples


def select_prm_annotation_targets(problems, policy, k: int = 96,
                                  samples_per_problem: int = 3, seed: int = 0,
                                  temperature: float = 1.0, max_steps: int = 15):
    """Annotation targets: samples from problems the majority vote gets wrong."""
    from .decoding import majority_vote
    from .errors import AllSamplesAnswerless
    from .policy import SampleRequest

    rng = random.Random(seed)
    targets = []
    for problem in problems:
        traces = policy.sample_full(
            SampleRequest(problem, num_samples=k, temperature=temperature,
                          max_steps=max_steps), seed=seed)
        try:
            result = majority_vote(traces, seed=seed)
            majority_correct = final_answer_match(result.selected_final,
                                                  problem.reference_final)
        except AllSamplesAnswerless:
            majority_correct = False
        if majority_correct:
            continue
        chosen = rng.sample(traces, min(samples_per_problem, len(traces)))
        targets.extend((problem, trace) for trace in chosen)
    return targets


@dataclass
class CleaningReport:
    kept: list
    removed_annotator_ids: list
    removed_problem_ids: list
    annotator_agreement: dict  # annotator_id -> agreement rate on duplicates
    removed_record_fraction: float
    kept_sample_count: int
    kept_problem_count: int


def clean_annotations(records, duplicated_subset, agreement_threshold: float = 0.75):
    """Drop low-agreement annotators and ambiguous-flagged problems.

    duplicated_subset: sample_ids labeled by two annotators. Agreement is
    exact verdict equality, index for index; one non-cascading pass.
    """
    by_sample = {}
    for rec in records:
        by_sample.setdefault(rec.sample_id, []).append(rec)

    agree_counts = {}
    for sample_id in duplicated_subset:
        pair = by_sample.get(sample_id, [])
        distinct = {}
        for rec in pair:
            distinct.setdefault(rec.annotator_id, rec)
        if len(distinct) < 2:
            continue
        first, second = list(distinct.values())[:2]
        agreed = first.verdict == second.verdict
        for rec in (first, second):
            hits, total = agree_counts.get(rec.annotator_id, (0, 0))
            agree_counts[rec.annotator_id] = (hits + (1 if agreed else 0), total + 1)

    agreement = {aid: hits / total for aid, (hits, total) in agree_counts.items()}
    removed_annotators = sorted(aid for aid, rate in agreement.items()
                                if rate < agreement_threshold)
    removed_problems = sorted({rec.problem_id for rec in records
                               if rec.verdict.kind == AMBIGUOUS})

    removed_annotator_set = set(removed_annotators)
    removed_problem_set = set(removed_problems)
    kept = [rec for rec in records
            if rec.annotator_id not in removed_annotator_set
            and rec.problem_id not in removed_problem_set
            and rec.verdict.kind != AMBIGUOUS]

    total = len(records)
    report = CleaningReport(
        kept=kept,
        removed_annotator_ids=removed_annotators,
        removed_problem_ids=removed_problems,
        annotator_agreement=agreement,
        removed_record_fraction=(total - len(kept)) / total if total else 0.0,
        kept_sample_count=len({rec.sample_id for rec in kept}),
        kept_problem_count=len({rec.problem_id for rec in kept}),
    )
    return kept, removed_annotators, removed_problems, report


def dump_labeled_examples(path, examples):
    """Serialize as line-delimited {problem_id, sample_id, steps, labels, provenance}."""
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps({
                "problem_id": ex.problem.id,
                "sample_id": ex.sample_id,
                "steps": [s.text for s in ex.trace.steps],
                "labels": [1 if b else 0 for b in ex.labels.labels],
                "provenance": ex.labels.provenance,
            }) + "\n")


def load_labeled_examples(path, problems_by_id=None):
    """Inverse of dump_labeled_examples; problem statements resolved if given."""
    from .traces import parse_trace

    problems_by_id = problems_by_id or {}
    examples = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            trace = parse_trace("\n".join(obj["steps"]))
            problem = problems_by_id.get(obj["problem_id"],
                                         Problem(obj["problem_id"], ""))
            labels = StepLabels(tuple(bool(b) for b in obj["labels"]),
                                obj["provenance"])
            examples.append(LabeledExample(problem, trace, labels,
                                           obj.get("sample_id", "")))
    return examples
