"""First-mistake annotation workflow: queueing, qualification, export.

Raters see a problem, its reference solution, and a model solution, and mark
the first step with a major mistake (or no-mistake / ambiguous). New raters
must first pass 3 of 4 gold tasks with known verdicts. A seeded fraction of
real tasks is routed to two raters so agreement can be measured; raters below
the agreement threshold are dropped at export time.

All state changes append to a line-delimited event log; the in-memory state
is a pure fold over that log, so restarting and replaying reproduces the
snapshot byte for byte.
"""

from dataclasses import dataclass, field
import json
import os
import random
import threading

from .errors import (
    AlreadySubmitted,
    IndexOutOfRange,
    NotAssigned,
    UnknownAnnotator,
)
from .labeling import (
    AMBIGUOUS,
    AnnotationRecord,
    LabeledExample,
    Verdict,
    clean_annotations,
    prm_labels_from_annotation,
)
from .metrics import cohens_kappa
from .traces import Problem, parse_trace

PENDING = "pending"
QUALIFIED = "qualified"
REJECTED = "rejected"

GOLD_TASKS_REQUIRED = 4
GOLD_PASS_THRESHOLD = 3

ADJUDICATOR_ID = "adjudicator"


@dataclass
class AnnotationTask:
    task_id: str
    problem_id: str
    statement: str
    reference_steps: list  # rendered reference-solution lines
    steps: list  # model solution step texts, 1-indexed for verdicts
    sample_id: str
    is_gold: bool = False
    gold_verdict: Verdict | None = None
    duplicate: bool = False
    assigned_to: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)  # annotator_id -> Verdict

    @property
    def capacity(self) -> int:
        if self.is_gold:
            return 10**9  # every pending annotator sees each gold task
        return 2 if self.duplicate else 1

    def public_view(self) -> dict:
        """The task as shown to a rater: no gold answer, no other verdicts."""
        return {
            "task_id": self.task_id,
            "problem_id": self.problem_id,
            "statement": self.statement,
            "reference_steps": list(self.reference_steps),
            "steps": list(self.steps),
            "is_gold": self.is_gold,
        }


@dataclass
class AnnotatorProfile:
    annotator_id: str
    state: str = PENDING
    gold_passed: int = 0
    gold_attempted: int = 0
    submitted_count: int = 0

    def to_json(self) -> dict:
        return {
            "annotator_id": self.annotator_id,
            "state": self.state,
            "gold_passed": self.gold_passed,
            "gold_attempted": self.gold_attempted,
            "submitted_count": self.submitted_count,
        }


class AnnotationService:
    """Task queue, qualification gate, and label store over an event log.

    All mutating operations append one event and then apply it; loading a
    service from an existing log replays the same apply function, so derived
    state never depends on anything outside the log.
    """

    def __init__(self, store_dir: str):
        self.store_dir = store_dir
        self.log_path = os.path.join(store_dir, "events.jsonl")
        self._lock = threading.Lock()
        self.tasks: dict[str, AnnotationTask] = {}
        self.task_order: list[str] = []
        self.annotators: dict[str, AnnotatorProfile] = {}
        self.duplicated_sample_ids: set[str] = set()
        os.makedirs(store_dir, exist_ok=True)
        if os.path.exists(self.log_path):
            with open(self.log_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self._apply(json.loads(line))

    # -- event plumbing ------------------------------------------------------

    def _append(self, event: dict):
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
        self._apply(event)

    def _apply(self, event: dict):
        kind = event["event"]
        if kind == "register":
            aid = event["annotator_id"]
            if aid not in self.annotators:
                self.annotators[aid] = AnnotatorProfile(aid)
        elif kind == "enqueue":
            task = AnnotationTask(
                task_id=event["task_id"],
                problem_id=event["problem_id"],
                statement=event["statement"],
                reference_steps=list(event["reference_steps"]),
                steps=list(event["steps"]),
                sample_id=event["sample_id"],
                is_gold=event["is_gold"],
                gold_verdict=(Verdict.from_json(event["gold_verdict"])
                              if event.get("gold_verdict") else None),
                duplicate=event["duplicate"],
            )
            self.tasks[task.task_id] = task
            self.task_order.append(task.task_id)
            if task.duplicate:
                self.duplicated_sample_ids.add(task.sample_id)
        elif kind == "assign":
            self.tasks[event["task_id"]].assigned_to.append(event["annotator_id"])
        elif kind == "verdict":
            task = self.tasks[event["task_id"]]
            verdict = Verdict.from_json(event["verdict"])
            task.verdicts[event["annotator_id"]] = verdict
            profile = self.annotators[event["annotator_id"]]
            profile.submitted_count += 1
            if task.is_gold and profile.state == PENDING:
                profile.gold_attempted += 1
                if verdict == task.gold_verdict:
                    profile.gold_passed += 1
                if profile.gold_attempted >= GOLD_TASKS_REQUIRED:
                    profile.state = (QUALIFIED
                                     if profile.gold_passed >= GOLD_PASS_THRESHOLD
                                     else REJECTED)
        elif kind == "adjudicate":
            task = self.tasks[event["task_id"]]
            task.verdicts[ADJUDICATOR_ID] = Verdict.from_json(event["verdict"])
        else:
            raise ValueError(f"unknown event {kind!r}")

    # -- operations ----------------------------------------------------------

    def register_annotator(self, annotator_id: str) -> AnnotatorProfile:
        with self._lock:
            self._append({"event": "register", "annotator_id": annotator_id})
            return self.annotators[annotator_id]

    def enqueue_gold(self, samples_with_verdicts):
        """Gold tasks: (problem, trace, authoritative Verdict) triples."""
        ids = []
        with self._lock:
            for problem, trace, verdict in samples_with_verdicts:
                task_id = f"gold-{len(self.task_order)}"
                self._append(self._enqueue_event(task_id, problem, trace,
                                                 sample_id=task_id, is_gold=True,
                                                 gold_verdict=verdict,
                                                 duplicate=False))
                ids.append(task_id)
        return ids

    def enqueue_batch(self, samples, duplicate_fraction: float = 0.2,
                      seed: int = 0):
        """Queue (problem, trace) samples; a seeded fraction gets two raters."""
        if not 0.0 <= duplicate_fraction <= 1.0:
            raise ValueError("duplicate_fraction must be in [0, 1]")
        rng = random.Random(seed)
        n_dup = round(len(samples) * duplicate_fraction)
        dup_indices = set(rng.sample(range(len(samples)), n_dup))
        ids = []
        with self._lock:
            for i, (problem, trace) in enumerate(samples):
                task_id = f"task-{len(self.task_order)}"
                self._append(self._enqueue_event(
                    task_id, problem, trace,
                    sample_id=f"{problem.id}#{task_id}", is_gold=False,
                    gold_verdict=None, duplicate=i in dup_indices))
                ids.append(task_id)
        return ids

    @staticmethod
    def _enqueue_event(task_id, problem: Problem, trace, *, sample_id,
                       is_gold, gold_verdict, duplicate) -> dict:
        reference = problem.reference_trace
        return {
            "event": "enqueue",
            "task_id": task_id,
            "problem_id": problem.id,
            "statement": problem.statement,
            "reference_steps": [s.text for s in reference.steps] if reference else [],
            "steps": [s.text for s in trace.steps],
            "sample_id": sample_id,
            "is_gold": is_gold,
            "gold_verdict": gold_verdict.to_json() if gold_verdict else None,
            "duplicate": duplicate,
        }

    def next_task(self, annotator_id: str) -> AnnotationTask | None:
        """Assign and return the next task for this rater, or None.

        Pending raters work through gold tasks; qualified raters get the first
        real task with a free slot they have not touched; rejected raters get
        nothing. Assignment is atomic and logged.
        """
        with self._lock:
            profile = self._profile(annotator_id)
            if profile.state == REJECTED:
                return None
            want_gold = profile.state == PENDING
            for task_id in self.task_order:
                task = self.tasks[task_id]
                if task.is_gold != want_gold:
                    continue
                if annotator_id in task.assigned_to:
                    continue
                if len(task.assigned_to) >= task.capacity:
                    continue
                self._append({"event": "assign", "task_id": task_id,
                              "annotator_id": annotator_id})
                return task
            return None

    def submit_verdict(self, task_id: str, annotator_id: str,
                       verdict: Verdict) -> AnnotatorProfile:
        with self._lock:
            profile = self._profile(annotator_id)
            task = self.tasks.get(task_id)
            if task is None or annotator_id not in task.assigned_to:
                raise NotAssigned(f"task {task_id!r} is not assigned to "
                                  f"{annotator_id!r}")
            if annotator_id in task.verdicts:
                raise AlreadySubmitted(f"{annotator_id!r} already labeled "
                                       f"{task_id!r}")
            if verdict.kind == "first_mistake" and verdict.index > len(task.steps):
                raise IndexOutOfRange(
                    f"step {verdict.index} beyond the {len(task.steps)}-step "
                    "solution")
            self._append({"event": "verdict", "task_id": task_id,
                          "annotator_id": annotator_id,
                          "verdict": verdict.to_json()})
            return profile

    def adjudicate(self, task_id: str, verdict: Verdict):
        """Privileged reviewer verdict that overrides rater disagreement."""
        with self._lock:
            if task_id not in self.tasks:
                raise NotAssigned(f"unknown task {task_id!r}")
            self._append({"event": "adjudicate", "task_id": task_id,
                          "verdict": verdict.to_json()})

    def _profile(self, annotator_id: str) -> AnnotatorProfile:
        profile = self.annotators.get(annotator_id)
        if profile is None:
            raise UnknownAnnotator(f"unregistered annotator {annotator_id!r}")
        return profile

    # -- derived views -------------------------------------------------------

    def records(self):
        """All non-gold rater verdicts as AnnotationRecords (adjudications excluded)."""
        out = []
        for task_id in self.task_order:
            task = self.tasks[task_id]
            if task.is_gold:
                continue
            for annotator_id, verdict in sorted(task.verdicts.items()):
                if annotator_id == ADJUDICATOR_ID:
                    continue
                out.append(AnnotationRecord(task.problem_id, task.sample_id,
                                            annotator_id, verdict))
        return out

    def agreement_stats(self) -> dict:
        """Per-annotator duplicate agreement, Cohen's kappa, and counts."""
        pairs_a, pairs_b = [], []
        for task_id in self.task_order:
            task = self.tasks[task_id]
            if task.is_gold or not task.duplicate:
                continue
            verdicts = [v for a, v in sorted(task.verdicts.items())
                        if a != ADJUDICATOR_ID]
            if len(verdicts) == 2:
                pairs_a.append((verdicts[0].kind, verdicts[0].index))
                pairs_b.append((verdicts[1].kind, verdicts[1].index))
        _, _, _, report = clean_annotations(self.records(),
                                            self.duplicated_sample_ids)
        kappa = cohens_kappa(pairs_a, pairs_b) if pairs_a else None
        return {
            "annotator_agreement": report.annotator_agreement,
            "cohens_kappa": kappa,
            "duplicate_pairs": len(pairs_a),
            "annotators": {aid: p.to_json()
                           for aid, p in sorted(self.annotators.items())},
        }

    def export_prm_dataset(self, agreement_threshold: float = 0.75):
        """Cleaned first-mistake labels ready for reward-model training.

        Returns (labeled examples, cleaning report dict). Adjudicated tasks
        export the reviewer's verdict instead of the raters'.
        """
        records = self.records()
        kept, removed_annotators, removed_problems, report = clean_annotations(
            records, self.duplicated_sample_ids, agreement_threshold)

        adjudicated = {}
        for task_id in self.task_order:
            task = self.tasks[task_id]
            if not task.is_gold and ADJUDICATOR_ID in task.verdicts:
                adjudicated[task.sample_id] = task.verdicts[ADJUDICATOR_ID]

        by_sample = {}
        for task_id in self.task_order:
            task = self.tasks[task_id]
            if not task.is_gold:
                by_sample[task.sample_id] = task

        examples = []
        emitted_adjudications = set()
        for rec in kept:
            task = by_sample[rec.sample_id]
            verdict = rec.verdict
            if rec.sample_id in adjudicated:
                if rec.sample_id in emitted_adjudications:
                    continue
                verdict = adjudicated[rec.sample_id]
                if verdict.kind == AMBIGUOUS:
                    continue
                emitted_adjudications.add(rec.sample_id)
            trace = parse_trace("\n".join(task.steps))
            problem = Problem(task.problem_id, task.statement)
            examples.append(LabeledExample(
                problem, trace, prm_labels_from_annotation(trace, verdict),
                sample_id=rec.sample_id))

        stats = self.agreement_stats()
        return examples, {
            "removed_annotator_ids": removed_annotators,
            "removed_problem_ids": removed_problems,
            "annotator_agreement": report.annotator_agreement,
            "removed_record_fraction": report.removed_record_fraction,
            "kept_sample_count": report.kept_sample_count,
            "kept_problem_count": report.kept_problem_count,
            "cohens_kappa": stats["cohens_kappa"],
            "example_count": len(examples),
        }

    def snapshot(self) -> dict:
        """Deterministic full-state view; equal across restarts of one log."""
        tasks = {}
        for task_id in self.task_order:
            task = self.tasks[task_id]
            tasks[task_id] = {
                "problem_id": task.problem_id,
                "statement": task.statement,
                "reference_steps": list(task.reference_steps),
                "steps": list(task.steps),
                "sample_id": task.sample_id,
                "is_gold": task.is_gold,
                "gold_verdict": (task.gold_verdict.to_json()
                                 if task.gold_verdict else None),
                "duplicate": task.duplicate,
                "assigned_to": list(task.assigned_to),
                "verdicts": {a: v.to_json()
                             for a, v in sorted(task.verdicts.items())},
            }
        return {
            "task_order": list(self.task_order),
            "tasks": tasks,
            "annotators": {aid: p.to_json()
                           for aid, p in sorted(self.annotators.items())},
        }

    def snapshot_bytes(self) -> bytes:
        return json.dumps(self.snapshot(), sort_keys=True).encode()
