"""Problem-file ingestion and validation splitting.

Input files are line-delimited JSON records with ``question`` and ``answer``
string fields. GSM8K-style answers mark the final answer with a ``#### x``
delimiter; the loader rewrites that to the canonical ``Final answer: x`` line
so every downstream consumer sees one trace format.
"""

from dataclasses import dataclass, field
import json
import random

from .errors import InvalidSplit, IoError, MalformedRecord
from .latex_clean import clean_latex, extract_boxed_answer, filter_asymptote
from .traces import (
    FINAL_ANSWER_MARKER,
    Problem,
    extract_final_answer,
    parse_trace,
)

GSM8K_DELIMITER = "####"

SOURCES = ("gsm8k_like", "math_prealgebra", "synthetic")


@dataclass(frozen=True)
class ProblemRecord:
    problem: Problem
    source: str = "gsm8k_like"
    metadata: dict = field(default_factory=dict)


def _gsm8k_answer_to_trace_text(answer: str) -> str:
    """Rewrite the '#### x' delimiter into a 'Final answer: x' last line."""
    if GSM8K_DELIMITER not in answer:
        return answer
    body, _, final = answer.rpartition(GSM8K_DELIMITER)
    lines = [ln for ln in body.rstrip("\n").split("\n")]
    while lines and lines[-1].strip() == "":
        lines.pop()
    lines.append(f"{FINAL_ANSWER_MARKER} {final.strip()}")
    return "\n".join(lines)


def record_from_fields(question: str, answer: str, source: str, rec_id: str,
                       metadata=None) -> ProblemRecord:
    metadata = dict(metadata or {})
    if source == "gsm8k_like":
        trace = parse_trace(_gsm8k_answer_to_trace_text(answer))
        problem = Problem(rec_id, question, extract_final_answer(trace), trace)
    elif source == "synthetic":
        trace = parse_trace(answer)
        problem = Problem(rec_id, question, extract_final_answer(trace), trace)
    elif source == "math_prealgebra":
        final = extract_boxed_answer(answer)
        problem = Problem(rec_id, question, final, None)
        metadata.setdefault("solution", answer)
    else:
        raise ValueError(f"unknown source {source!r}")
    return ProblemRecord(problem, source, metadata)


def load_problem_file(path, source: str = "gsm8k_like"):
    """Load line-delimited {question, answer} records into ProblemRecords."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            question = obj["question"]
            answer = obj["answer"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise MalformedRecord(lineno, str(exc)) from exc
        rec_id = str(obj.get("id", f"{source}-{lineno}"))
        records.append(record_from_fields(question, answer, source, rec_id,
                                          obj.get("metadata")))
    return records


def save_problem_file(path, records):
    """Write records back as line-delimited JSON with a final_answer field."""
    from .traces import render_trace

    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj = {
                "id": rec.problem.id,
                "question": rec.problem.statement,
                "answer": (render_trace(rec.problem.reference_trace)
                           if rec.problem.reference_trace is not None
                           else rec.metadata.get("solution", "")),
                "final_answer": rec.problem.reference_final,
            }
            if rec.metadata:
                obj["metadata"] = rec.metadata
            fh.write(json.dumps(obj) + "\n")


def split_validation(records, n: int, seed: int):
    """Deterministic disjoint (train, validation) split with |validation| = n."""
    if n > len(records):
        raise InvalidSplit(f"validation size {n} exceeds {len(records)} records")
    rng = random.Random(seed)
    indices = list(range(len(records)))
    rng.shuffle(indices)
    val_idx = set(indices[:n])
    train = [r for i, r in enumerate(records) if i not in val_idx]
    validation = [r for i, r in enumerate(records) if i in val_idx]
    return train, validation


def clean_math_records(records):
    """Appendix-style MATH cleaning: drop diagram problems, clean LaTeX text."""
    kept = filter_asymptote(records)
    cleaned = []
    for rec in kept:
        solution = rec.metadata.get("solution", "")
        final = rec.problem.reference_final
        problem = Problem(
            rec.problem.id,
            clean_latex(rec.problem.statement),
            clean_latex(final) if final is not None else None,
        )
        meta = dict(rec.metadata)
        meta["solution"] = clean_latex(solution)
        cleaned.append(ProblemRecord(problem, rec.source, meta))
    return cleaned
