"""Desk-scale arithmetic-chain problems with a programmatic step oracle.

Each problem is a chain "start with a, then apply op b, ...". Reference
traces carry one calculator-annotated step per operation plus a final-answer
line, so step correctness is decidable without a human in the loop.
"""

from dataclasses import dataclass, field
import random
import re

from .datasets import ProblemRecord
from .traces import (
    FINAL_ANSWER_MARKER,
    Problem,
    Step,
    Trace,
    extract_final_answer,
    normalize_answer,
)

OPS = ("+", "-", "*")
_OP_WORDS = {"+": "add", "-": "subtract", "*": "multiply by"}


@dataclass(frozen=True)
class SynthSpec:
    num_problems: int = 500
    chain_length_range: tuple = (3, 6)
    operand_range: tuple = (2, 9)
    seed: int = 0


@dataclass(frozen=True)
class SynthProblem:
    record: ProblemRecord
    start: int
    ops: tuple  # ((op, operand), ...)
    truth: tuple  # running value after each op

    @property
    def problem(self) -> Problem:
        return self.record.problem

    @property
    def final_value(self) -> int:
        return self.truth[-1]


def apply_op(value: int, op: str, operand: int) -> int:
    if op == "+":
        return value + operand
    if op == "-":
        return value - operand
    if op == "*":
        return value * operand
    raise ValueError(f"unknown op {op!r}")


def step_text(prev: int, op: str, operand: int, value: int) -> str:
    expr = f"{prev}{op}{operand}"
    return f"Next, compute {expr}=<<{expr}={value}>>{value}."


def final_step_text(value) -> str:
    return f"{FINAL_ANSWER_MARKER} {value}"


def reference_trace(start: int, ops, truth) -> Trace:
    steps = []
    prev = start
    for (op, operand), value in zip(ops, truth):
        steps.append(Step.from_text(step_text(prev, op, operand, value)))
        prev = value
    steps.append(Step.from_text(final_step_text(truth[-1])))
    return Trace(tuple(steps), str(truth[-1]))


def _statement(start: int, ops) -> str:
    parts = [f"Start with {start}."]
    for op, operand in ops:
        parts.append(f"Then {_OP_WORDS[op]} {operand}.")
    parts.append("What is the final result?")
    return " ".join(parts)


def generate_problems(spec: SynthSpec):
    """Deterministic corpus generation: one chain problem per index."""
    rng = random.Random(spec.seed)
    lo, hi = spec.operand_range
    problems = []
    for i in range(spec.num_problems):
        length = rng.randint(*spec.chain_length_range)
        start = rng.randint(lo, hi * 5)
        ops = []
        value = start
        truth = []
        for _ in range(length):
            op = rng.choice(OPS)
            # keep multiplications small so chains stay readable integers
            operand = rng.randint(2, min(4, hi)) if op == "*" else rng.randint(lo, hi)
            ops.append((op, operand))
            value = apply_op(value, op, operand)
            truth.append(value)
        ops = tuple(ops)
        truth = tuple(truth)
        trace = reference_trace(start, ops, truth)
        problem = Problem(f"synth-{spec.seed}-{i}", _statement(start, ops),
                          str(truth[-1]), trace)
        metadata = {
            "start": str(start),
            "ops": ";".join(f"{op}{operand}" for op, operand in ops),
        }
        problems.append(SynthProblem(ProblemRecord(problem, "synthetic", metadata),
                                     start, ops, truth))
    return problems


def synth_problem_from_record(record: ProblemRecord) -> SynthProblem:
    """Rebuild the hidden chain from a record's metadata."""
    start = int(record.metadata["start"])
    ops = []
    for token in record.metadata["ops"].split(";"):
        ops.append((token[0], int(token[1:])))
    value = start
    truth = []
    for op, operand in ops:
        value = apply_op(value, op, operand)
        truth.append(value)
    return SynthProblem(record, start, tuple(ops), tuple(truth))


_LAST_INT = re.compile(r"-?\d+")


def declared_step_value(step: Step):
    """The intermediate result a step claims, or None if unreadable."""
    if step.calc_annotations:
        declared = step.calc_annotations[-1].declared_result
        try:
            return int(normalize_answer(declared))
        except ValueError:
            return None
    matches = _LAST_INT.findall(step.text)
    return int(matches[-1]) if matches else None


def oracle_first_mistake(problem: SynthProblem, trace: Trace):
    """0-based index of the first step diverging from the true chain; None if clean.

    A final-answer line in the wrong position, an extra step, a wrong declared
    intermediate, or a wrong final answer count as mistakes at the offending
    step. A trace with no final-answer line yet is treated as an incomplete
    prefix: clean prefixes return None, keeping the oracle prefix-consistent.
    """
    n_ops = len(problem.ops)
    expected_final = str(problem.truth[-1])
    for i, step in enumerate(trace.steps):
        if FINAL_ANSWER_MARKER in step.text:
            is_last = i == len(trace.steps) - 1
            final = extract_final_answer(Trace(trace.steps[: i + 1]))
            if i != n_ops or not is_last:
                return i
            if final is None or normalize_answer(final) != expected_final:
                return i
            return None
        if i >= n_ops:
            return i
        if declared_step_value(step) != problem.truth[i]:
            return i
    return None
