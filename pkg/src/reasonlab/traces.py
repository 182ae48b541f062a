"""Canonical reasoning-trace representation.

Serialized form: UTF-8 text, one step per line, inline calculator spans
``<<expr=result>>``, and a final line of the form ``Final answer: <text>``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import re

from . import calculator
from .calculator import eval_calculator, is_allowed_expression, parse_number
from .errors import ParseError

FINAL_ANSWER_MARKER = "Final answer:"

_CALC_SPAN = re.compile(r"<<([^<>]*?)=([^<>=]*?)>>")


@dataclass(frozen=True)
class CalcAnnotation:
    expression: str
    declared_result: str
    span: tuple  # (start, end) character offsets within the step text


@dataclass(frozen=True)
class Step:
    text: str
    calc_annotations: tuple = ()
    has_malformed_calc: bool = False

    @staticmethod
    def from_text(text: str) -> "Step":
        if "\n" in text:
            raise ValueError("step text must be a single line")
        annotations = []
        for m in _CALC_SPAN.finditer(text):
            annotations.append(
                CalcAnnotation(m.group(1), m.group(2), (m.start(), m.end()))
            )
        # A '<<' without a matching well-formed span is kept as plain text.
        stripped = _CALC_SPAN.sub("", text)
        malformed = "<<" in stripped or ">>" in stripped
        return Step(text, tuple(annotations), malformed)


@dataclass(frozen=True)
class Trace:
    steps: tuple = ()
    final_answer: str | None = None

    @property
    def step_texts(self):
        return [s.text for s in self.steps]


@dataclass(frozen=True)
class Problem:
    id: str
    statement: str
    reference_final: str | None = None
    reference_trace: "Trace | None" = None


def parse_trace(text: str) -> Trace:
    """Parse newline-separated steps; a total function.

    Empty lines become empty steps (they occur in real samples and can be
    annotated as mistakes). The final answer is extracted from the last line
    when it carries the marker. The empty string parses to an empty trace.
    """
    if text == "":
        return Trace()
    steps = tuple(Step.from_text(line) for line in text.split("\n"))
    return Trace(steps, _final_from_last_step(steps[-1].text))


def render_trace(t: Trace) -> str:
    """Inverse of parse_trace: one step per line, no trailing newline."""
    return "\n".join(s.text for s in t.steps)


def _final_from_last_step(text: str) -> str | None:
    idx = text.find(FINAL_ANSWER_MARKER)
    if idx < 0:
        return None
    return text[idx + len(FINAL_ANSWER_MARKER):].strip()


def extract_final_answer(t: Trace) -> str | None:
    """Text after 'Final answer:' on the last step, trimmed; None if absent."""
    if not t.steps:
        return None
    return _final_from_last_step(t.steps[-1].text)


def normalize_answer(text: str) -> str:
    """Trim, and collapse integer-valued decimals ('14.0', '90.00') to '14', '90'.

    Strictly more permissive than plain exact matching; model samples emit
    float-formatted integers inside otherwise-integer answers.
    """
    trimmed = text.strip()
    try:
        value = Fraction(trimmed)
    except (ValueError, ZeroDivisionError):
        return trimmed
    if value.denominator == 1:
        return str(value.numerator)
    return trimmed


def final_answer_match(a: str | None, b: str | None) -> bool:
    """Exact string matching after normalization; None never matches."""
    if a is None or b is None:
        return False
    return normalize_answer(a) == normalize_answer(b)


@dataclass(frozen=True)
class CalcMismatch:
    step_index: int
    annotation_index: int
    expression: str
    declared: str
    computed: "Fraction | None"  # None when the expression failed to parse
    parse_failed: bool = False


def verify_calc_annotations(t: Trace, tolerance: float = 1e-9):
    """Check each <<expr=result>> span numerically.

    A mismatch is reported iff |computed - declared| exceeds the relative
    tolerance. Unparseable expressions or declared results are reported as
    mismatches with parse_failed set.
    """
    mismatches = []
    for si, step in enumerate(t.steps):
        for ai, ann in enumerate(step.calc_annotations):
            try:
                computed = eval_calculator(ann.expression)
                declared = parse_number(ann.declared_result)
            except ParseError:
                mismatches.append(
                    CalcMismatch(si, ai, ann.expression, ann.declared_result,
                                 None, parse_failed=True)
                )
                continue
            scale = max(1, abs(declared))
            if abs(computed - declared) > Fraction(tolerance) * scale:
                mismatches.append(
                    CalcMismatch(si, ai, ann.expression, ann.declared_result, computed)
                )
    return mismatches


__all__ = [
    "CalcAnnotation",
    "CalcMismatch",
    "FINAL_ANSWER_MARKER",
    "Problem",
    "Step",
    "Trace",
    "calculator",
    "eval_calculator",
    "extract_final_answer",
    "final_answer_match",
    "is_allowed_expression",
    "normalize_answer",
    "parse_trace",
    "render_trace",
    "verify_calc_annotations",
]
