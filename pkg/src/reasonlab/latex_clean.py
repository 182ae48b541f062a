"""Regex-based LaTeX cleaning for MATH-style problem text.

The rules run in five fixed phases (simple replacements, text-formatting
strippers, whitespace normalization, math-mode delimiter removal, fraction
conversion), and within each phase in table order. The goal is converting
common math-mode constructs to plain text, not full LaTeX coverage.
"""

from dataclasses import dataclass
import re

from .errors import UnbalancedBraces


@dataclass(frozen=True)
class RegexRule:
    pattern: str
    replacement: str
    phase: str  # simple | text_format | whitespace | math_mode | fraction

    def apply(self, text: str) -> str:
        return re.sub(self.pattern, self.replacement, text)


_TEXT_CMD_ARG = r"\{\s?(\d*\.?\d+|[a-zA-Z\s\,]*)\}"

RULES = [
    # -- simple replacements --
    RegexRule(r"(\\geq|\\ge)", ">=", "simple"),
    RegexRule(r"(\\leq|\\le)", "<=", "simple"),
    RegexRule(r"(\\neq|\\ne)", "!=", "simple"),
    RegexRule(r"\\implies", "->", "simple"),
    RegexRule(r"(\\ldots|\\cdots|\\dots)", "...", "simple"),
    RegexRule(r"\\times", "*", "simple"),
    RegexRule(r"\\rightarrow", "->", "simple"),
    RegexRule(r"\\cdot", "*", "simple"),
    RegexRule(r"\\div", "/", "simple"),
    RegexRule(r"\\pi", "pi", "simple"),
    RegexRule(r"\\quad", "", "simple"),
    # -- remove text formatting --
    RegexRule(r"(\\text|\\textnormal|\\textrm|\\textit|\\textbf)" + _TEXT_CMD_ARG,
              r" \2", "text_format"),
    RegexRule(r"(\\emph|\\mbox|\\mathrm|\\bf|\\small)" + _TEXT_CMD_ARG,
              r" \2", "text_format"),
    # -- remove whitespace --
    RegexRule(r"\s?([*\-+\/])\s?", r"\1", "whitespace"),
    RegexRule(r"\\allowbreak", "", "whitespace"),
    RegexRule(r"\\hspace\{.*\}", "", "whitespace"),
    # -- remove math mode ($$...$$ tried before $...$ via the greedy optional) --
    RegexRule(r"\$\$?([^\$]*)\$\$?", r"\1", "math_mode"),
    RegexRule(r"\\\[([^\$]*)\\\]", r"\1", "math_mode"),
    # -- convert fractions --
    RegexRule(r"(\\frac|\\tfrac|\\dfrac)\{([a-z0-9+-]*)\}\{([a-z0-9+-]*)\}",
              r"\2/\3", "fraction"),
    RegexRule(r"(\\frac|\\tfrac|\\dfrac)([0-9])([0-9])", r"\2/\3", "fraction"),
]

PHASE_ORDER = ["simple", "text_format", "whitespace", "math_mode", "fraction"]


def clean_latex(text: str) -> str:
    """Apply the full rule table in phase order; non-matching text passes through."""
    for phase in PHASE_ORDER:
        for rule in RULES:
            if rule.phase == phase:
                text = rule.apply(text)
    return text


def extract_boxed_answer(solution_text: str) -> str | None:
    """Return the brace-balanced argument of the first \\boxed command.

    Returns None when no \\boxed is present; raises UnbalancedBraces when the
    argument's braces never close.
    """
    m = re.search(r"\\boxed\s*\{", solution_text)
    if m is None:
        return None
    depth = 1
    start = m.end()
    for i in range(start, len(solution_text)):
        c = solution_text[i]
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return solution_text[start:i]
    raise UnbalancedBraces("\\boxed argument never closes")


ASYMPTOTE_MARKER = "[asy"


def has_asymptote(statement: str) -> bool:
    return ASYMPTOTE_MARKER in statement


def filter_asymptote(records):
    """Drop records whose problem statement contains an Asymptote block."""
    return [r for r in records if not has_asymptote(r.problem.statement)]
