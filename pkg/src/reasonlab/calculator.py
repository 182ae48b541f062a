"""Exact arithmetic evaluator for calculator annotations.

Grammar (standard precedence, left associative):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | '(' expr ')' | number

Numbers are decimal literals; evaluation is exact over rationals so that
declared results like ``14.0`` or ``6.000000000000001`` can be compared
numerically instead of as strings.
"""

import re
from fractions import Fraction

from .errors import DivisionByZero, ParseError

ALLOWED_CHARS = set("0123456789.+-*/() \t")

_TOKEN = re.compile(r"\s*(?:(\d*\.\d+|\d+\.?)|([()+\-*/]))")


def is_allowed_expression(text: str) -> bool:
    """Character whitelist for calculator expressions."""
    return bool(text) and all(c in ALLOWED_CHARS for c in text)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ParseError(f"unexpected input at {pos!r}: {rest[:10]!r}")
        if m.group(1) is not None:
            lit = m.group(1)
            try:
                tokens.append(Fraction(lit if not lit.endswith(".") else lit[:-1]))
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"bad numeric literal {lit!r}") from exc
        else:
            tokens.append(m.group(2))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expr(self):
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.next()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek() in ("*", "/"):
            op = self.next()
            rhs = self.factor()
            if op == "*":
                value = value * rhs
            else:
                if rhs == 0:
                    raise DivisionByZero("division by zero")
                value = value / rhs
        return value

    def factor(self):
        tok = self.peek()
        if tok == "-":
            self.next()
            return -self.factor()
        if tok == "+":
            self.next()
            return self.factor()
        if tok == "(":
            self.next()
            value = self.expr()
            if self.next() != ")":
                raise ParseError("missing closing parenthesis")
            return value
        if isinstance(tok, Fraction):
            self.next()
            return tok
        raise ParseError(f"unexpected token {tok!r}")


def eval_calculator(expression: str) -> Fraction:
    """Evaluate an arithmetic expression exactly.

    Raises ParseError on malformed input and DivisionByZero on zero division.
    """
    if not is_allowed_expression(expression):
        raise ParseError(f"expression outside character whitelist: {expression!r}")
    tokens = _tokenize(expression)
    if not tokens:
        raise ParseError("empty expression")
    parser = _Parser(tokens)
    value = parser.expr()
    if parser.peek() is not None:
        raise ParseError(f"trailing tokens after expression: {parser.peek()!r}")
    return value


def parse_number(literal: str) -> Fraction:
    """Parse a declared numeric result (e.g. '90.00', '.1', '-3') exactly."""
    lit = literal.strip()
    try:
        return Fraction(lit)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad numeric literal {lit!r}") from exc
