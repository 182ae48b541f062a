"""Shared exception types."""


class ReasonLabError(Exception):
    """Base class for all package errors."""


class ParseError(ReasonLabError):
    pass


class DivisionByZero(ReasonLabError):
    pass


class UnbalancedBraces(ReasonLabError):
    pass


class IoError(ReasonLabError):
    pass


class MalformedRecord(ReasonLabError):
    def __init__(self, line_number, message=""):
        self.line_number = line_number
        super().__init__(f"malformed record at line {line_number}: {message}")


class InvalidSplit(ReasonLabError):
    pass


class PolicyUnavailable(ReasonLabError):
    pass


class InvalidRequest(ReasonLabError):
    pass


class EmptyDataset(ReasonLabError):
    pass


class AmbiguousVerdict(ReasonLabError):
    pass


class EmptyEval(ReasonLabError):
    pass


class NoEligibleOutcomes(ReasonLabError):
    pass


class KeyMismatch(ReasonLabError):
    pass


class LengthMismatch(ReasonLabError):
    pass


class AllSamplesAnswerless(ReasonLabError):
    pass


class EmptySamples(ReasonLabError):
    pass


class UnknownAnnotator(ReasonLabError):
    pass


class NotAssigned(ReasonLabError):
    pass


class IndexOutOfRange(ReasonLabError):
    pass


class AlreadySubmitted(ReasonLabError):
    pass
