"""Exception hierarchy shared across the tutor.

``TutorError`` is the base for every domain error; the CLI maps it to
exit code 2 (data error) while usage problems stay exit code 1.
"""


class TutorError(Exception):
    """Base class for all domain errors raised by this package."""


# --- formula / rule kernel ----------------------------------------------


class ParseError(TutorError):
    def __init__(self, position: int, expected: str):
        self.position = position
        self.expected = expected
        super().__init__(f"parse error at index {position}: expected {expected}")


class TooManyAtoms(TutorError):
    pass


class ArityMismatch(TutorError):
    pass


class NotApplicable(TutorError):
    pass


class RuleNotAvailable(TutorError):
    """The rule exists but is not enabled for this problem."""


# --- proof graph ---------------------------------------------------------


class InvalidProblem(TutorError):
    pass


class UnknownNode(TutorError):
    pass


class ProtectedNode(TutorError):
    pass


class HintAlreadyPresent(TutorError):
    pass


class RedundantHint(HintAlreadyPresent):
    """The hinted statement is already justified (or is the visible goal)."""


class Incomplete(TutorError):
    pass


class MissingStats(TutorError):
    pass


class CompletedAttempt(TutorError):
    """The proof is finished; its state is frozen."""


# --- hint engine ---------------------------------------------------------


class EmptyCorpus(TutorError):
    pass


class NoConvergence(TutorError):
    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"value iteration did not converge after {iterations} iterations "
            f"(residual {residual:g})"
        )


class NoMatch(TutorError):
    pass


class NoHintAvailable(TutorError):
    pass


class AlreadySolved(TutorError):
    pass


class BadSnapshot(TutorError):
    pass


# --- session / event log -------------------------------------------------


class SequenceGap(TutorError):
    pass


class TerminalViolation(SequenceGap):
    """An event arrived for an attempt already closed by a terminal event."""


class WriteFailure(TutorError):
    pass


class CorruptLog(TutorError):
    def __init__(self, seq, reason: str, where: str = ""):
        self.seq = seq
        self.reason = reason
        self.where = where
        loc = f" ({where})" if where else ""
        super().__init__(f"corrupt log at seq {seq}{loc}: {reason}")


class PhaseForbidsHints(TutorError):
    pass


class PhaseForbidsSkip(TutorError):
    pass


# --- simulator -----------------------------------------------------------


class NoExpertScript(TutorError):
    pass


class CorpusTooSparse(TutorError):
    pass


# --- analytics -----------------------------------------------------------


class TooFewStudents(TutorError):
    pass


class DegenerateInput(TutorError):
    pass


class OutOfRange(TutorError):
    pass


# --- service -------------------------------------------------------------


class DuplicateSession(TutorError):
    pass


class UnknownSession(TutorError):
    pass
