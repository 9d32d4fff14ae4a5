"""
errors.py - Exception types raised across quadricgon.

Two families:
- ParameterError and its subclasses: the caller asked for something outside the
  supported range (the CLI maps these to exit status 2).
- Everything else under QuadricError: a mathematical check failed on an
  otherwise valid request (exit status 1).
"""


class QuadricError(ValueError):
    """Root of every error raised by the package."""


class ParameterError(QuadricError):
    pass


class CollidingSupportsError(ParameterError):
    def __init__(self, message="colliding supports"):
        super().__init__(message)


class SearchCapError(ParameterError):
    def __init__(self, count, cap):
        super().__init__(f"search cap exceeded: {count} points > cap {cap}")
        self.count = count
        self.cap = cap


class PreconditionError(ParameterError):
    pass


class HypothesisError(ParameterError):
    """Lemma hypotheses do not hold; `clauses` lists the violated ones."""

    def __init__(self, message, clauses=()):
        detail = f"{message}: {', '.join(clauses)}" if clauses else message
        super().__init__(detail)
        self.clauses = list(clauses)


class EmptySystemError(QuadricError):
    pass


class NotIncidentError(QuadricError):
    def __init__(self, message="not incident"):
        super().__init__(message)


class GeneralPositionError(QuadricError):
    def __init__(self, message="could not realize general position"):
        super().__init__(message)


class SpecialConfigurationError(QuadricError):
    def __init__(self, message="special node configuration"):
        super().__init__(message)


class DegenerateWitnessError(QuadricError):
    def __init__(self, message="degenerate witness point"):
        super().__init__(message)


class CertificateInvariantError(QuadricError):
    pass
