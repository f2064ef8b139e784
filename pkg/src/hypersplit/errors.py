"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for bad input, 3 for an exceeded enumeration budget, 4 for a failed
hypothesis, and 1 for a theorem violation (a counterexample).
"""

from __future__ import annotations


class HypersplitError(Exception):
    exit_code = 2


# input validation

class InvalidModulus(HypersplitError, ValueError):
    pass


class GroupMismatch(HypersplitError, ValueError):
    pass


class IllDefinedHom(HypersplitError, ValueError):
    pass


class EmptyInput(HypersplitError, ValueError):
    pass


class NotAHyperplane(HypersplitError, ValueError):
    pass


class BadInflation(HypersplitError, ValueError):
    pass


class BadSupport(HypersplitError, ValueError):
    pass


class BadLens(HypersplitError, ValueError):
    pass


class BadCharacter(HypersplitError, ValueError):
    pass


class NonIntegralSignature(HypersplitError, ValueError):
    pass


class EnumerationBudgetExceeded(HypersplitError):
    exit_code = 3


# failed hypotheses of an operation

class HypothesisFailure(HypersplitError):
    exit_code = 4


class NotInZeroLocus(HypothesisFailure):
    pass


class NotZ0Hyperplane(HypothesisFailure):
    pass


class UnionMismatch(HypothesisFailure):
    pass


class EmptyPreimage(HypothesisFailure):
    pass


class NotIso(HypothesisFailure):
    pass


class NotZPreserving(HypothesisFailure):
    pass


class NotSignaturePreserving(HypothesisFailure):
    pass


class CancellationFails(HypothesisFailure):
    pass


class TheoremViolation(HypersplitError):
    """A proven statement failed on concrete input. Never expected to fire."""

    exit_code = 1


class ClassificationFailure(TheoremViolation):
    pass
