"""Exception hierarchy shared by all cycfit modules.

Every error that the CLI maps to an exit code lives here; EXIT_CODES at the
bottom is the single source of truth for that mapping.
"""


class CycfitError(Exception):
    """Base class for all package errors."""


class NotPrime(CycfitError):
    pass


class BudgetExceeded(CycfitError):
    """A field or expansion would exceed the configured size budget."""


class OrderNotDividing(CycfitError):
    pass


class ZeroElement(CycfitError):
    pass


class BadDecomposition(CycfitError):
    pass


class MixedAmbient(CycfitError):
    pass


class InsufficientPrecision(CycfitError):
    pass


class Ramified(CycfitError):
    pass


class SplitP(CycfitError):
    pass


class DegreeDivisible(CycfitError):
    pass


class BudgetExhausted(CycfitError):
    """A bounded search ran out of candidates; retry with a larger budget."""


class ConductorClash(CycfitError):
    pass


class NotSplit(CycfitError):
    pass


class DividesAux(CycfitError):
    pass


class NotDividing(CycfitError):
    pass


class MissingWeight(CycfitError):
    pass


class NotWellOrdered(CycfitError):
    pass


class ReductionFailure(CycfitError):
    pass


class PrecisionTooLow(CycfitError):
    pass


class SchemaViolation(CycfitError):
    pass


class InconsistentField(CycfitError):
    pass


# CLI exit codes: 0 = all MATCH/PASS, 2 = INCONCLUSIVE present,
# 3 = BUG-class failure, 4+ = input/validation errors.
EXIT_CODES = {
    Ramified: 4,
    SplitP: 5,
    DegreeDivisible: 6,
    NotPrime: 7,
    SchemaViolation: 8,
    InconsistentField: 9,
    BudgetExhausted: 10,
    BudgetExceeded: 11,
    InsufficientPrecision: 12,
    PrecisionTooLow: 13,
    OrderNotDividing: 14,
    NotSplit: 15,
    CycfitError: 19,
}


def exit_code_for(exc: BaseException) -> int:
    for klass in type(exc).__mro__:
        if klass in EXIT_CODES:
            return EXIT_CODES[klass]
    return 1
