"""Exception classes raised across the package."""


class DocsatError(Exception):
    pass


# formula construction / search state
class FormulaError(DocsatError, ValueError):
    pass


class OutOfRangeVariable(FormulaError):
    pass


class RepeatedVariableInClause(FormulaError):
    pass


class WrongClauseArity(FormulaError):
    pass


class LengthMismatch(FormulaError):
    pass


# DIMACS parsing
class DimacsError(DocsatError, ValueError):
    def __init__(self, msg, line=None):
        self.line = line
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)


class MissingHeader(DimacsError):
    pass


class MalformedHeader(DimacsError):
    pass


class LiteralOutOfRange(DimacsError):
    pass


class UnterminatedClause(DimacsError):
    pass


class ClauseCountMismatch(DimacsError):
    pass


class NonTernaryClause(DimacsError):
    pass


# search
class ClauseNotUnsat(DocsatError, ValueError):
    pass


# instance generation
class InvalidConfig(DocsatError, ValueError):
    pass


class OracleLimitExceeded(DocsatError):
    pass


class ResampleBudgetExhausted(DocsatError):
    pass


# oracle
class LimitExceeded(DocsatError):
    pass


class BudgetExceeded(DocsatError):
    pass


# statistics
class EmptyInput(DocsatError, ValueError):
    pass


class InsufficientPoints(DocsatError, ValueError):
    pass


class NonpositiveProbability(DocsatError, ValueError):
    pass


class NoNonrandomFlips(DocsatError, ValueError):
    pass
