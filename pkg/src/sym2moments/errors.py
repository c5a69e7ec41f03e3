"""Exception hierarchy shared by all modules.

The CLI maps these onto its exit codes: domain/coverage/budget errors are
usage problems (2), precision errors are numeric failures (3).
"""


class Sym2Error(Exception):
    """Base class for all package errors."""


class DomainError(Sym2Error, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class EmptySpaceError(DomainError):
    """The requested cusp space is not available (odd or too small weight)."""


class LengthError(Sym2Error):
    """A q-expansion is too short for the requested Hecke operator."""

    def __init__(self, required: int, available: int):
        super().__init__(f"q-expansion truncation {available} too short; need N >= {required}")
        self.required = required
        self.available = available


class CoverageError(Sym2Error):
    """An eigenvalue was requested beyond the stored coverage."""

    def __init__(self, needed: int, coverage: int, what: str = "lambda"):
        super().__init__(f"{what}: need coverage N >= {needed}, have {coverage}")
        self.needed = needed
        self.coverage = coverage


class PrecisionError(Sym2Error, ArithmeticError):
    """Eigenvalue separation or an accuracy target failed at working precision."""


class BudgetError(Sym2Error):
    """A Dirichlet polynomial support exceeds the configured cap."""

    def __init__(self, bound: float, cap: float):
        super().__init__(f"mollifier support bound {bound:.6g} exceeds cap {cap:.6g}")
        self.bound = bound
        self.cap = cap
