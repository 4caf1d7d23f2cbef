"""Exception hierarchy for esslab."""


class EssError(Exception):
    """Base class for all esslab errors."""


class ValidationError(EssError, ValueError):
    """An input failed validation. ``field`` names the offending input."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class MinimizerAtBoundary(EssError):
    """The continuous minimizer of the distance curve lies outside the grid."""

    def __init__(self, n_tilde_continuous, lo, hi):
        self.n_tilde_continuous = n_tilde_continuous
        self.lo = lo
        self.hi = hi
        super().__init__(
            f"continuous minimizer {n_tilde_continuous:.6g} outside grid [{lo}, {hi}]"
        )


class EnumerationCapExceeded(EssError):
    def __init__(self, n, cap):
        self.n = n
        self.cap = cap
        super().__init__(f"n={n} exceeds the exact enumeration cap of {cap}; use Monte Carlo")


class DegenerateVariance(EssError):
    pass


class AllDrawsDegenerate(EssError):
    pass


class UnsupportedFamily(EssError):
    pass


class UnknownScenario(EssError, KeyError):
    def __str__(self):
        return f"unknown scenario id {self.args[0]!r}"


class ColumnMissing(EssError, KeyError):
    def __str__(self):
        return f"column {self.args[0]!r} not found in data"


class DegenerateDesign(EssError):
    pass
