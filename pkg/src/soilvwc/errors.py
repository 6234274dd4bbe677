"""Exception hierarchy shared across the package.

Every error raised by library code derives from SoilVwcError so the CLI
can map failures onto its stable exit-code contract.
"""


class SoilVwcError(Exception):
    """Base class for all soilvwc errors."""


class ConfigError(SoilVwcError):
    """Bad configuration file, unknown key, or invalid CLI argument."""


class DataError(SoilVwcError):
    """Malformed or out-of-contract input data."""


class MalformedRow(DataError):
    def __init__(self, line_number, detail=""):
        self.line_number = line_number
        super().__init__(f"malformed row at line {line_number}: {detail}")


class UnknownColumn(DataError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown column: {name!r}")


class NonMonotoneTimestamp(DataError):
    def __init__(self, line_number):
        self.line_number = line_number
        super().__init__(f"timestamp not strictly increasing at line {line_number}")


class RangeViolation(DataError):
    def __init__(self, column, value):
        self.column = column
        self.value = value
        super().__init__(f"value {value!r} out of range for column {column!r}")


class MissingTarget(DataError):
    def __init__(self, row_index):
        self.row_index = row_index
        super().__init__(f"record {row_index} has no vwc_true value")


class BadK(DataError):
    def __init__(self, k, n):
        self.k = k
        self.n = n
        super().__init__(f"cannot split {n} records into {k} folds (need 2 <= k <= n)")


class EmptyMatrix(DataError):
    def __init__(self, detail="need at least 2 rows"):
        super().__init__(detail)


class NonPhysical(SoilVwcError):
    """Physically impossible quantity (e.g. permittivity below air)."""


class OutOfRange(SoilVwcError):
    def __init__(self, value, lo, hi, what="value"):
        self.value = value
        super().__init__(f"{what} {value!r} outside [{lo}, {hi}]")


class NoQuiescentWindow(SoilVwcError):
    """No post-rain window with a flat enough VWC slope was found."""


class LengthMismatch(SoilVwcError):
    def __init__(self, n1, n2):
        super().__init__(f"length mismatch: {n1} vs {n2}")


class EmptyInput(SoilVwcError):
    pass


class DimensionMismatch(SoilVwcError):
    pass


class FamilyMismatch(SoilVwcError):
    pass


class BatchTooSmall(SoilVwcError):
    pass


class TooFewRows(SoilVwcError):
    pass


class TrainingError(SoilVwcError):
    """Model fitting failed."""


class NotConverged(TrainingError):
    """SVR optimizer hit its iteration budget.

    Carries the best model found so far plus the residual KKT violation.
    """

    def __init__(self, model, violation):
        self.model = model
        self.violation = violation
        super().__init__(f"SVR did not converge; residual KKT violation {violation:.3e}")
