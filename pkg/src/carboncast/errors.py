"""Exception types shared across the toolkit."""


class CarboncastError(Exception):
    """Base class for all toolkit errors."""


# --- kernels ---------------------------------------------------------------

class EmptyData(CarboncastError):
    """A feature matrix with zero rows or zero columns was supplied."""


class ZeroVariance(CarboncastError):
    """Variance-scaled gamma was requested on a constant feature matrix."""


class DimensionMismatch(CarboncastError):
    """Vectors or matrices disagree on feature dimension."""


# --- solvers / models ------------------------------------------------------

class NotConverged(CarboncastError):
    """An iterative solver exhausted its budget before reaching tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class DegenerateData(CarboncastError):
    """Training data cannot support the requested model."""


class SingleClass(CarboncastError):
    """Classifier training requires both labels to be present."""


class IllPosed(CarboncastError):
    """Least-squares fit with fewer samples than expanded features."""


# --- model selection -------------------------------------------------------

class BadFoldCount(CarboncastError):
    """Fold count outside 2..n."""


class FoldTooSmall(CarboncastError):
    """A cross-validation training split has fewer than two rows."""


# --- series / files --------------------------------------------------------

class ParseError(CarboncastError):
    """Malformed input file; carries the 1-based line (and column) position."""

    def __init__(self, message, line, column=None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{message} ({where})")
        self.line = line
        self.column = column


class DuplicateYear(ParseError):
    """The same year appears twice in one series file."""


class NonFinite(ParseError):
    """A series value parsed to NaN or infinity."""


# --- model-string notation -------------------------------------------------

class NotationError(CarboncastError):
    """Base for model-string parsing failures."""


class NotationSyntaxError(NotationError):
    """Structural defect in a model string; carries the 0-based position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (position {position})")
        self.position = position


class UnknownKey(NotationError):
    """Model string uses a key outside the documented set."""


class BadValue(NotationError):
    """Model string value fails validation (wrong type or out of range)."""


# --- pipeline --------------------------------------------------------------

class TooFewPoints(CarboncastError):
    """Factor forecasting needs at least three observed points."""


class TargetInsidePast(CarboncastError):
    """A scenario target year does not lie beyond the observed range."""


class YearGap(CarboncastError):
    """Design-matrix assembly found missing (factor, year) pairs."""

    def __init__(self, missing):
        self.missing = list(missing)
        pairs = ", ".join(f"({name}, {year})" for name, year in self.missing)
        super().__init__(f"missing factor years: {pairs}")
