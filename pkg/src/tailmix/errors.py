"""Exception and warning types raised across tailmix."""


class TailmixError(Exception):
    """Base class for all tailmix errors."""


class SchemaError(TailmixError):
    """Input file lacks a required column."""


class DataError(TailmixError):
    """Input row cannot be parsed or holds a non-finite outcome."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class EmptyInputError(TailmixError):
    """Input holds no data rows."""


class PartitionError(TailmixError):
    """Label sets are empty, unknown, overlapping or fail to cover the support."""


class TuningError(TailmixError):
    """Cut counts are infeasible for the subsample size."""


class SampleSizeError(TailmixError):
    """A subsample is smaller than the configured minimum."""


class WeightError(TailmixError):
    """A weight function returned non-finite values."""


class DesignError(TailmixError):
    """Simulation design parameters are invalid."""


class DegenerateError(TailmixError):
    """Base for numerically degenerate estimation problems."""


class DegenerateTailError(DegenerateError):
    """A tail-ratio denominator is zero."""


class DegenerateDenominatorError(DegenerateError):
    """The two tail ratios coincide, so the mixing proportion is not identified."""


class DegenerateWeightError(DegenerateError):
    """A tail ratio equals one, so the component weight 1/(1 - zeta) blows up."""


class DegenerateVarianceError(DegenerateError):
    """The plug-in variance of the test statistic is not positive."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DominanceError(TailmixError):
    """Tail indices violate the required dominance ordering."""


class TieWarning(UserWarning):
    """Tied outcomes at an order-statistic cut."""


class ZeroTailWarning(UserWarning):
    """A tail ratio numerator is empty beyond the cut."""
