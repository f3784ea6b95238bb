"""Exception hierarchy shared by the library and the CLI."""


class FlagCurvError(Exception):
    """Base class for all errors raised by flagcurv."""


class DimensionError(FlagCurvError, ValueError):
    pass


class UndefinedInputError(FlagCurvError, ValueError):
    """Raised for inputs where the quantity is not defined at all (e.g. Y = 0)."""


class PoleError(FlagCurvError, ArithmeticError):
    """Evaluation point sits on (or too close to) a singularity.

    ``s_value`` carries the offending ratio beta/alpha when one is known and
    ``factor`` names the vanishing quantity.
    """

    def __init__(self, message, s_value=None, factor=None):
        super().__init__(message)
        self.s_value = s_value
        self.factor = factor


class DegenerateFlagError(FlagCurvError, ValueError):
    pass


class DegenerateMetricError(FlagCurvError, ArithmeticError):
    pass


class SpaceIOError(FlagCurvError, OSError):
    pass


class SpaceParseError(FlagCurvError, ValueError):
    """Malformed JSON or schema violation in a space descriptor."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
        self.reason = message


class SpaceValidationError(FlagCurvError, ValueError):
    """Descriptor parsed fine but violates a structural invariant."""

    def __init__(self, report):
        failed = [item.name for item in report.errors]
        super().__init__("invariant failure: " + ", ".join(failed))
        self.report = report
        self.invariants = failed


class HypothesisError(FlagCurvError, ValueError):
    """A theorem-specific hypothesis (natural reductivity, H = {e}, ...) fails."""
