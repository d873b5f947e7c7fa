"""Error categories shared by every module.

Each category carries the exit status the command-line surface reports for it.
"""


class LabError(Exception):
    """Base class for every failure raised on purpose by gclab."""

    category = "runtime"
    exit_code = 5


class ConfigError(LabError):
    """The experiment document could not be parsed."""

    category = "config_parse"
    exit_code = 2


class InvalidInputError(LabError, ValueError):
    """A precondition or invariant of an operation does not hold."""

    category = "validation"
    exit_code = 3


class InsufficientDataError(InvalidInputError):
    """The path is too short for the requested estimate."""

    category = "insufficient_data"


class FeasibilityError(LabError):
    """The exact computation would exceed its enumeration cap."""

    category = "feasibility"
    exit_code = 4


class NumericError(LabError):
    category = "numeric"
    exit_code = 5


class FitUndefinedError(NumericError):
    """Not enough strictly positive values to fit a decay law."""

    category = "fit_undefined"


def exit_code_for(exc: BaseException) -> int:
    """Maps an exception to the CLI exit status.

    Pydantic validation errors are ValueErrors and fall in the validation
    category together with InvalidInputError.
    """
    if isinstance(exc, LabError):
        return exc.exit_code
    if isinstance(exc, ValueError):
        return InvalidInputError.exit_code
    return NumericError.exit_code


def category_for(exc: BaseException) -> str:
    if isinstance(exc, LabError):
        return exc.category
    if isinstance(exc, ValueError):
        return InvalidInputError.category
    return NumericError.category
