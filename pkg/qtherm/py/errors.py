"""
Exception hierarchy for qtherm.

Library code raises these; only the CLI turns them into exit codes.
Used by: every module under qtherm.py, qtherm.cli, qtherm.commands
"""


class QThermError(Exception):
    """Base class for every error raised by qtherm."""


class ValidationError(QThermError):
    """Input is not a valid matrix, state, ensemble or operation."""


class DimensionError(ValidationError):
    """Shapes disagree, or a tensor product would exceed the dimension cap."""


class SettingsError(ValidationError):
    """Unknown setting key or a value of the wrong type."""


class SpecError(ValidationError):
    """A problem or sweep document is malformed. `field` names the offending path."""

    def __init__(self, field, message):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}" if field else message)


class ContractError(QThermError):
    """An operation was called outside its precondition."""


class ScanExhaustedError(QThermError):
    """No admissible w was found up to the configured radius cap."""

    def __init__(self, radius_cap):
        self.radius_cap = radius_cap
        super().__init__(f"no admissible w with |w| <= {radius_cap}")


class DegenerateDiagonalsError(QThermError):
    """The 2x2 scan system is singular and no consistent solution line exists."""


class ExtractionError(QThermError):
    """Extracted q-coefficients violate their invariants."""

    def __init__(self, message, worst_residual):
        self.worst_residual = float(worst_residual)
        super().__init__(f"{message} (worst residual {self.worst_residual:.3e})")


class SupportError(QThermError):
    """A state lacks the full support a protocol ledger needs."""
