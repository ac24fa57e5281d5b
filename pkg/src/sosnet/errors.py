"""Exception hierarchy shared across the package."""


class SosError(Exception):
    """Base class for every error raised by sosnet."""


class ConfigError(SosError, ValueError):
    """Invalid scenario or sweep configuration.

    ``field`` names the offending key so callers can point users at it.
    """

    def __init__(self, field: str, message: str, location: str | None = None):
        self.field = field
        self.message = message
        self.location = location
        prefix = f"{location}: " if location else ""
        super().__init__(f"{prefix}{field}: {message}")


class DegenerateInputError(SosError, ValueError):
    """A ratio or weight was requested with a zero denominator."""


class QuorumError(SosError):
    """Not enough eligible nodes to hold an election."""


class RoleError(SosError):
    """An operation was applied to a node that does not hold the required role."""


class UndefinedPaymentError(SosError):
    """The per-member payment is undefined because the node received no votes."""


class ConflictError(SosError):
    """Evidence combination hit total conflict (zero normalizer)."""


class DegenerateEvidenceError(SosError):
    """CIF fusion produced no mass at all, or received too few reports."""


class LedgerError(SosError):
    """A reputation or punishment operation violated a ledger precondition."""
