"""Exception types raised by the library."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class VacuumUndefinedError(DomainError):
    """g2 was requested for a state with (numerically) zero mean photon number."""


class PostSelectionError(DomainError):
    """The requested atomic detection outcome has zero probability."""
