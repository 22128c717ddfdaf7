"""Exception and warning hierarchy.

Exit-code mapping used by the CLI: ConfigError -> 2, PhysicsError -> 3,
NumericsError -> 4. Library code raises plain ValueError for ordinary
argument validation; the CLI treats those as config errors too.
"""


class NoisyKerrError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(NoisyKerrError):
    """Malformed or inconsistent run configuration."""


class PhysicsError(NoisyKerrError):
    """The requested quantity is ill-defined for the given model.

    Examples: a non-normalizable infinite-temperature steady state under
    purely classical noise, photon statistics of an empty oscillator, or a
    noise model that does not couple to the ladder at all.
    """


class NumericsError(NoisyKerrError):
    """A numerical procedure failed to reach its requested accuracy."""

    def __init__(self, message, achieved=None, requested=None):
        super().__init__(message)
        self.achieved = achieved
        self.requested = requested


class PhysicsWarning(UserWarning):
    """Model is outside the regime the weak-coupling treatment assumes."""


class TruncationWarning(UserWarning):
    """Fock-space truncation was forced before the tail condition held."""
