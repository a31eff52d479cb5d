"""Exception hierarchy shared across the toolkit."""


class ConjointRiskError(Exception):
    """Base class for all domain errors raised by this package."""


class ValidationError(ConjointRiskError):
    """Input violates a structural precondition (bad level, wrong shape, ...)."""


class ConfigurationError(ConjointRiskError):
    """A requested operation is not runnable with the given parameters."""


class DegenerateCandidatesError(ConjointRiskError):
    """No nonsingular starting design could be drawn from the candidate set."""


class PairingError(ConjointRiskError):
    """Pair assembly kept producing self-pairs and hit the retry cap."""


class IdentifiabilityError(ConjointRiskError):
    """The difference design matrix is rank deficient."""

    def __init__(self, attributes, message=None):
        self.attributes = tuple(attributes)
        super().__init__(
            message
            or "collinear attributes, coefficients not identifiable: "
            + ", ".join(self.attributes)
        )


class SeparationError(ConjointRiskError):
    """The likelihood is unbounded (perfect separation in the responses)."""

    def __init__(self, attribute, message=None):
        self.attribute = attribute
        super().__init__(
            message or f"perfect separation: coefficient for {attribute!r} diverges"
        )


class ParseError(ConjointRiskError):
    """A persisted file is malformed."""

    def __init__(self, path, message, line=None, field=None):
        self.path = str(path)
        self.line = line
        self.field = field
        loc = self.path
        if line is not None:
            loc += f":{line}"
        if field is not None:
            loc += f" (field {field!r})"
        super().__init__(f"{loc}: {message}")


class IntegrityError(ConjointRiskError):
    """A cross-reference between persisted components does not resolve."""


class FormatVersionError(ConjointRiskError):
    """The bundle was written by a newer format than this reader supports."""


class LockError(ConjointRiskError):
    """Another writer holds the bundle directory lock."""


class ServiceStateError(ConjointRiskError):
    """The survey service is not in a state that allows the request."""
