"""Exception hierarchy shared by all generation stages."""


class AmlGraphError(Exception):
    """Base class for every error raised by the package."""


# configuration
class ConfigError(AmlGraphError):
    pass


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class MissingSeed(ConfigError):
    pass


# graph model
class GraphError(AmlGraphError):
    pass


class UnsupportedEntityType(GraphError):
    pass


class UnknownCluster(GraphError):
    pass


class DanglingEndpoint(GraphError):
    pass


class OutOfWindow(GraphError):
    pass


class UnknownOwner(GraphError):
    pass


# pattern injection
class PatternError(AmlGraphError):
    """Raised when a pattern instance cannot be built from the current graph."""


class InvalidWindow(PatternError):
    pass


class InvalidPeriod(PatternError):
    pass


class PoolExhausted(PatternError):
    pass


class NoEligibleSource(PatternError):
    pass


class NoOverseasDestinations(PatternError):
    pass


class NoEligibleBeneficiary(PatternError):
    pass


class NoEligibleBusiness(PatternError):
    pass


class InsufficientOverseasBusinesses(PatternError):
    pass


class InsufficientCoordinators(PatternError):
    pass


class PatternInjectionFailed(PatternError):
    """Strict-mode wrapper collecting every per-instance failure."""

    def __init__(self, failures):
        self.failures = list(failures)
        lines = "; ".join(f"{t}#{i}: {e}" for t, i, e in self.failures)
        super().__init__(f"{len(self.failures)} pattern instance(s) failed: {lines}")


# background / assembly / validation
class UnknownType(AmlGraphError):
    pass


class UnknownKind(AmlGraphError):
    pass


class InvalidRatio(AmlGraphError):
    pass


class TooFewEdges(AmlGraphError):
    pass


class UnknownTypology(AmlGraphError):
    pass


class IoError(AmlGraphError):
    pass
