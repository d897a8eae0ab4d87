"""Exception hierarchy shared by the library and mapped to CLI exit codes."""


class PolarCoordError(Exception):
    """Base class for all library errors."""


class ConfigError(PolarCoordError, ValueError):
    """Invalid parameters, presets or spec files (CLI exit code 2)."""


class ChannelError(ConfigError):
    """A channel matrix or permutation violates its invariants."""


class InvariantViolation(PolarCoordError, RuntimeError):
    """A mathematical invariant failed at run time (CLI exit code 3)."""


class DegenerateLikelihood(InvariantViolation):
    """Both bit-channel likelihoods vanished: the conditioning past has probability zero."""


class SupportViolation(InvariantViolation):
    """KL divergence is infinite because the support condition fails."""


class NestingViolation(InvariantViolation):
    """Good set of the marginal channel is not contained in the joint channel's."""


class CapExceeded(PolarCoordError, RuntimeError):
    """An exhaustive computation would exceed the configured table size (CLI exit code 4)."""
