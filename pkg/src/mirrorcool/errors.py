"""Exception hierarchy shared by all mirrorcool modules."""


class MirrorCoolError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(MirrorCoolError, ValueError):
    """A parameter violates a physical or numerical invariant."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field} {message}")


class PoleError(MirrorCoolError, ArithmeticError):
    """A susceptibility was evaluated on (or numerically at) a pole."""


class GainPoleError(PoleError):
    """The atom-modified cavity response diverges (inverted-atom gain pole)."""


class InstabilityError(MirrorCoolError):
    """The requested quantity does not exist because the system is unstable."""


class NetHeatingError(MirrorCoolError):
    """Net scattering heats the oscillator; no perturbative steady state."""


class PhysicalityError(MirrorCoolError):
    """A covariance matrix violates the uncertainty principle."""


class StepSizeError(MirrorCoolError):
    """Time propagation could not choose a representable step."""


class ConfigError(MirrorCoolError, ValueError):
    """A run configuration is malformed. ``path`` locates the bad key."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
