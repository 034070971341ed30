"""Exception hierarchy shared by all modules."""


class SMIError(Exception):
    """Base class for errors raised by this package."""


class InputError(SMIError, ValueError):
    """Malformed arguments: wrong shapes, out-of-range parameters."""


class NumericError(SMIError, ArithmeticError):
    """A numerical routine failed to converge (distinct from infeasibility)."""


class CapacityError(SMIError):
    """Exact enumeration requested beyond the supported size caps."""


class UnboundedError(SMIError):
    """A polytope turned out to be unbounded in a probed direction."""


class EmptyPolytopeError(SMIError):
    """A polytope that must be non-empty has no feasible point."""


class DegenerateGeometryError(SMIError):
    """A centered support value vanished, so a normalized offset is undefined."""


class ModelFalsifiedError(SMIError):
    """The data contradicts the assumed disturbance bound.

    Raised when intersecting the feasible set with a new constraint pair
    leaves it empty.
    """

    def __init__(self, step, component, message=None):
        self.step = step
        self.component = component
        super().__init__(message or f"feasible set became empty at step {step} (component {component})")


class ConfigError(SMIError):
    """Invalid experiment configuration."""


class DivergenceError(NumericError):
    """A simulated state left the bounded region (the configuration is unstable)."""
