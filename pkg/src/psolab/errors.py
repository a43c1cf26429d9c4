"""Exception types shared across the package."""


class PsoLabError(Exception):
    """Base class for all psolab errors."""


class ConfigurationError(PsoLabError, ValueError):
    """Invalid swarm, parameter, or analysis configuration."""


class EvaluationError(PsoLabError):
    """An objective returned a non-finite value during a run."""

    def __init__(self, particle: int, position, iteration: int, value: float):
        self.particle = particle
        self.position = position
        self.iteration = iteration
        self.value = value
        super().__init__(
            f"objective returned non-finite value {value!r} for particle "
            f"{particle} at iteration {iteration} (position {position})"
        )


class ShapeError(PsoLabError, ValueError):
    """Matrix arguments with incompatible or unexpected shapes."""


class SingularSpectrumError(PsoLabError, ArithmeticError):
    """Spectral normalization requested for a matrix with zero top eigenvalue."""


class DegenerateDataError(PsoLabError, ValueError):
    """Sample set too degenerate to fit (identical or near-identical values)."""


class TraceParseError(PsoLabError, ValueError):
    """A trace CSV could not be parsed; carries file and line context."""

    def __init__(self, path, line_no: int, detail: str):
        self.path = path
        self.line_no = line_no
        self.detail = detail
        super().__init__(f"{path}:{line_no}: {detail}")


class ProtocolError(PsoLabError, ValueError):
    """Malformed or illegal command received by the live-control service."""
