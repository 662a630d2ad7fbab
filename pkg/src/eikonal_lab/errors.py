"""Exception types shared across the lab."""


class InputShapeError(ValueError):
    """Sampled data does not match the grid it is paired with."""


class InvariantViolation(ValueError):
    """A value type was built or passed in a state that breaks its invariants."""


class StabilityError(ValueError):
    """Requested time step does not resolve the phase advance per step."""


class UnsupportedPotential(ValueError):
    """The operation only supports quadratic potentials."""


class IntegrationError(RuntimeError):
    """Adaptive integration could not continue (step underflow or non-finite rhs)."""

    def __init__(self, message: str, t_last: float):
        self.t_last = float(t_last)
        super().__init__(f"{message} (last good t = {self.t_last!r})")


class FittingError(RuntimeError):
    """A fringe/peak fit was ill-conditioned."""

    def __init__(self, message: str, residual: float):
        self.residual = float(residual)
        super().__init__(f"{message} (residual = {self.residual!r})")
