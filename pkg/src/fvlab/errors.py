"""Exception types raised across the package."""


class DomainError(ValueError):
    """A state or time lies outside the domain where an operation is defined."""


class VacuumError(DomainError):
    """The Riemann problem between two gas states generates a vacuum."""


class UsageError(ValueError):
    """Arguments are structurally incompatible (wrong model, mismatched grids...)."""


class SizeError(UsageError):
    pass


class InsufficientDataError(ValueError):
    pass


class NumericalError(RuntimeError):
    """An iteration failed to converge or produced non-finite values."""

    def __init__(self, message, cell=None, step=None):
        super().__init__(message)
        self.cell = cell
        self.step = step


class CFLError(RuntimeError):
    """The stencil condition lambda * max|speed| <= target is violated."""

    def __init__(self, product, target, step=None):
        self.product = float(product)
        self.target = float(target)
        self.step = step
        where = "" if step is None else f" at step {step}"
        super().__init__(
            f"CFL violation{where}: lambda*max|speed| = {self.product:.6g} "
            f"exceeds target {self.target:.6g}"
        )


class ConfigError(ValueError):
    """Invalid experiment configuration; ``diagnostics`` lists (location, message)."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(f"{loc}: {msg}" for loc, msg in self.diagnostics))
