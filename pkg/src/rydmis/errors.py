"""Error and warning types shared across the package."""


class CapacityError(RuntimeError):
    """Problem size exceeds a configured or physical limit."""


class ConstraintViolation(ValueError):
    """A device constraint would be breached."""


class DegenerateGeometryError(ValueError):
    """Register geometry is degenerate (coincident atoms)."""


class DegeneratePlanError(ValueError):
    """Detuning plan is degenerate (e.g. no nonzero detuning to normalise by)."""


class PipelineError(RuntimeError):
    """An experiment pipeline stage failed; ``stage`` names the culprit."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause


class HardwareFidelityWarning(UserWarning):
    """Requested sampling goes beyond what one hardware submission allows."""
