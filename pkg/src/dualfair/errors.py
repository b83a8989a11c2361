"""Exception hierarchy shared across the pipeline."""


class DualFairError(Exception):
    """Base class for all pipeline errors."""


class SchemaError(DualFairError):
    """Input data does not match the declared schema."""


class CleanError(DualFairError):
    """Cleaning produced an unusable table (e.g. zero rows)."""


class BalanceError(DualFairError):
    """A sub-dataset cannot be resampled to the requested targets."""


class ModelError(DualFairError):
    """Training or prediction failed (single-class data, divergence, ...)."""


class PipelineError(DualFairError):
    """An experiment stage failed; carries the stage name."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
