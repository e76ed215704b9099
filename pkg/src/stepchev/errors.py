"""Exception hierarchy shared by all constructions."""


class StepchevError(Exception):
    """Base class for library errors."""


class DisjointnessError(StepchevError, ValueError):
    """Segments overlap or touch."""


class PreconditionError(StepchevError, ValueError):
    """An operation was called outside its domain."""


class DegreeOverflowError(StepchevError):
    """A composition would exceed the configured degree cap."""


class ConstructionError(StepchevError):
    """A construction could not reach its target accuracy."""


class SandwichViolation(StepchevError, AssertionError):
    """oracle <= measured <= certificate failed."""

    def __init__(self, oracle, measured, certificate):
        self.oracle = oracle
        self.measured = measured
        self.certificate = certificate
        super().__init__(
            f"sandwich violated: oracle={oracle!r} measured={measured!r} "
            f"certificate={certificate!r}"
        )


class ProblemFormatError(StepchevError, ValueError):
    """A problem file is malformed."""
