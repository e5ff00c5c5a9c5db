"""Typed errors shared across the package.

The CLI maps these onto process exit codes: configuration/domain problems
exit 2, collision (singularity) terminations exit 3, infeasible solves
exit 4.
"""


class ChartDomainError(ValueError):
    """A point violates its chart's domain (off-sheet, |z| >= R, Im w <= 0),
    or a numeric expression left its mathematical domain (acosh arg < 1)."""


class ProjectiveInfinityError(ChartDomainError):
    """A Moebius denominator vanished; the image is the projective point at
    infinity.  Cannot happen for valid interior points."""


class SingularityError(RuntimeError):
    """Two bodies are at (or within tolerance of) a collision, where the
    pairwise Theta function vanishes and the equations of motion blow up."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class BoundaryEscapeError(RuntimeError):
    """A trajectory left the chart's valid domain.  Carries the last valid
    state seen before the escape, when one is available."""

    def __init__(self, message: str, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class InfeasibleError(RuntimeError):
    """A solve has no admissible solution for the given parameters."""
