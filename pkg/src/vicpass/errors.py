"""Exception types shared across the package."""

from __future__ import annotations


class ChartSingularityError(ValueError):
    """End effector is inside the singular region of a manifold chart."""


class IllConditionedCovarianceError(ValueError):
    """Covariance fusion is numerically unusable (condition number too large)."""


class PlantDivergedError(RuntimeError):
    """Plant state became non-finite.

    Signals controller blow-up rather than a harness bug; carries the step
    index and time when raised from a scenario run.
    """

    def __init__(self, step: int | None = None, time_s: float | None = None,
                 detail: str = ""):
        self.step = step
        self.time_s = time_s
        msg = "plant state non-finite"
        if step is not None:
            msg += f" at step {step}"
        if time_s is not None:
            msg += f" (t={time_s:.6f} s)"
        if detail:
            msg += ": " + detail
        super().__init__(msg)
