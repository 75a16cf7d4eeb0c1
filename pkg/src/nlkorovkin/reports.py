"""Pass/fail records shared by the property checkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class PropertyReport:
    """Outcome of checking one property over many trials.

    ``worst_violation`` is signed: negative values mean every trial satisfied
    the property with room to spare.  The verdict is ``"fail"`` exactly when
    the worst violation exceeds ``tolerance``; a witness is kept only then.
    """

    property: str
    trials: int
    worst_violation: float
    tolerance: float
    witness: Any = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.failed:
            self.witness = None

    @property
    def failed(self) -> bool:
        return bool(self.worst_violation > self.tolerance)

    @property
    def passed(self) -> bool:
        return not self.failed

    @property
    def verdict(self) -> str:
        return "fail" if self.failed else "pass"

    def __str__(self):
        return (f"{self.property}: {self.verdict} "
                f"(worst={self.worst_violation:.3e}, tol={self.tolerance:.1e}, "
                f"trials={self.trials})")


class WorstTracker:
    """Running maximum of violations remembering the first worst witness."""

    def __init__(self):
        self.worst = -float("inf")
        self.witness = None

    def update(self, violation, witness=None):
        violation = float(violation)
        if violation > self.worst:
            self.worst = violation
            self.witness = witness

    def report(self, name, trials, tolerance, **details):
        worst = self.worst if self.worst > -float("inf") else 0.0
        return PropertyReport(name, trials, worst, tolerance,
                              witness=self.witness, details=details)
