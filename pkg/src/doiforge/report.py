"""The record produced by every verification trial."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class EstimateReport:
    theorem_id: str
    lhs: float
    rhs: float
    constant_used: float
    ratio: float
    passed: bool
    tolerance: float
    params: dict = field(default_factory=dict)
    notes: str = ""
    extras: dict = field(default_factory=dict)

    @classmethod
    def build(cls, theorem_id, lhs, rhs, constant, *, params=None, notes="",
              extras=None, tol=DEFAULT_TOL, passed=None):
        """Assemble a report; ``passed`` defaults to ``lhs <= constant*rhs + tol*(1+rhs)``."""
        lhs, rhs, constant = float(lhs), float(rhs), float(constant)
        if rhs > 0:
            ratio = lhs / rhs
        else:
            ratio = 0.0 if lhs == 0 else math.inf
        tolerance = tol * (1.0 + abs(rhs))
        ok = lhs <= constant * rhs + tolerance
        extras = dict(extras or {})
        if passed is not None:
            # side conditions that are not part of the main inequality
            extras["side_checks_passed"] = bool(passed)
            ok = ok and bool(passed)
        return cls(theorem_id, lhs, rhs, constant, ratio, ok, tolerance,
                   dict(params or {}), notes, extras)

    def recheck(self) -> bool:
        """Recompute the verdict from the stored fields alone."""
        ok = self.lhs <= self.constant_used * self.rhs + self.tolerance
        return ok and bool(self.extras.get("side_checks_passed", True))

    def to_record(self) -> dict:
        return asdict(self)
