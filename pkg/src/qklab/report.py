"""Pointwise verification results."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class ResidualReport:
    """Per-sample residuals of one check.

    ``residuals`` are signed slacks where a check is an inequality (negative
    means violated) and absolute errors otherwise; ``tol`` is the allowed
    violation. ``max_violation`` is the largest amount by which a sample
    breaks the check (0 when none does).
    """

    name: str
    radii: np.ndarray
    residuals: np.ndarray
    tol: float
    kind: str = "inequality"  # or "equality"
    gating: bool = True
    note: str = ""
    violations: np.ndarray = field(init=False)

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        self.residuals = np.asarray(self.residuals, dtype=float)
        if self.kind == "inequality":
            self.violations = np.maximum(-self.residuals, 0.0)
        elif self.kind == "equality":
            self.violations = np.abs(self.residuals)
        else:
            raise ValueError(f"unknown check kind {self.kind!r}")
        self.violations = np.where(np.isnan(self.violations), np.inf, self.violations)

    @property
    def max_violation(self) -> float:
        return float(self.violations.max()) if self.violations.size else 0.0

    @property
    def passed(self) -> bool:
        return bool(np.all(self.violations <= self.tol))

    @property
    def n_violations(self) -> int:
        return int(np.count_nonzero(self.violations > self.tol))

    @property
    def first_violation_radius(self) -> Optional[float]:
        bad = np.flatnonzero(self.violations > self.tol)
        return float(self.radii[bad[0]]) if bad.size else None

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.residuals))) if self.residuals.size else 0.0

    def summary(self) -> dict:
        return {"name": self.name, "passed": self.passed, "max_violation": self.max_violation}
