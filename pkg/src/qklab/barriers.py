"""Sub- and super-solutions of the k = n-1 slope equation, checked on grids.

    w0 = n r                         sub-solution for v
    w1 = n r / sqrt(1 - n^2 r^2)     super-solution for v
    w2 = -log(1 - n r)               w2' satisfies the sub-solution inequality

Each check evaluates closed-form expressions pointwise; nothing is integrated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .report import ResidualReport
from .rosgeom import ProfileCurve

MARGIN_TOL = 1e-12
SANDWICH_TOL = 1e-6


@dataclass
class BarrierCheck:
    name: str
    grid: np.ndarray
    margins: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(np.all(self.margins >= -MARGIN_TOL))

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margins))


def _grid(n, grid):
    r = np.asarray(grid, dtype=float)
    if r.size == 0 or np.any(r <= 0) or np.any(r >= 1.0 / n):
        raise DomainError(f"barrier grid must lie in (0, 1/{n})")
    return r


def default_grid(n: int, m: int = 10_000) -> np.ndarray:
    """m points in (0, 1/n), ending at (1 - 1e-6)/n."""
    return np.linspace(1.0 / (n * m), (1.0 - 1e-6) / n, m)


def f_top(n, r, s):
    """F_{n-1}(r, s) = s (1 + s^2) / (s - (n-1) r)."""
    return s * (1.0 + s * s) / (s - (n - 1) * r)


def w1(n, r):
    x = n * np.asarray(r)
    return x / np.sqrt(1.0 - x * x)


def w1_integral(n, r):
    x = n * np.asarray(r)
    return (1.0 - np.sqrt(1.0 - x * x)) / n


def w2(n, r):
    return -np.log1p(-n * np.asarray(r))


def check_w0(n: int, grid) -> BarrierCheck:
    r = _grid(n, grid)
    w = n * r
    return BarrierCheck("w0_sub", r, f_top(n, r, w) - n)


def check_w1(n: int, grid) -> BarrierCheck:
    r = _grid(n, grid)
    w = w1(n, r)
    dw = w * (1.0 + w * w) / r
    # margin is dw - F = w (1 + w^2) (1/r - 1/(w - (n-1) r)); nonnegative iff w >= n r
    margins = np.minimum(dw - f_top(n, r, w), w - n * r)
    return BarrierCheck("w1_super", r, margins)


def w1_derivative_identity(n, r):
    """(analytic w1', w1 (1 + w1^2)/r); equal in exact arithmetic."""
    r = np.asarray(r, dtype=float)
    w = w1(n, r)
    return n / (1.0 - (n * r) ** 2) ** 1.5, w * (1.0 + w * w) / r


def check_w2(n: int, grid) -> BarrierCheck:
    """Margin of n <= ((1-nr)^2 + n^2) / (n - (n-1) r + n(n-1) r^2)."""
    r = _grid(n, grid)
    rhs = ((1.0 - n * r) ** 2 + n * n) / (n - (n - 1) * r + n * (n - 1) * r * r)
    return BarrierCheck("w2_sub", r, rhs - n)


def w2_direct_margin(n, r):
    """F_{n-1}(r, w2') - w2'' before reduction; same sign as the check_w2 margin."""
    r = np.asarray(r, dtype=float)
    d1 = n / (1.0 - n * r)
    d2 = n * n / (1.0 - n * r) ** 2
    return f_top(n, r, d1) - d2


def sandwich_verify(curve: ProfileCurve, tol: float = SANDWICH_TOL) -> list[ResidualReport]:
    """Compare a k = n-1 solution with the barriers on (0, 1/n).

    Gating checks: n r <= v <= w1, and for the height
    n r^2 / 2 <= u <= int_0^r w1. The comparison u >= w2 is reported but
    does not gate: w2' is a sub-solution that starts above v (w2'(0) = n),
    so no ordering follows and the check fails near the axis.
    """
    n = curve.n
    if curve.k != n - 1:
        raise DomainError("sandwich applies to k = n-1 profiles")
    m = (curve.r > 0) & (curve.r < 1.0 / n)
    r, u, v = curve.r[m], curve.u[m], curve.du[m]
    if r.size == 0:
        raise DomainError("no samples in (0, 1/n)")
    return [
        ResidualReport("v_lower_w0", r, v - n * r, tol),
        ResidualReport("v_upper_w1", r, w1(n, r) - v, tol),
        ResidualReport("u_lower_int_w0", r, u - 0.5 * n * r * r, tol),
        ResidualReport("u_upper_int_w1", r, w1_integral(n, r) - u, tol),
        ResidualReport("u_lower_w2", r, u - w2(n, r), tol, gating=False,
                       note="informational: w2 starts with slope n > v(0) = 0, no comparison applies"),
    ]


def blowup_certificate(curve: ProfileCurve, level: float = 10.0) -> float | None:
    """Smallest sampled radius with u >= level, or None."""
    hit = np.flatnonzero(curve.u >= level)
    return float(curve.r[hit[0]]) if hit.size else None
