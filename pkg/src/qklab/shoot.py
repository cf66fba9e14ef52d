"""Shooting for rotational Q_k-translator profiles.

The slope v = u' solves v' = F_k(r, v), v(0) = 0, which is singular at the
axis. Near r = 0 the solution behaves like v = a r with a = (k+1)/(n-k), so
integration starts at a small r_start from that seed; the axis equilibrium is
attracting, and errors in the seed decay as r grows.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import DOP853
from scipy.optimize import brentq

from .errors import DomainError, IntegrationError, SingularDenominator
from .rosgeom import ProfileCurve, translator_rhs

log = logging.getLogger(__name__)

REASONS = ("threshold", "step_floor", "cap_reached")


@dataclass(frozen=True)
class SlopeField:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 2 or not 0 <= self.k <= self.n - 1:
            raise DomainError(f"need n >= 2 and 0 <= k <= n-1, got n={self.n}, k={self.k}")

    def __call__(self, r, s):
        return slope(self, r, s)


@dataclass(frozen=True)
class IntegrationConfig:
    r_start: float = 1e-6
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    v_blowup: float = 1e8
    h_min: float = 1e-14
    r_max: float = 10.0
    sample_spacing: float = 1e-3
    # slope of the seed v = seed_slope * r_start; None means the axis slope
    seed_slope: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.r_start < self.r_max:
            raise DomainError(f"need 0 < r_start < r_max, got {self.r_start}, {self.r_max}")
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.h_min <= 0 or self.sample_spacing <= 0:
            raise DomainError("tolerances, h_min and sample_spacing must be positive")
        if self.v_blowup <= 0:
            raise DomainError("v_blowup must be positive")


@dataclass(frozen=True)
class BlowUpReport:
    detected: bool
    radius_estimate: float
    last_v: float
    reason: str
    message: str = ""
    # radii where v first reached v_blowup and 10 * v_blowup
    crossing: Optional[float] = None
    crossing_10: Optional[float] = None

    def __post_init__(self):
        if self.reason not in REASONS:
            raise DomainError(f"unknown reason {self.reason!r}")


def slope(field: SlopeField, r: float, s: float) -> float:
    """F_k(r, s), the right-hand side of the first-order profile equation."""
    if r <= 0:
        raise DomainError(f"slope needs r > 0, got {r}")
    return translator_rhs(field.n, field.k, r, s)


def axis_slope(field: SlopeField) -> float:
    """Limit of v/r at the axis: the positive root of a = F_k(1, a)."""
    return (field.k + 1) / (field.n - field.k)


def _rhs(field):
    n, k = field.n, field.k
    c = (n - k) / (k + 1)

    def f(r, y):
        s = y[0]
        den = (n - k) * s - k * r
        return np.array([c * (1.0 + s * s) * (s / r) * ((r * (k + 1) - (n - k - 1) * s) / den), s])

    return f


def integrate(field: SlopeField, config: IntegrationConfig = IntegrationConfig(), sample_at=None):
    """Integrate the profile from the axis until blow-up, a step floor or r_max.

    Returns ``(curve, report)``. The curve starts with the axis point r = 0 and
    carries step points, dense-output points at most ``sample_spacing`` apart
    and any radii in ``sample_at`` reached before termination. For threshold
    blow-up the samples stop where v first reaches ``v_blowup``.
    """
    n, k = field.n, field.k
    a = axis_slope(field)
    seed = a if config.seed_slope is None else config.seed_slope
    r0 = config.r_start
    v0 = seed * r0
    if (n - k) * v0 - k * r0 <= 0:
        raise SingularDenominator(f"seed v={v0} at r={r0} sits on or below the singular line",
                                  value=(n - k) * v0 - k * r0, where=(r0, v0))
    y0 = np.array([v0, 0.5 * seed * r0 * r0])
    solver = DOP853(_rhs(field), r0, y0, config.r_max, rtol=config.rel_tol, atol=config.abs_tol)

    pieces = []  # (t_old, t_new, dense interpolant)
    reason, message = "cap_reached", ""
    crossing = crossing_10 = None
    target = config.v_blowup
    while solver.status == "running":
        t_old = solver.t
        with np.errstate(all="ignore"):
            msg = solver.step()
        if solver.status == "failed":
            reason, message = "step_floor", f"solver failed: {msg}"
            break
        v = solver.y[0]
        if not np.isfinite(v):
            reason, message = "step_floor", "non-finite slope"
            break
        dense = solver.dense_output()
        pieces.append((t_old, solver.t, dense))
        if (n - k) * v - k * solver.t <= 0:
            reason, message = "step_floor", "slope denominator (n-k)v - kr changed sign (cone exit)"
            break
        if v >= target:
            r_cross = brentq(lambda r: dense(r)[0] - target, t_old, solver.t, xtol=1e-16, rtol=1e-15)
            if crossing is None:
                crossing, reason = r_cross, "threshold"
                target = 10.0 * config.v_blowup
                # keep going to the second threshold for the extrapolation
                continue
            crossing_10 = r_cross
            break
        if solver.status == "running" and solver.step_size < config.h_min:
            reason, message = "step_floor", f"step size {solver.step_size:.3e} below h_min"
            break

    if not pieces:
        raise IntegrationError(f"no step accepted from r={r0}: {message or solver.status}")

    last_r = pieces[-1][1]
    last_v = float(pieces[-1][2](last_r)[0])
    if reason == "threshold":
        if crossing_10 is not None:
            # v ~ 1/(R - r) near the pole: R - r_V = 1/V
            estimate = crossing_10 + (crossing_10 - crossing) / 9.0
        else:
            estimate = crossing
            message = message or "second threshold not reached; estimate is the first crossing"
        report = BlowUpReport(True, float(estimate), last_v, reason, message, crossing, crossing_10)
        r_end = crossing
    elif reason == "step_floor":
        report = BlowUpReport(True, float(last_r), last_v, reason, message)
        r_end = last_r
    else:
        report = BlowUpReport(False, float(config.r_max), last_v, reason, "reached r_max")
        r_end = last_r
    log.debug("integrate n=%d k=%d: %s at r=%.6g", n, k, reason, report.radius_estimate)

    curve = _sample(field, pieces, r0, y0, r_end, config.sample_spacing, sample_at, seed)
    curve.blow_up_radius = report.radius_estimate if reason == "threshold" else None
    curve.meta["reason"] = reason
    return curve, report


def _sample(field, pieces, r0, y0, r_end, spacing, sample_at, seed):
    rs = [np.array([r0])]
    ys = [y0[:, None]]
    extra = np.sort(np.asarray(sample_at if sample_at is not None else [], dtype=float))
    for t_old, t_new, dense in pieces:
        hi = min(t_new, r_end)
        if hi <= t_old:
            break
        m = int(np.ceil((hi - t_old) / spacing))
        grid = t_old + (hi - t_old) * np.arange(1, m + 1) / m
        grid[-1] = hi
        mid = extra[(extra > t_old) & (extra < hi)]
        grid = np.union1d(grid, mid)
        rs.append(grid)
        ys.append(dense(grid))
    r = np.concatenate(rs)
    y = np.concatenate(ys, axis=1)
    r, idx = np.unique(r, return_index=True)
    v, u = y[0, idx], y[1, idx]
    ddu = np.array([translator_rhs(field.n, field.k, ri, vi) for ri, vi in zip(r, v)])
    r = np.concatenate([[0.0], r])
    return ProfileCurve(r, np.concatenate([[0.0], u]), np.concatenate([[0.0], v]),
                        np.concatenate([[seed], ddu]), field.n, field.k, provenance="shooting")


def reconstruct_height(curve: ProfileCurve) -> ProfileCurve:
    """Recompute u from (u', u'') samples by cubic Hermite quadrature, u(r_0) = u_0.

    On each interval the slope is the Hermite cubic through (v, v') at both
    ends, integrated exactly: h (v_i + v_j)/2 + h^2 (v'_i - v'_j)/12.
    """
    h = np.diff(curve.r)
    v, dv = curve.du, curve.ddu
    inc = 0.5 * h * (v[:-1] + v[1:]) + h * h / 12.0 * (dv[:-1] - dv[1:])
    start = 0.0 if curve.r[0] == 0 else float(curve.u[0])
    u = start + np.concatenate([[0.0], np.cumsum(inc)])
    return ProfileCurve(curve.r.copy(), u, curve.du.copy(), curve.ddu.copy(), curve.n, curve.k,
                        curve.provenance, curve.blow_up_radius, dict(curve.meta))


def fit_axis_slope(curve: ProfileCurve, r_lo: float, r_hi: float) -> float:
    """Least-squares fit of v/r = a + b r^2 on [r_lo, r_hi]; returns a."""
    m = (curve.r >= r_lo) & (curve.r <= r_hi) & (curve.r > 0)
    if m.sum() < 3:
        raise DomainError("need at least three samples in the fit window")
    r = curve.r[m]
    design = np.vstack([np.ones_like(r), r * r]).T
    coef, *_ = np.linalg.lstsq(design, curve.du[m] / r, rcond=None)
    return float(coef[0])
