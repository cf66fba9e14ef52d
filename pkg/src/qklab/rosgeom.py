"""Closed-form geometry of rotationally symmetric graphs (r theta, u(r)).

A profile point is a ``ProfileJet`` (r, u, u', u'') in R^{n+1} together with
the flow index k. On the axis (r = 0) a smooth profile has u' = 0 and is
umbilic, so the rotational curvature u'/(r W) is replaced by its limit u''(0).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Optional

import numpy as np

from . import symfunc
from .errors import DomainError, InvalidJet, SingularDenominator

PROVENANCES = ("shooting", "picard", "explicit", "barrier")


@dataclass(frozen=True)
class ProfileJet:
    r: float
    u: float
    du: float
    ddu: float
    n: int
    k: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"n={self.n} < 2")
        if not 0 <= self.k <= self.n - 1:
            raise DomainError(f"k={self.k} outside [0, {self.n - 1}]")
        if self.r < 0:
            raise DomainError(f"negative radius {self.r}")


@dataclass
class ProfileCurve:
    """Sampled radial profile. Arrays are parallel; radii strictly increasing."""

    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    ddu: np.ndarray
    n: int
    k: int
    provenance: str = "shooting"
    blow_up_radius: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.r, self.u, self.du, self.ddu = (np.asarray(a, dtype=float) for a in (self.r, self.u, self.du, self.ddu))
        if not (self.r.shape == self.u.shape == self.du.shape == self.ddu.shape) or self.r.ndim != 1:
            raise DomainError("profile arrays must be 1-D and of equal length")
        if self.r.size and (self.r[0] < 0 or np.any(np.diff(self.r) <= 0)):
            raise DomainError("profile radii must be >= 0 and strictly increasing")
        if self.provenance not in PROVENANCES:
            raise DomainError(f"unknown provenance {self.provenance!r}")
        if self.provenance == "explicit" and (self.n, self.k) != (2, 1):
            raise DomainError("explicit profiles exist only for n=2, k=1")
        if not 0 <= self.k <= self.n - 1:
            raise DomainError(f"k={self.k} outside [0, {self.n - 1}]")

    def __len__(self):
        return self.r.size

    def jet(self, i) -> ProfileJet:
        return ProfileJet(float(self.r[i]), float(self.u[i]), float(self.du[i]), float(self.ddu[i]), self.n, self.k)

    def jets(self) -> Iterator[ProfileJet]:
        for i in range(len(self)):
            yield self.jet(i)

    def restrict(self, r_lo=-np.inf, r_hi=np.inf) -> "ProfileCurve":
        m = (self.r >= r_lo) & (self.r <= r_hi)
        return ProfileCurve(self.r[m], self.u[m], self.du[m], self.ddu[m], self.n, self.k,
                            self.provenance, self.blow_up_radius, dict(self.meta))


def phi(x):
    return x / np.sqrt(1.0 + x * x)


def dphi(x):
    return (1.0 + x * x) ** -1.5


def normal_vertical(jet: ProfileJet) -> float:
    """<nu, e_{n+1}> for the upward unit normal."""
    return float(1.0 / np.sqrt(1.0 + jet.du * jet.du))


def principal_curvatures(jet: ProfileJet) -> np.ndarray:
    """n-1 rotational curvatures followed by the radial one."""
    if jet.r == 0:
        if jet.du != 0:
            raise InvalidJet(f"cone point: r=0 with du={jet.du}")
        rot = jet.ddu
    else:
        rot = phi(jet.du) / jet.r
    rad = jet.ddu * dphi(jet.du)
    return np.array([rot] * (jet.n - 1) + [rad], dtype=float)


def s_l_profile(jet: ProfileJet, l: int) -> float:
    """S_l from the divergence form, with d/dr of r^{n-l} phi(u')^l expanded."""
    n = jet.n
    if jet.r <= 0:
        raise DomainError("s_l_profile needs r > 0; use principal_curvatures on the axis")
    if not 1 <= l <= n:
        raise DomainError(f"order l={l} outside [1, {n}]")
    r, p = jet.r, phi(jet.du)
    ddr = (n - l) * r ** (n - l - 1) * p ** l + l * r ** (n - l) * p ** (l - 1) * dphi(jet.du) * jet.ddu
    return float(comb(n - 1, l - 1) / (l * r ** (n - 1)) * ddr)


def _qk_parts(jet):
    n, k, r, du, ddu = jet.n, jet.k, jet.r, jet.du, jet.ddu
    w2 = 1.0 + du * du
    num = (n - k - 1) * w2 * du * du + (k + 1) * r * ddu * du
    den = (n - k) * w2 * du + k * r * ddu
    return num, den


def q_k_profile(jet: ProfileJet) -> float:
    if jet.r <= 0:
        raise DomainError("q_k_profile needs r > 0")
    num, den = _qk_parts(jet)
    if den == 0:
        raise SingularDenominator("Q_k denominator vanishes (curvatures leave the cone)", value=den, where=jet)
    n, k = jet.n, jet.k
    return float((n - k) / ((k + 1) * jet.r * np.sqrt(1.0 + jet.du ** 2)) * num / den)


def translator_rhs(n, k, r, du):
    """Right-hand side of u'' = F_k(r, u') for rotational Q_k-translators."""
    den = (n - k) * du - r * k
    if den == 0:
        raise SingularDenominator(f"(n-k)u' - rk vanishes at r={r}, u'={du}", value=den, where=(r, du))
    return (n - k) / (k + 1) * (1.0 + du * du) * (du / r) * ((r * (k + 1) - (n - k - 1) * du) / den)


def translator_residual(jet: ProfileJet) -> float:
    if jet.r <= 0:
        raise DomainError("translator_residual needs r > 0")
    return float(jet.ddu - translator_rhs(jet.n, jet.k, jet.r, jet.du))


def axis_residual(jet: ProfileJet) -> float:
    """Q_k(lambda) - <nu, e_{n+1}> evaluated from the curvatures; valid on the axis."""
    return symfunc.q_ratio(principal_curvatures(jet), jet.k) - normal_vertical(jet)
