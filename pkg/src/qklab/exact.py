"""Closed-form rotational Q_{n-1}-translators.

With u' = tan(theta) the profile equation for k = n-1 becomes linear in
r(theta):

    dr/dtheta = 1 - (n-1) r cot(theta),   r(0) = 0,

so r(theta) = I(theta) / sin(theta)^{n-1}, I(theta) = int_0^theta sin^{n-1}.
The slope blows up at theta = pi/2, i.e. at the Wallis radius
int_0^{pi/2} sin^{n-1} = B(n/2, 1/2) / 2. For n = 2 this is the profile
u = -log(1 - r^2).
"""
from __future__ import annotations

import numpy as np
from scipy import integrate, optimize, special

from .rosgeom import ProfileCurve


def explicit_slope(r):
    r = np.asarray(r, dtype=float)
    return 2.0 * r / (1.0 - r * r)


def explicit_height(r):
    r = np.asarray(r, dtype=float)
    return -np.log1p(-r * r)


def explicit_ddu(r):
    r = np.asarray(r, dtype=float)
    return 2.0 * (1.0 + r * r) / (1.0 - r * r) ** 2


def explicit_curve(r) -> ProfileCurve:
    """Sampled n=2, k=1 translator on radii in [0, 1)."""
    r = np.asarray(r, dtype=float)
    return ProfileCurve(r, explicit_height(r), explicit_slope(r), explicit_ddu(r), n=2, k=1,
                        provenance="explicit", blow_up_radius=1.0)


def blowup_radius(n: int) -> float:
    """Radius where the k = n-1 profile slope diverges."""
    return 0.5 * float(special.beta(n / 2.0, 0.5))


def _sin_power_integral(n, theta):
    # int_0^theta sin^{n-1} for theta in [0, pi/2], via the incomplete beta function
    a = n / 2.0
    x = np.sin(theta) ** 2
    return 0.5 * special.betainc(a, 0.5, x) * special.beta(a, 0.5)


def polar_radius(n: int, theta):
    """r(theta) of the k = n-1 profile, theta = arctan(u') in (0, pi/2]."""
    theta = np.asarray(theta, dtype=float)
    small = theta < 1e-4
    out = np.empty_like(theta)
    t = theta[~small]
    out[~small] = _sin_power_integral(n, t) / np.sin(t) ** (n - 1)
    # series of I(t)/sin^{n-1}(t): t/n + (n-1) t^3 / (3 n (n+2)) + O(t^5)
    t = theta[small]
    out[small] = t / n + (n - 1) * t ** 3 / (3 * n * (n + 2))
    return out if out.ndim else float(out)


def polar_slope(n: int, r: float) -> float:
    """u'(r) of the k = n-1 profile for 0 <= r < blowup_radius(n)."""
    if r == 0:
        return 0.0
    if not 0 < r < blowup_radius(n):
        raise ValueError(f"r={r} outside [0, {blowup_radius(n)})")
    theta = optimize.brentq(lambda t: polar_radius(n, t) - r, 0.0, np.pi / 2, xtol=1e-16, rtol=1e-15)
    return float(np.tan(theta))


def polar_height(n: int, r: float) -> float:
    """u(r) = int_0^r u'(s) ds, by adaptive quadrature of the closed-form slope."""
    if r == 0:
        return 0.0
    return float(integrate.quad(lambda s: polar_slope(n, s), 0.0, r, epsabs=1e-14, epsrel=1e-13, limit=200)[0])
