"""Symmetric functions of a principal-curvature vector.

Elementary symmetric polynomials S_l, the curvature quotient
Q_k = S_{k+1} / S_k, its gradient, diagonal Newton transformations and
Garding-cone membership. Everything acts on plain 1-D float arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConeViolation, DomainError, SingularDenominator

ZERO_GUARD = 1e-300


def as_curvatures(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1 or lam.size < 2:
        raise DomainError(f"curvature vector must be 1-D with n >= 2, got shape {lam.shape}")
    if not np.all(np.isfinite(lam)):
        raise DomainError("curvature vector has non-finite entries")
    return lam


def elementary_symmetric_all(lam) -> np.ndarray:
    """Return ``[S_0, ..., S_n]``, the coefficients of prod(1 + lam_i t)."""
    lam = np.asarray(lam, dtype=float)
    e = np.zeros(lam.size + 1)
    e[0] = 1.0
    for j, x in enumerate(lam):
        # in place, high degree first so e[:j+1] still holds the previous product
        e[1:j + 2] += x * e[0:j + 1].copy()
    return e


def elementary_symmetric(lam, l: int) -> float:
    lam = as_curvatures(lam)
    n = lam.size
    if not 0 <= l <= n:
        raise DomainError(f"order l={l} outside [0, {n}]")
    return float(elementary_symmetric_all(lam)[l])


def _check_k(k, n):
    if not 0 <= k <= n - 1:
        raise DomainError(f"k={k} outside [0, {n - 1}]")


def q_ratio(lam, k: int) -> float:
    lam = as_curvatures(lam)
    _check_k(k, lam.size)
    s = elementary_symmetric_all(lam)
    if abs(s[k]) < ZERO_GUARD:
        raise SingularDenominator(f"S_{k} vanishes ({s[k]!r})", value=s[k])
    return float(s[k + 1] / s[k])


def _removed(lam) -> np.ndarray:
    """Row i holds [S_0, ..., S_{n-1}] of lam with entry i dropped."""
    n = lam.size
    out = np.empty((n, n))
    for i in range(n):
        out[i] = elementary_symmetric_all(np.delete(lam, i))
    return out


def q_gradient(lam, k: int) -> np.ndarray:
    """Gradient of Q_k with respect to the curvatures, for lam in Gamma_{k+1}."""
    lam = as_curvatures(lam)
    _check_k(k, lam.size)
    rep = in_cone(lam, k + 1)
    if not rep.member:
        raise ConeViolation(f"curvature vector not in Gamma_{k + 1}", values=rep.values)
    s = rep.values
    minors = _removed(lam)
    dsk1 = minors[:, k]
    dsk = minors[:, k - 1] if k >= 1 else np.zeros(lam.size)
    return (dsk1 * s[k] - s[k + 1] * dsk) / s[k] ** 2


def newton_transform_diag(lam, k: int) -> np.ndarray:
    """Diagonal of T_k(diag(lam)) via T_k = S_k I - W T_{k-1}, T_0 = I."""
    lam = as_curvatures(lam)
    _check_k(k, lam.size)
    s = elementary_symmetric_all(lam)
    t = np.ones_like(lam)
    for j in range(1, k + 1):
        t = s[j] - lam * t
    return t


@dataclass(frozen=True)
class ConeReport:
    m: int
    member: bool
    k_max: int
    values: np.ndarray

    def __post_init__(self):
        assert self.values[0] == 1.0


def in_cone(lam, m: int) -> ConeReport:
    """Check S_l(lam) > 0 for l = 0..m (the open cone Gamma_m).

    ``k_max`` is the largest k with lam in Gamma_{k+1}; it is -1 when S_1 <= 0.
    The comparison is exact; callers that want a safety margin apply it
    themselves.
    """
    lam = as_curvatures(lam)
    n = lam.size
    if not 1 <= m <= n:
        raise DomainError(f"cone index m={m} outside [1, {n}]")
    s = elementary_symmetric_all(lam)
    positive = s > 0
    j = 0
    while j + 1 <= n and positive[j + 1]:
        j += 1
    return ConeReport(m=m, member=bool(np.all(positive[: m + 1])), k_max=j - 1, values=s)


def subset_sum_oracle(lam, l: int) -> float:
    """S_l by explicit enumeration of l-subsets. Test use only, n <= 8."""
    from itertools import combinations

    lam = as_curvatures(lam)
    if lam.size > 8:
        raise DomainError("enumeration oracle limited to n <= 8")
    return float(sum(np.prod(lam[list(c)]) for c in combinations(range(lam.size), l)))
