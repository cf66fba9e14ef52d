"""Curvature of a general graph x_{n+1} = u(x) from its 2-jet.

The eigenvalue route is the one used by the rest of the package. The
generalized Kronecker delta contraction is kept as a brute-force check
(factorial cost, n <= 8).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from math import factorial

import numpy as np

from . import symfunc
from .errors import DomainError, SingularDenominator

DELTA_MAX_N = 8


@dataclass(frozen=True)
class GraphJet:
    grad: np.ndarray
    hess: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grad, dtype=float)
        h = np.asarray(self.hess, dtype=float)
        if g.ndim != 1 or h.shape != (g.size, g.size):
            raise DomainError(f"incompatible jet shapes {g.shape}, {h.shape}")
        if not np.allclose(h, h.T, rtol=0, atol=1e-14):
            raise DomainError("hessian is not symmetric")
        object.__setattr__(self, "grad", g)
        object.__setattr__(self, "hess", h)

    @property
    def n(self):
        return self.grad.size


def _projector(grad):
    w2 = 1.0 + grad @ grad
    return np.eye(grad.size) - np.outer(grad, grad) / w2, np.sqrt(w2)


def weingarten(jet: GraphJet) -> np.ndarray:
    """Mixed Weingarten coefficients for the upward normal.

    ``h[l, i] = (delta^{lk} - D^l u D^k u / W^2) D_{ki} u / W`` with
    ``W = sqrt(1 + |Du|^2)``.
    """
    p, w = _projector(jet.grad)
    return p @ jet.hess / w


def principal_curvatures(jet: GraphJet) -> np.ndarray:
    # P^{1/2} D^2u P^{1/2} / W is symmetric and similar to the Weingarten matrix
    g = jet.grad
    w = np.sqrt(1.0 + g @ g)
    gn = np.linalg.norm(g)
    root = np.eye(g.size)
    if gn > 0:
        e = g / gn
        root += (1.0 / w - 1.0) * np.outer(e, e)
    sym = root @ jet.hess @ root / w
    try:
        return np.linalg.eigvalsh(0.5 * (sym + sym.T))
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"eigenvalue computation failed: {exc}") from exc


def kronecker_delta(upper, lower) -> int:
    """Generalized Kronecker delta: sign of the permutation taking ``lower`` to ``upper``."""
    if len(set(lower)) != len(lower) or sorted(upper) != sorted(lower):
        return 0
    pos = {v: i for i, v in enumerate(lower)}
    perm = [pos[v] for v in upper]
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def _delta_terms(n, l):
    # Nonzero deltas need distinct lower indices with the upper ones a
    # permutation of them. Reordering both index lists together leaves each
    # term unchanged, so one ordering per subset is summed and the result
    # scaled by l! below.
    rows, cols, signs = [], [], []
    for subset in combinations(range(n), l):
        for up in permutations(subset):
            rows.append(subset)
            cols.append(up)
            signs.append(kronecker_delta(up, subset))
    return np.array(rows, dtype=int), np.array(cols, dtype=int), np.array(signs, dtype=float)


def delta_contraction(h: np.ndarray, l: int) -> float:
    """Full contraction delta^{l_1..l_l}_{i_1..i_l} h^{l_1}_{i_1} ... h^{l_l}_{i_l}.

    The 1/l! normalization is not applied here.
    """
    n = h.shape[0]
    if n > DELTA_MAX_N:
        raise DomainError(f"delta contraction limited to n <= {DELTA_MAX_N}")
    if l == 0:
        return 1.0
    rows, cols, signs = _delta_terms(n, l)
    # h indexed [upper, lower]
    terms = np.prod(h[cols, rows], axis=1)
    return float(factorial(l) * np.dot(signs, terms))


def graph_s_l(jet: GraphJet, l: int, method: str = "eigen", cross_check: bool = False) -> float:
    """S_l of the Weingarten map.

    ``method="delta"`` uses the Kronecker-delta contraction divided by l!.
    With ``cross_check`` both routes are evaluated and must agree to 1e-9
    (relative to max(1, |S_l|)); the eigenvalue value is returned.
    """
    n = jet.n
    if not 0 <= l <= n:
        raise DomainError(f"order l={l} outside [0, {n}]")
    if method == "delta":
        return delta_contraction(weingarten(jet), l) / factorial(l)
    if method != "eigen":
        raise ValueError(f"unknown method {method!r}")
    value = symfunc.elementary_symmetric(principal_curvatures(jet), l)
    if cross_check and n <= DELTA_MAX_N:
        other = delta_contraction(weingarten(jet), l) / factorial(l)
        if abs(other - value) > 1e-9 * max(1.0, abs(value)):
            raise ArithmeticError(f"S_{l}: eigen {value!r} vs delta {other!r}")
    return value


def graph_residual(jet: GraphJet, k: int) -> float:
    """Q_k(Du, D^2u) - 1/sqrt(1 + |Du|^2); zero on a translator."""
    lam = principal_curvatures(jet)
    s = symfunc.elementary_symmetric_all(lam)
    if abs(s[k]) < symfunc.ZERO_GUARD:
        raise SingularDenominator(f"S_{k} vanishes ({s[k]!r})", value=s[k])
    return float(s[k + 1] / s[k] - 1.0 / np.sqrt(1.0 + jet.grad @ jet.grad))


def radial_jet(n, r, du, ddu, direction=None) -> GraphJet:
    """2-jet at ``r * direction`` of the radial function with derivatives du, ddu."""
    if r <= 0:
        raise DomainError("radial_jet needs r > 0")
    e = np.zeros(n)
    e[0] = 1.0
    if direction is not None:
        e = np.asarray(direction, dtype=float)
        e = e / np.linalg.norm(e)
    radial = np.outer(e, e)
    hess = ddu * radial + (du / r) * (np.eye(n) - radial)
    return GraphJet(grad=du * e, hess=hess)
