"""Fixed-point construction of the k = n-1 profile slope near the axis.

The integral operator

    T(v)(r) = int_0^r v (1 + v^2) / (v - (n-1) s) ds

acts on node values over a uniform grid of [0, delta]. Its fixed point is the
profile slope v = u'.

The window used here is n r <= v <= tan(n r). The lower edge n r is the
sub-solution w0; the set sqrt(r) <= v <= tan(n r) is empty near r = 0 because
sqrt(r) > tan(n r) there (see ``sqrt_window_gap``).

Near the axis the derivative of the integrand with respect to v is about
-(n-1)/s. T is therefore not a sup-norm contraction on any [0, delta], and
plain iteration v <- T(v) stalls or diverges for n >= 3. The default
iteration is relaxed, v <- (1 - alpha) v + alpha T(v), with
alpha = 3/(n+2). On the leading r^3 mode T acts as c -> A - (n-1) c / 3,
and this alpha removes that mode in one step while keeping the iterates
inside the window. Higher modes r^p are scaled by 1 - alpha (1 + (n-1)/p),
so the asymptotic rate is 1 - alpha = (n-1)/(n+2); see
``linearized_spectral_radius``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConvergenceError, DomainError, WindowViolation
from .report import ResidualReport
from .rosgeom import ProfileCurve

MIN_INTERVALS = 512
STOP_TOL = 1e-13
MAX_ITER = 200


def delta_bound(n: int) -> float:
    if n < 2:
        raise DomainError(f"n={n} < 2")
    return min(np.arccos(np.sqrt(n / (n + 1))) / n, 1.0 / n ** 2)


def contraction_bound(n: int, delta: float) -> float:
    """delta * [(n-1) + 2 sup tan^3(nr)/r + 3(n-1) sup tan^2(nr)] with sups at r = delta."""
    t = np.tan(n * delta)
    return float(delta * ((n - 1) + 2.0 * t ** 3 / delta + 3.0 * (n - 1) * t ** 2))


@dataclass(frozen=True)
class WindowX:
    n: int
    delta: float
    intervals: int = 1024

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"n={self.n} < 2")
        if not 0 < self.delta <= delta_bound(self.n) * (1 + 1e-15):
            raise DomainError(f"delta={self.delta} outside (0, {delta_bound(self.n)}]")
        if self.intervals < MIN_INTERVALS or self.intervals % 2:
            raise DomainError(f"need an even interval count >= {MIN_INTERVALS}, got {self.intervals}")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.delta, self.intervals + 1)

    def lower(self, r):
        return self.n * np.asarray(r)

    def upper(self, r):
        return np.tan(self.n * np.asarray(r))

    def refined(self) -> "WindowX":
        return WindowX(self.n, self.delta, 2 * self.intervals)


def sqrt_window_gap(n: int, delta: float, m: int = 1000) -> float:
    """max over (0, delta] of sqrt(r) - tan(n r); positive means that window is empty there."""
    r = np.linspace(delta / m, delta, m)
    return float(np.max(np.sqrt(r) - np.tan(n * r)))


def contraction_coefficient(window: WindowX) -> float:
    return contraction_bound(window.n, window.delta)


def shrink_to_contraction(n: int, intervals: int = 1024) -> WindowX:
    """Halve delta from delta_bound(n) until contraction_bound < 1."""
    delta = delta_bound(n)
    while contraction_bound(n, delta) >= 1.0:
        delta *= 0.5
    return WindowX(n, delta, intervals)


def window_check(window: WindowX, v, rtol: float = 1e-13) -> None:
    """Raise WindowViolation at the first node outside n r <= v <= tan(n r)."""
    r = window.grid
    v = np.asarray(v, dtype=float)
    if v.shape != r.shape:
        raise DomainError(f"expected {r.size} node values, got {v.shape}")
    lo, hi = window.lower(r), window.upper(r)
    bad = (v < lo - rtol * lo) | (v > hi + rtol * hi) | ~np.isfinite(v)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise WindowViolation(f"node {i} (r={r[i]:.6g}) has v={v[i]:.17g} outside "
                              f"[{lo[i]:.17g}, {hi[i]:.17g}]", node=i, radius=r[i], value=v[i])


def cumulative_simpson(f, h) -> np.ndarray:
    """Running integral of node values ``f`` on a uniform grid, exact for cubics at even nodes.

    Even nodes use composite Simpson. An odd node adds to the previous even
    node the integral over one interval of the parabola through that node
    and its two neighbours, which is exact for quadratics. Partial sums are
    accumulated left to right.
    """
    f = np.asarray(f, dtype=float)
    if (f.size - 1) % 2:
        raise DomainError("cumulative_simpson needs an even number of intervals")
    out = np.zeros_like(f)
    out[2::2] = np.cumsum(h / 3.0 * (f[0:-2:2] + 4.0 * f[1:-1:2] + f[2::2]))
    out[1::2] = out[0:-2:2] + h / 12.0 * (5.0 * f[0:-2:2] + 8.0 * f[1:-1:2] - f[2::2])
    return out


def integrand(window: WindowX, v) -> np.ndarray:
    r = window.grid
    n = window.n
    f = np.empty_like(r)
    # on the window v/r -> n at the axis, so the integrand tends to n
    f[0] = n
    vi = v[1:]
    f[1:] = vi * (1.0 + vi * vi) / (vi - (n - 1) * r[1:])
    return f


def apply_T(window: WindowX, v, check: bool = True) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if check:
        window_check(window, v)
    return cumulative_simpson(integrand(window, v), window.delta / window.intervals)


@dataclass
class IterationTrace:
    sup_diffs: list = field(default_factory=list)
    relaxation: float = 1.0
    converged: bool = False

    @property
    def contraction_ratios(self) -> list:
        d = self.sup_diffs
        return [d[i + 1] / d[i] for i in range(len(d) - 1) if d[i] > 0]

    # node values are O(1) and summed over ~10^3 nodes, so differences below
    # about 1e-14 are round-off
    def asymptotic_ratio(self, floor: float = 1e-14) -> float:
        """Geometric-mean ratio over the tail of steps that stay above ``floor``.

        The tail is the second half of those steps, which leaves out the
        transient and the round-off plateau.
        """
        d = [x for x in self.sup_diffs if x > floor]
        if len(d) < 3:
            return 0.0
        tail = d[len(d) // 2:]
        if len(tail) < 2:
            tail = d[-2:]
        return float((tail[-1] / tail[0]) ** (1.0 / (len(tail) - 1)))

    def tail_max_ratio(self, floor: float = 1e-14) -> float:
        """Largest single-step ratio over the same tail as ``asymptotic_ratio``.

        This is the quantity to compare with a bound that the ratios must
        eventually respect.
        """
        d = [x for x in self.sup_diffs if x > floor]
        if len(d) < 3:
            return 0.0
        tail = d[len(d) // 2:]
        if len(tail) < 2:
            tail = d[-2:]
        return float(max(b / a for a, b in zip(tail, tail[1:])))


def default_relaxation(n: int) -> float:
    return min(1.0, 3.0 / (n + 2))


def initial_guess(window: WindowX) -> np.ndarray:
    return window.lower(window.grid).astype(float)


def iterate_to_fixed_point(window: WindowX, v_init=None, relaxation: Optional[float] = None,
                           tol: float = STOP_TOL, max_iter: int = MAX_ITER):
    """Iterate v <- (1 - alpha) v + alpha T(v) from ``v_init`` (default n r).

    ``relaxation=1`` is plain Picard iteration. Every iterate is checked
    against the window and a violation is raised, not clipped. Returns
    ``(curve, trace)`` with a picard-provenance curve (u by cumulative Simpson
    of v, u'' from the profile equation).
    """
    n = window.n
    alpha = default_relaxation(n) if relaxation is None else float(relaxation)
    if not 0 < alpha <= 1:
        raise DomainError(f"relaxation {alpha} outside (0, 1]")
    v = initial_guess(window) if v_init is None else np.array(v_init, dtype=float)
    window_check(window, v)
    trace = IterationTrace(relaxation=alpha)
    for _ in range(max_iter):
        new = (1.0 - alpha) * v + alpha * apply_T(window, v, check=False)
        try:
            window_check(window, new)
        except WindowViolation as exc:
            raise ConvergenceError(f"iterate left the window: {exc}", trace=trace) from exc
        diff = float(np.max(np.abs(new - v)))
        trace.sup_diffs.append(diff)
        v = new
        if diff < tol:
            trace.converged = True
            break
    if not trace.converged:
        raise ConvergenceError(f"no convergence in {max_iter} iterations "
                               f"(last sup-difference {trace.sup_diffs[-1]:.3e})", trace=trace)
    return _as_curve(window, v), trace


def _as_curve(window, v):
    r = window.grid
    n = window.n
    ddu = integrand(window, v)
    u = cumulative_simpson(v, window.delta / window.intervals)
    return ProfileCurve(r, u, v, ddu, n, n - 1, provenance="picard")


def linearized_spectral_radius(window: WindowX, v, relaxation: Optional[float] = None) -> float:
    """Spectral radius of the derivative of the relaxed map at node values ``v``.

    Node 0 is pinned (the integrand there is fixed at n), so it is left out.
    Dense eigenvalue solve: keep ``window.intervals`` modest.
    """
    n = window.n
    alpha = default_relaxation(n) if relaxation is None else float(relaxation)
    r, v = window.grid, np.asarray(v, dtype=float)
    h = window.delta / window.intervals
    g = np.zeros_like(r)
    vi, s = v[1:], r[1:]
    den = vi - (n - 1) * s
    g[1:] = ((1.0 + 3.0 * vi * vi) * den - vi * (1.0 + vi * vi)) / den ** 2
    # cumulative_simpson is linear, so its matrix is the image of the identity
    jac = np.column_stack([cumulative_simpson(col, h) for col in np.diag(g)])
    m = (1.0 - alpha) * np.eye(r.size) + alpha * jac
    return float(np.max(np.abs(np.linalg.eigvals(m[1:, 1:]))))


def derivative_bound_check(curve: ProfileCurve) -> ResidualReport:
    """Check v' <= sec^2(nr) tan(nr) / r at interior nodes, v' by finite differences."""
    r, v, n = curve.r, curve.du, curve.n
    dv = np.gradient(v, r, edge_order=2)
    ri = r[1:-1]
    bound = np.tan(n * ri) / (np.cos(n * ri) ** 2 * ri)
    return ResidualReport("derivative_bound", ri, bound - dv[1:-1], tol=0.0)
