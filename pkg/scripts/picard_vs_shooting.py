"""Fixed-point iteration near the axis, compared with shooting.

For each n: window size, the a priori coefficient, the relaxed iteration's
observed tail ratio and linearized rate, agreement with shooting, and what
plain iteration does.

    python3 scripts/picard_vs_shooting.py
"""
import numpy as np

from qklab import picard, shoot
from qklab.errors import ConvergenceError


def shooting_on(w):
    curve, _ = shoot.integrate(shoot.SlopeField(w.n, w.n - 1), sample_at=w.grid[1:])
    return curve.du[np.searchsorted(curve.r, w.grid)]


def main():
    print(f"{'n':>2} {'delta':>8} {'C':>6} {'alpha':>6} {'its':>4} {'tail q':>7} {'rho':>6} {'sup err':>8}  plain iteration")
    for n in range(2, 7):
        w = picard.shrink_to_contraction(n)
        curve, trace = picard.iterate_to_fixed_point(w)
        rho = picard.linearized_spectral_radius(picard.WindowX(n, w.delta, 512), curve.du[::2], trace.relaxation)
        err = np.max(np.abs(curve.du - shooting_on(w)))
        try:
            _, plain = picard.iterate_to_fixed_point(w, relaxation=1.0)
            outcome = f"converged in {len(plain.sup_diffs)} steps, tail ratio {plain.tail_max_ratio():.3f}"
        except ConvergenceError as exc:
            outcome = str(exc).split(":")[0] + f" after {len(exc.trace.sup_diffs)} steps"
        print(f"{n:>2} {w.delta:8.5f} {picard.contraction_coefficient(w):6.3f} {trace.relaxation:6.3f} "
              f"{len(trace.sup_diffs):>4} {trace.tail_max_ratio():7.3f} {rho:6.3f} {err:8.1e}  {outcome}")


if __name__ == "__main__":
    main()
