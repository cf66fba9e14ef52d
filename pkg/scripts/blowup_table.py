"""Blow-up radius of the k = n-1 profile: shooting against the closed form.

    python3 scripts/blowup_table.py [--n-max 8]
"""
import argparse
import time

from qklab import exact, shoot


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=8)
    args = ap.parse_args()
    print(f"{'n':>2} {'shooting R':>18} {'closed form':>18} {'|diff|':>9} {'1/n':>8} {'u=10 at':>9} {'sec':>6}")
    for n in range(2, args.n_max + 1):
        t0 = time.perf_counter()
        curve, report = shoot.integrate(shoot.SlopeField(n, n - 1))
        dt = time.perf_counter() - t0
        closed = exact.blowup_radius(n)
        hit = next((r for r, u in zip(curve.r, curve.u) if u >= 10), float("nan"))
        print(f"{n:>2} {report.radius_estimate:18.14f} {closed:18.14f} {abs(report.radius_estimate - closed):9.1e} "
              f"{1 / n:8.5f} {hit:9.5f} {dt:6.2f}")


if __name__ == "__main__":
    main()
