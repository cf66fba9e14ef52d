"""First-touch demonstrations: the k = n-1 profile lowered onto entire candidates.

    python3 scripts/tangency_demo.py [--n 3]
"""
import argparse

import numpy as np

from qklab import shoot, tangency
from qklab.rosgeom import ProfileCurve


def paraboloid(n, a, radius=2.0):
    r = np.linspace(0.0, radius, 4001)
    return ProfileCurve(r, a * r * r, 2 * a * r, np.full_like(r, 2 * a), n, n - 1, provenance="barrier")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=3)
    n = ap.parse_args().n
    translator, _ = shoot.integrate(shoot.SlopeField(n, n - 1))
    bowl, _ = shoot.integrate(shoot.SlopeField(n, 0), shoot.IntegrationConfig(r_max=2.0))
    for label, cand in [("bowl (k=0)", bowl), ("paraboloid 1 r^2", paraboloid(n, 1.0)),
                        (f"paraboloid {n} r^2", paraboloid(n, float(n)))]:
        _, text = tangency.nonexistence_demo(n, cand, translator=translator)
        print(f"--- candidate: {label}")
        print(text)


if __name__ == "__main__":
    main()
