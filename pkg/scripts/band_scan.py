"""Scan a cubic band across the hyperbolic/elliptic boundary and locate it.

The coefficient a0 = c + A sin(2 pi x) sweeps through the value where the
fibre derivative picks up a double root; the scan's boundary is compared with
that value found by bisection on the discriminant.
"""

import argparse
import math

import numpy as np

from hydrotorus import regions
from hydrotorus.exact import RationalPoly, sturm_real_root_count
from hydrotorus.integral import IntegralCoeffs, hat_polys
from hydrotorus.metric import SemiGeodesicMetric, constant_field


def real_root_count(a0: float) -> int:
    _, G = hat_polys((a0, 0, 1, 1), 3)
    return sturm_real_root_count(RationalPoly(G.coeffs))


def crossing(lo: float, hi: float, iters: int = 60) -> float:
    n_lo = real_root_count(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if real_root_count(mid) == n_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--center", type=float, default=1.4)
    ap.add_argument("--amplitude", type=float, default=0.5)
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128, 256])
    ap.add_argument("--pgm", help="write the finest map here")
    args = ap.parse_args()

    c, A = args.center, args.amplitude
    a_star = crossing(c - A, c + A)
    u = math.asin((a_star - c) / A) / (2 * math.pi)
    expected = sorted((u % 1.0, (0.5 - u) % 1.0))
    print(f"double root at a0 = {a_star:.15f}; boundary at x = {expected[0]:.6f}, {expected[1]:.6f}")

    F = IntegralCoeffs.from_strings((f"{c} + {A}*sin(2*pi*x)", 0, 1, 1))
    metric = SemiGeodesicMetric(constant_field(1.0))
    print(f"{'n':>5} {'elliptic':>9} {'components':>11} {'max offset (cells)':>19}")
    for n in args.sizes:
        rmap = regions.scan_torus(F, metric, (16, n))
        row = rmap.classes[0]
        changes = sorted((j + 0.5) / n for j in range(n) if row[j] != row[(j + 1) % n])
        off = max(abs(g - w) * n for g, w in zip(changes, expected)) if len(changes) == 2 else np.nan
        comps = regions.connected_components(rmap)
        print(f"{n:5d} {int(np.sum(row == regions.ELL)):9d} {len(comps):11d} {off:19.3f}")
        if args.pgm and n == args.sizes[-1]:
            regions.write_pgm(rmap, args.pgm, f"band c={c} A={A}")


if __name__ == "__main__":
    main()
