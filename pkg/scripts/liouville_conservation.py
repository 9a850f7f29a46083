"""Energy and quadratic-integral drift along a Liouville geodesic, by step size and order."""

import argparse

from hydrotorus import flow
from hydrotorus.metric import LiouvilleSpec
from hydrotorus.reducibility import conformal_metric_of, liouville_quadratic_integral


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=float, default=10.0)
    ap.add_argument("--dts", type=float, nargs="+", default=[1e-2, 5e-3, 2e-3, 1e-3])
    ap.add_argument("--init", default="0.1,0.2,0.6,0.8")
    args = ap.parse_args()

    spec = LiouvilleSpec.from_strings("2+cos(2*pi*xi)", "2+sin(2*pi*xi)", (1, 0, 0, 1))
    metric = conformal_metric_of(spec)
    F2 = liouville_quadratic_integral(spec)
    u1, u2, p1, p2 = (float(v) for v in args.init.split(","))
    start = flow.PhaseState((u1, u2), (p1, p2))
    print(f"{'order':>5} {'dt':>8} {'H drift':>10} {'F2 drift':>10}")
    for order in (2, 4):
        for dt in args.dts:
            steps = int(round(args.T / dt))
            traj = flow.integrate(metric, start, args.T, dt, [F2], stride=max(1, steps // 100), order=order)
            dH, dF = (d.max_drift for d in flow.conservation_report(traj, ["F2"]))
            print(f"{order:5d} {dt:8.0e} {dH:10.2e} {dF:10.2e}")


if __name__ == "__main__":
    main()
