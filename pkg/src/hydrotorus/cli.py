"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import exact, expr, flow, reducibility, regions
from .config import ConfigError, header_line, load_integral, load_metric, run_header
from .integral import bracket_residual
from .metric import ConformalMetric

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        n1, n2 = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 64x64, got {text!r}")
    if n1 <= 0 or n2 <= 0:
        raise argparse.ArgumentTypeError("grid sizes must be positive")
    return n1, n2


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _metric_and_integral(args, need_integral: bool = True):
    if not args.metric:
        raise UsageError("--metric is required")
    mcfg, mraw = load_metric(args.metric)
    metric = mcfg.build()
    parts = [mraw]
    F = None
    if args.integral:
        icfg, iraw = load_integral(args.integral)
        F = icfg.build(mcfg.periods)
        parts.append(iraw)
    elif mcfg.kind == "liouville":
        F = reducibility.liouville_quadratic_integral(mcfg.liouville(), mcfg.periods)
        parts.append(b"liouville-quadratic")
    elif need_integral:
        raise UsageError("--integral is required")
    return mcfg, metric, F, parts


def cmd_classify(args) -> int:
    _, metric, F, parts = _metric_and_integral(args)
    rmap = regions.scan_torus(F, metric, args.grid, tol=args.tol, threads=args.threads)
    head = header_line(run_header(parts + [args.grid, args.tol], args.seed))
    prefix = args.out or "regions"
    regions.write_pgm(rmap, prefix + ".pgm", head)
    regions.write_csv(rmap, prefix + ".csv", head)
    comps = regions.connected_components(rmap)
    _emit({"counts": rmap.counts(), "elliptic_components": len(comps),
           "failures": len(rmap.failures), "outputs": [prefix + ".pgm", prefix + ".csv"]}, None)
    return OK


def cmd_verify_bracket(args) -> int:
    _, metric, F, parts = _metric_and_integral(args)
    tol = args.tol if args.tol is not None else 1e-8
    n1, n2 = args.grid
    L1, L2 = metric.periods
    worst, where = 0.0, (0.0, 0.0)
    for i in range(n1):
        for j in range(n2):
            p = (i * L1 / n1, j * L2 / n2)
            r = float(np.max(np.abs(bracket_residual(F, metric, p))))
            if r > worst:
                worst, where = r, p
    rep = {"header": run_header(parts + [args.grid], args.seed), "max_residual": worst,
           "location": list(where), "tolerance": tol, "passed": worst <= tol}
    _emit(rep, args.out)
    return OK if rep["passed"] else FAILED


def cmd_simple_wave(args) -> int:
    try:
        prof = expr.Profile.from_string(args.profile)
    except expr.ExpressionError as exc:
        raise UsageError(str(exc))
    sol = reducibility.simple_wave(args.lam, prof)
    nodes = args.nodes
    xi = np.arange(nodes) / nodes
    res = reducibility.simple_wave_residuals(sol, xi)
    cert = reducibility.verify_cubic_identity(sol, nodes)
    tol = args.tol if args.tol is not None else 1e-8
    passed = res["ode"] <= tol and res["eigenvector"] <= tol and cert.passed
    head = run_header([args.lam, args.profile, nodes], args.seed)
    report = {"header": head, "lambda": sol.lam, "c1": sol.c1, "c2": sol.c2, "c3": sol.c3,
              "residuals": res, "certificate": cert.to_dict(), "passed": passed}
    if args.out:
        lines = ["# " + header_line(head), "xi,a0,a1,a2"]
        a0, a1, a2 = sol.a0(xi), sol.a1(xi), sol.a2(xi)
        for k in range(nodes):
            lines.append(",".join("%.17g" % v for v in (xi[k], a0[k], a1[k], a2[k])))
        Path(args.out).write_text("\n".join(lines) + "\n")
    _emit(report, args.report)
    return OK if passed else FAILED


def cmd_verify_identity(args) -> int:
    if args.kind == "cubic":
        if args.lam is None or args.profile is None:
            raise UsageError("cubic identity needs --lambda and --profile")
        sol = reducibility.simple_wave(args.lam, args.profile)
        cert = reducibility.verify_cubic_identity(sol, args.nodes)
        head = run_header([args.lam, args.profile, args.nodes], args.seed)
    else:
        mcfg, metric, F4, parts = _metric_and_integral(args)
        if args.sub:
            scfg, sraw = load_integral(args.sub)
            F2 = scfg.build(mcfg.periods)
            parts.append(sraw)
        elif mcfg.kind == "liouville":
            F2 = reducibility.liouville_quadratic_integral(mcfg.liouville(), mcfg.periods)
        else:
            raise UsageError("quartic identity needs --sub for a non-Liouville metric")
        tol = args.tol if args.tol is not None else 1e-10
        cert = reducibility.verify_quartic_identity(F4, F2, metric, args.grid, tol)
        head = run_header(parts + [args.grid], args.seed)
    _emit({"header": head, "certificate": cert.to_dict()}, args.out)
    return OK if cert.passed else FAILED


def cmd_flow(args) -> int:
    mcfg, metric, F, parts = _metric_and_integral(args, need_integral=False)
    try:
        u1, u2, p1, p2 = (float(v) for v in args.init.split(","))
    except ValueError:
        raise UsageError("--init must be u1,u2,p1,p2")
    monitors = [F] if F is not None else []
    traj = flow.integrate(metric, flow.PhaseState((u1, u2), (p1, p2)), args.T, args.dt,
                          monitors, stride=args.stride, order=args.order)
    head = run_header(parts + [args.init, args.T, args.dt, args.stride, args.order], args.seed)
    if args.out:
        flow.write_ndjson(traj, args.out, head)
    drifts = flow.conservation_report(traj)
    passed = args.tol is None or all(d.max_drift <= args.tol for d in drifts)
    _emit({"header": head, "drift": [d.__dict__ for d in drifts], "tolerance": args.tol,
           "passed": passed}, args.report)
    return OK if passed else FAILED


def cmd_exact_check(args) -> int:
    seed = 0 if args.seed is None else args.seed
    rep = exact.verify_displayed_identities(args.trials, seed)
    out = rep.to_dict()
    out["header"] = run_header(["exact-check", args.trials], seed)
    _emit(out, args.out)
    return OK if rep.ok else FAILED


def cmd_elliptic_check(args) -> int:
    _, metric, F, parts = _metric_and_integral(args)
    rmap = regions.scan_torus(F, metric, args.grid, threads=args.threads)
    rep = regions.constancy_and_transport_check(rmap, metric, F)
    tol = args.tol if args.tol is not None else 1e-8
    out = rep.to_dict()
    out["header"] = run_header(parts + [args.grid], args.seed)
    out["tolerance"] = tol
    passed = rep.applicable and all(
        c["u_deviation"] <= tol and c["v_deviation"] <= tol and c.get("max_abs_v", 0.0) <= tol
        for c in rep.components)
    out["passed"] = passed
    _emit(out, args.out)
    return OK if passed else FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--metric", help="metric config (TOML)")
    common.add_argument("--integral", help="integral config (TOML)")
    common.add_argument("--grid", type=_grid, default=(64, 64), help="grid NxM")
    common.add_argument("--tol", type=_positive, default=None, help="verification tolerance")
    common.add_argument("--out", help="output path")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = argparse.ArgumentParser(prog="hydrotorus", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="scan and classify the torus (PGM + CSV)")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("verify-bracket", parents=[common], help="Poisson-bracket residual report")
    c.set_defaults(func=cmd_verify_bracket)

    c = sub.add_parser("simple-wave", parents=[common], help="simple-wave solution and certificate")
    c.add_argument("--lambda", dest="lam", type=float, required=True)
    c.add_argument("--profile", required=True, help="positive periodic a2(xi)")
    c.add_argument("--nodes", type=int, default=256)
    c.add_argument("--report", help="JSON report path (default stdout)")
    c.set_defaults(func=cmd_simple_wave)

    c = sub.add_parser("verify-identity", parents=[common], help="cubic or quartic reducibility certificate")
    c.add_argument("--kind", choices=("cubic", "quartic"), required=True)
    c.add_argument("--lambda", dest="lam", type=float)
    c.add_argument("--profile")
    c.add_argument("--nodes", type=int, default=256)
    c.add_argument("--sub", help="quadratic sub-integral config (TOML)")
    c.set_defaults(func=cmd_verify_identity)

    c = sub.add_parser("flow", parents=[common], help="integrate the geodesic flow (NDJSON)")
    c.add_argument("--init", required=True, help="u1,u2,p1,p2")
    c.add_argument("--T", type=_positive, default=10.0)
    c.add_argument("--dt", type=_positive, default=1e-3)
    c.add_argument("--stride", type=int, default=100)
    c.add_argument("--order", type=int, choices=(2, 4), default=2)
    c.add_argument("--report", help="JSON report path (default stdout)")
    c.set_defaults(func=cmd_flow)

    c = sub.add_parser("exact-check", parents=[common], help="exact rational identity report")
    c.add_argument("--trials", type=int, default=100)
    c.set_defaults(func=cmd_exact_check)

    c = sub.add_parser("elliptic-check", parents=[common], help="elliptic-region constancy and transport report")
    c.set_defaults(func=cmd_elliptic_check)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ConfigError, expr.ExpressionError, reducibility.FlatCaseError) as exc:
        print(f"hydrotorus: error: {exc}", file=sys.stderr)
        return USAGE
    except (ValueError, flow.FlowError, np.linalg.LinAlgError) as exc:
        print(f"hydrotorus: verification failed: {exc}", file=sys.stderr)
        return FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
