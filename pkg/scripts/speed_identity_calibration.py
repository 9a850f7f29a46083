"""Recover the constant relating 2 G4_hat - Q to gamma, then test the speed derivative.

First pass: exact rational expansion over random tuples gives the factor c.
Second pass: the closed-form d(lambda)/dr is compared with a finite-difference
reconstruction on random elliptic quartics.
"""

import argparse
import random
import sys
from pathlib import Path

import numpy as np

from hydrotorus import exact
from hydrotorus.hydro import SPEED_IDENTITY_FACTOR, genuine_nonlinearity
from hydrotorus.roots import solve_quartic

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from oracles import fd_dlam_dr, g4_coeffs, random_elliptic_quartic  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    chk = exact.check_speed_identity_factor([exact.random_tuple(rng) for _ in range(args.trials)])
    print(f"exact factor: {chk.constants}  status={chk.status}  (hard-coded: {SPEED_IDENTITY_FACTOR})")

    nrng = np.random.default_rng(args.seed)
    errs = []
    for _ in range(args.samples):
        a = random_elliptic_quartic(nrng)
        rs = solve_quartic(g4_coeffs(a))
        roots = np.array(rs.roots())
        for idx, rep in zip((2, 3), genuine_nonlinearity(a, rs)):
            fd = fd_dlam_dr(a, roots, idx)
            errs.append(abs(rep.dlam_dr - fd) / max(abs(fd), 1e-12))
    errs = np.array(errs)
    print(f"closed form vs FD: median rel err {np.median(errs):.2e}, max {errs.max():.2e} "
          f"over {errs.size} real roots")


if __name__ == "__main__":
    main()
