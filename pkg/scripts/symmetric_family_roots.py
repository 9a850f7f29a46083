"""Exact real-root counts for the two symmetric quartic families s^4 + 2k s^3 - 6 s^2 - 2k s -+ 1."""

import argparse

from hydrotorus.exact import sturm_real_root_count, symmetric_quartic_minus, symmetric_quartic_plus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=10)
    args = ap.parse_args()
    print(f"{'k':>4} {'const -1':>9} {'const +1':>9}")
    for k in range(-args.kmax, args.kmax + 1):
        m = sturm_real_root_count(symmetric_quartic_minus(k))
        p = sturm_real_root_count(symmetric_quartic_plus(k))
        print(f"{k:4d} {m:9d} {p:9d}")


if __name__ == "__main__":
    main()
