"""Bound on the cut-off versus white-noise correlation difference."""

import argparse
import math

import numpy as np

from cavity_elimination import CutoffSpec, d_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega-c", type=float, default=1e3)
    ap.add_argument("--points", type=int, default=25)
    args = ap.parse_args()
    edge = args.omega_c * (1 + math.sqrt(2))
    print(f"bound valid for Omega/kappa > {edge:.6g}")
    for x in np.geomspace(1e3, 1e7, args.points):
        if CutoffSpec(x, args.omega_c).d_bound_valid:
            print(f"{x:12.4e} {d_bound(args.omega_c, x):.6e}")
        else:
            print(f"{x:12.4e} {'(invalid)':>12}")


if __name__ == "__main__":
    main()
