"""Cut-off commutator against bandwidth, closed form beside quadrature."""

import argparse

import numpy as np

from cavity_elimination import commutator_cutoff, integrate_lorentzian


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega-c", type=float, default=1e3)
    ap.add_argument("--points", type=int, default=25)
    args = ap.parse_args()
    print(f"{'Omega/kappa':>12} {'closed form':>20} {'quadrature':>20} {'|diff|':>10}")
    for x in np.geomspace(10, 1e6, args.points):
        closed = commutator_cutoff(args.omega_c, x)
        quad = integrate_lorentzian(args.omega_c, x)
        print(f"{x:12.4e} {closed:20.16f} {quad:20.16f} {abs(closed - quad):10.2e}")


if __name__ == "__main__":
    main()
