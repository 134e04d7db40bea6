"""Full versus eliminated steady occupation of the partner mode over a coupling sweep."""

import argparse

import numpy as np

from cavity_elimination import SystemParams, compare_eliminated


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, default=1e-3)
    ap.add_argument("--n-b", type=float, default=1.0)
    args = ap.parse_args()
    p = SystemParams(gamma=args.gamma, n_th_b=args.n_b)
    report = compare_eliminated(p, np.geomspace(1e-3, 0.3, 12))
    predicted = 4 * report.g_values**2 / (1 + p.gamma)
    print(f"{'G/kappa':>10} {'full':>14} {'eliminated':>14} {'rel error':>12} {'4G^2/(1+g)':>12}")
    for row in zip(report.g_values, report.full_occupation, report.eliminated_occupation,
                   report.rel_errors, predicted):
        print("{:10.4e} {:14.10f} {:14.10f} {:12.4e} {:12.4e}".format(*row))
    print(f"fitted exponent: {report.scaling_exponent:.6f}")


if __name__ == "__main__":
    main()
