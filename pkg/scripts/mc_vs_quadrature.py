"""Monte Carlo cavity correlation from synthesized bath noise against quadrature."""

import argparse
import math
import time

import numpy as np

from cavity_elimination import integrate_f, mc_correlation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega-c", type=float, default=1e3)
    ap.add_argument("--omega-cap", type=float, default=1e4)
    ap.add_argument("--d-omega", type=float, default=0.25)
    ap.add_argument("--n-traj", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()
    lags = [0.0, 1.0, 2.0, 5.0]
    start = time.perf_counter()
    series = mc_correlation(args.omega_cap, args.d_omega, 1.0, args.n_traj, lags, args.seed,
                            omega_c=args.omega_c, threads=args.threads)
    quad = np.array([integrate_f(dt, args.omega_c, args.omega_cap) for dt in lags]) / (2 * math.pi)
    for lag, v, se, q in zip(lags, series.values, series.stderr, quad):
        print(f"lag {lag:4.1f}  mc {v.real:+.6f}{v.imag:+.6f}j  quad {q.real:+.6f}{q.imag:+.6f}j  "
              f"z {abs(v - q) / se:5.2f}")
    print(f"{time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
