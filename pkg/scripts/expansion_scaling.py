"""Residual of the truncated delta expansion as the cavity damping grows."""

import argparse

from cavity_elimination import TestFunction, convolution_expansion_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--width", type=float, default=100.0)
    ap.add_argument("--t-eval", type=float, default=100.0)
    ap.add_argument("--kernel", choices=["retarded", "symmetric"], default="retarded")
    args = ap.parse_args()
    g = TestFunction("gaussian", width=args.width)
    previous = {}
    for kappa in (0.5, 1.0, 2.0, 4.0, 8.0):
        line = [f"kappa {kappa:4.1f}"]
        for order in (1, 2):
            res = convolution_expansion_check(g, order, args.t_eval, kappa, args.kernel).residual
            ratio = previous[order] / res if order in previous else float("nan")
            previous[order] = res
            line.append(f"order {order}: {res:.4e} (x{ratio:.2f})")
        print("   ".join(line))


if __name__ == "__main__":
    main()
