"""Both sides of the k-th power Weyl bound for a few alpha, plus the near-integer count."""
import argparse
import math
from fractions import Fraction

from quarticsum.weyl import theorem4_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=8)
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 20, 40])
    ap.add_argument("--epsilon", type=float, default=0.01)
    args = ap.parse_args()

    golden = Fraction((math.sqrt(5) - 1) / 2)
    alphas = {"0": Fraction(0), "1/3": Fraction(1, 3), "golden": golden, "1/997": Fraction(1, 997)}
    print("alpha,N,|S|,rhs,ratio,B,H,q,q_window,theta_window")
    for name, a in alphas.items():
        for N in args.sizes:
            r = theorem4_report(args.k, N, a, args.epsilon)
            print(
                f"{name},{N},{r.lhs:.4f},{r.rhs:.4f},{r.ratio:.4f},{r.B},{r.H},"
                f"{r.approx.q},{r.q_window},{r.theta_window}"
            )


if __name__ == "__main__":
    main()
