"""Sweep I(N): the 2p-th moment over alpha in [0, 1], |gamma| <= N^-3, n in (N, 2N]."""
import argparse
import math

from quarticsum.moments import fit_exponent, integral_I, integral_R


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 32, 64])
    ap.add_argument("--with-R", action="store_true", help="also the Delta = 1/4 slab by quadrature (N <= 32)")
    args = ap.parse_args()

    rows = []
    print("N,I,log_I")
    for N in args.sizes:
        v = integral_I(N, args.p).value
        rows.append((N, v))
        print(f"{N},{v!r},{math.log(v)!r}")
    slope, _, resid = fit_exponent(rows)
    print(f"# slope {slope:.4f} rms {resid:.2e}")

    if args.with_R:
        print("N,R,ratio")
        for N in args.sizes:
            if N <= 32:
                r = integral_R(0.25, N, args.p)
                print(f"{N},{r.value!r},{r.ratio!r}")


if __name__ == "__main__":
    main()
