"""Near-solution counts on [0, N] with t2 = 0, t4 = N^3 and their log-log slope."""
import argparse
import time

from quarticsum.diophantine import BoxQuery, count_spectral
from quarticsum.expsum import IntRange
from quarticsum.moments import fit_exponent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128])
    ap.add_argument("--t4-power", type=int, default=3)
    args = ap.parse_args()

    samples = []
    print("N,count,count/N^3,seconds")
    for N in args.sizes:
        t = time.perf_counter()
        c = count_spectral(BoxQuery(args.p, IntRange.closed(0, N), 0, N**args.t4_power)).count
        samples.append((N, c))
        print(f"{N},{c},{c / N**3:.4f},{time.perf_counter() - t:.2f}")
    slope, intercept, resid = fit_exponent(samples)
    print(f"# slope {slope:.4f} intercept {intercept:.4f} rms {resid:.2e}")


if __name__ == "__main__":
    main()
