"""Residual of the stationary-phase dual sum over a random sample of alpha.

Shows that |direct - dual| is an O(1) quantity that fluctuates with alpha and
N rather than growing, which is why ratios of single residuals are noisy.
"""
import argparse

import numpy as np

from quarticsum.stationary_phase import SmoothPhase, b_transform_residual, residual_envelope


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024])
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--gamma-frac", type=float, default=0.0, help="gamma as a fraction of its boundary")
    ap.add_argument("--normalization", choices=("sqrt", "linear"), default="sqrt")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    alphas = rng.uniform(0.05, 0.5, args.samples)
    print("N,mean_residual,max_residual,min_envelope")
    for N in args.sizes:
        res, env = [], []
        for a in alphas:
            ph = SmoothPhase(a, args.gamma_frac * a / (96 * N**2), N)
            res.append(b_transform_residual(ph, args.normalization)[2])
            env.append(residual_envelope(N, ph.lambda2))
        print(f"{N},{np.mean(res):.4f},{np.max(res):.4f},{np.min(env):.2f}")


if __name__ == "__main__":
    main()
