"""Truncated BCH series against the principal log of U_F, for a few tau.

Prints the max-entry error per truncation order and the successive ratios;
with --out also saves a semilog plot.
"""

import argparse
import warnings

import numpy as np

from tlfloquet.floquet_spectral import DivergentSeriesWarning, FloquetParams, partial_sum_norms, series_error_curve


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--s-max", type=int, default=16)
    ap.add_argument("--taus", type=float, nargs="+", default=[0.3, 0.5, 0.8, 1.2])
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    curves = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DivergentSeriesWarning)
        warnings.simplefilter("ignore", RuntimeWarning)
        for tau in args.taus:
            prm = FloquetParams.from_tau(tau)
            err = series_error_curve(prm, args.n, args.s_max)
            norms = partial_sum_norms(prm, args.n, args.s_max)
            curves[tau] = err
            print(f"tau={tau}")
            print("   s        error      ratio   partial-sum norm")
            for s, (e, m) in enumerate(zip(err, norms)):
                r = err[s] / err[s - 1] if s else float("nan")
                print(f"  {s:2d}  {e:11.3e}  {r:9.3f}  {m:12.4e}")

    if args.out:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 4))
        for tau, err in curves.items():
            ax.semilogy(np.arange(len(err)), err, "o-", label=f"tau={tau:g}")
        ax.set(xlabel="s_max", ylabel="max |series - log U|")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.out, dpi=150)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
