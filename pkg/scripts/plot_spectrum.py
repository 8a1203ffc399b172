"""Single-particle Floquet dispersion for several tau, real and imaginary parts.

    python scripts/plot_spectrum.py --n 256 --out spectrum.png
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from tlfloquet.floquet_spectral import FloquetParams, region_spectrum


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--taus", type=float, nargs="+", default=[1e-4, 0.5, 0.9, 1.0, 1.5, 2.0])
    ap.add_argument("--out", default="spectrum.png")
    args = ap.parse_args()

    fig, (ax_re, ax_im) = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    for tau in args.taus:
        rows = region_spectrum(FloquetParams.from_tau(tau), args.n).rows
        p = np.array([r.p for r in rows])
        eps = np.array([r.eps_plus for r in rows])
        ax_re.plot(p, eps.real, label=f"tau={tau:g}")
        ax_im.plot(p, eps.imag)
    ax_re.set(xlabel="p", ylabel="Re eps(p)")
    ax_im.set(xlabel="p", ylabel="Im eps(p)")
    ax_re.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
