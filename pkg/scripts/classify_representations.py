"""Brute-force classification of quadratic TL representations from random starts."""

import argparse
import time

from tlfloquet.rep_classification import brute_force_classify, forced_linear_floor


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--generators", type=int, default=4)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--floor", action="store_true", help="also pin a linear coefficient and report the residual floor")
    args = ap.parse_args()

    t0 = time.perf_counter()
    rep = brute_force_classify(args.generators, args.samples, args.seed)
    print(rep.to_json(), end="")
    print(f"classified {rep.fraction_classified:.0%} of converged starts in {time.perf_counter() - t0:.0f}s")
    if args.floor:
        print(f"residual floor with a pinned linear term: {forced_linear_floor():.3f}")


if __name__ == "__main__":
    main()
