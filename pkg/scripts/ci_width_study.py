"""How the 95% interval of a Monte Carlo EMS estimate narrows with pool size.

For each size ``w`` the EMS of a fixed entry set is estimated on ``repeats``
independent pools and the interval half-width of the mean is reported.
"""

import argparse

import numpy as np

from bracketpool.probability import random_pteam, random_seeded_pteam
from bracketpool.simulation import repeated_ci_halfwidth, sample_pool
from bracketpool.tournament import build_tournament


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--teams", type=int, default=64)
    ap.add_argument("--entries", type=int, nargs="+", default=[2, 100])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 50, 100, 250, 500, 750, 1000])
    ap.add_argument("--repeats", type=int, default=50)
    ap.add_argument("--sets", type=int, default=5, help="random entry sets per entry count")
    ap.add_argument("--seeded", action="store_true", help="use a seeded-field matrix")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    T = build_tournament(args.teams)
    P = (random_seeded_pteam if args.seeded else random_pteam)(args.teams, rng)
    print("entries,w,mean_halfwidth,worst_halfwidth")
    for e in args.entries:
        sets = [sample_pool(T, P, e, int(rng.integers(1 << 62))).outcomes
                for _ in range(args.sets)]
        for w in args.sizes:
            h = [repeated_ci_halfwidth(T, P, E, w, args.repeats, args.seed + k)[1]
                 for k, E in enumerate(sets)]
            print(f"{e},{w},{np.mean(h):.4f},{np.max(h):.4f}")


if __name__ == "__main__":
    main()
