"""Compare entry generators on random seeded 64-team fields.

Each method builds ``e`` entries from the same matrix; all are scored on one
shared evaluation pool so differences are not sampling noise between methods.
"""

import argparse
import time

import numpy as np

from bracketpool.optimize import (SolveBudget, gsaa_generate, prop_generate, prop_plus_generate,
                                  sip_generate)
from bracketpool.probability import propagate, random_seeded_pteam
from bracketpool.simulation import derive_seed, mc_ems, sample_pool
from bracketpool.tournament import build_tournament


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--teams", type=int, default=64)
    ap.add_argument("--entries", type=int, nargs="+", default=[2, 5, 10])
    ap.add_argument("--instances", type=int, default=3)
    ap.add_argument("--eval-w", type=int, default=10_000)
    ap.add_argument("--samples", type=int, default=250)
    ap.add_argument("--max-sweeps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    T = build_tournament(args.teams)
    print("instance,e,method,ems,ci95,seconds")
    for k in range(args.instances):
        P = random_seeded_pteam(args.teams, np.random.default_rng(derive_seed(args.seed, k)))
        pround = propagate(T, P)[1]
        pool = sample_pool(T, P, args.eval_w, derive_seed(args.seed, k, 1))
        budget = SolveBudget(sample_count=args.samples, max_sweeps=args.max_sweeps,
                             master_seed=derive_seed(args.seed, k, 2))
        for e in args.entries:
            methods = {
                "prop": lambda: prop_generate(T, pround, e),
                "prop+": lambda: prop_plus_generate(T, pround, e),
                "gsaa": lambda: gsaa_generate(T, P, e, budget),
                "sip": lambda: sip_generate(T, P, e, budget=budget),
            }
            for name, make in methods.items():
                start = time.perf_counter()
                E = make()
                sec = time.perf_counter() - start
                est = mc_ems(T, E, pool)
                print(f"{k},{e},{name},{est.mean:.3f},{est.ci95_halfwidth:.3f},{sec:.2f}")


if __name__ == "__main__":
    main()
