"""Wall-clock time of the exact two-entry DP against tournament size."""

import argparse

from bracketpool.exact import dp_runtime_probe, dp_state_count
from bracketpool.tournament import build_tournament


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--teams", type=int, nargs="+", default=[4, 8, 16, 32])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("t,states,seconds")
    for t, sec in dp_runtime_probe(args.teams, seed=args.seed, repeats=args.repeats):
        print(f"{t},{dp_state_count(build_tournament(t), 2)},{sec:.4f}")


if __name__ == "__main__":
    main()
