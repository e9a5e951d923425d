"""Four-team instances where intuition about multiple entries goes wrong.

Prints the expected score of every bracket, the greedy pair built from the
best single entry, the jointly optimal pair, and the optimum under even odds.
"""

import argparse
import itertools

import numpy as np

from bracketpool.exact import brute_force_ems, single_entry_values
from bracketpool.optimize.gsaa import optimal_pair
from bracketpool.probability import uniform_pteam
from bracketpool.tournament import build_tournament

CLOSE = np.array([[0, .70, .55, .60], [.30, 0, .40, .45], [.45, .60, 0, .55], [.40, .55, .45, 0]])
DOMINANT = np.array([[0, .80, .80, .80], [.20, 0, .40, .45], [.20, .60, 0, .55],
                     [.20, .55, .45, 0]])


def fmt(B):
    return "".join("ABCD"[x] for x in B)


def report(T, P, label):
    B, vals = single_entry_values(T, P)
    print(f"== {label}")
    for b, v in zip(B, vals):
        print(f"  {fmt(b)}  E[S] = {v:.5f}")
    first = int(np.argmax(vals))
    gains = [brute_force_ems(T, P, B[[first, j]]) for j in range(len(B))]
    second = int(np.argmax(gains))
    print(f"  greedy pair {fmt(B[first])} + {fmt(B[second])}: EMS = {gains[second]:.5f}")
    E, best = optimal_pair(T, P)
    print(f"  optimal pair {fmt(E[0])} + {fmt(E[1])}: EMS = {best:.5f}")


def main():
    argparse.ArgumentParser(description=__doc__).parse_args()
    T = build_tournament(4)
    report(T, CLOSE, "close matchups")
    report(T, DOMINANT, "one dominant team")
    B, _ = single_entry_values(T, uniform_pteam(4))
    print("== even odds, all pairs")
    for i, j in itertools.combinations(range(len(B)), 2):
        shared = int((B[i] == B[j]).sum())
        v = brute_force_ems(T, uniform_pteam(4), B[[i, j]])
        print(f"  {fmt(B[i])} {fmt(B[j])}  shared picks {shared}  EMS = {v:.4f}")


if __name__ == "__main__":
    main()
