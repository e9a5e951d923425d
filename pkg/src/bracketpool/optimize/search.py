"""Bracket search used by the sample-average and sequential subproblems.

Small tournaments (t <= 16) are solved by scoring every feasible bracket.
Larger ones use best-improvement hill climbing: a move re-picks the winner of
one game, carries the new winner down its own path, and repairs the games
above by keeping a pick when it is still consistent, otherwise taking the
stronger of the two incoming winners.  Objectives are vectorised callables
mapping an ``(m, g)`` array of brackets to ``m`` values.
"""

from __future__ import annotations

import logging
import time
from typing import Callable, Iterable

import numpy as np

from ..errors import GuardRefusal
from ..tournament import MAX_ENUMERABLE_TEAMS, Tournament, all_brackets

log = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], np.ndarray]

IMPROVE_EPS = 1e-12
ENUM_CHUNK = 4096


def use_exact(T: Tournament, exact: bool | None) -> bool:
    small = T.team_count <= MAX_ENUMERABLE_TEAMS
    if exact and not small:
        raise GuardRefusal(f"exact enumeration is limited to t <= {MAX_ENUMERABLE_TEAMS}")
    return small if exact is None else bool(exact)


def enumerate_best(T: Tournament, objective: Objective) -> tuple[np.ndarray, float]:
    """Exact maximiser over all brackets; ties go to the lowest enumeration index."""
    B = all_brackets(T)
    vals = np.concatenate([objective(B[i:i + ENUM_CHUNK])
                           for i in range(0, B.shape[0], ENUM_CHUNK)])
    k = int(np.argmax(vals))
    return B[k].copy(), float(vals[k])


def neighbors(T: Tournament, B: np.ndarray, strength: np.ndarray) -> np.ndarray:
    """Every bracket reachable by re-picking the winner of a single game."""
    out = []
    parent = T.parent
    for g in range(T.game_count):
        r = int(T.game_round[g])
        for new in T.teams(g):
            if new == B[g]:
                continue
            C = B.copy()
            for rr in range(1, r + 1):
                C[T.game_of(new, rr)] = new
            a = int(parent[g])
            while a >= 0:
                ca, cb = T.children[a]
                x, y = C[ca], C[cb]
                if C[a] != x and C[a] != y:
                    ra = int(T.game_round[a]) - 1
                    C[a] = y if strength[y, ra] > strength[x, ra] else x
                a = int(parent[a])
            out.append(C)
    return np.array(out, dtype=np.int64)


def hill_climb(T: Tournament, start: np.ndarray, objective: Objective, strength: np.ndarray,
               max_sweeps: int, deadline: float | None = None) -> tuple[np.ndarray, float]:
    """Best-improvement ascent from ``start``; never returns a worse bracket."""
    cur = np.array(start, dtype=np.int64)
    val = float(objective(cur[None, :])[0])
    for _ in range(max_sweeps):
        N = neighbors(T, cur, strength)
        vals = objective(N)
        k = int(np.argmax(vals))
        if vals[k] <= val + IMPROVE_EPS:
            break
        cur, val = N[k], float(vals[k])
        if deadline is not None and time.monotonic() > deadline:
            log.warning("time limit reached during local search; result may depend on timing")
            break
    return cur, val


def multi_start(T: Tournament, objective: Objective, strength: np.ndarray,
                seeds: Iterable[np.ndarray], restarts: np.ndarray, max_sweeps: int,
                time_limit: float) -> tuple[np.ndarray, float]:
    """Climb from the best seed and from each restart; best (value, start index) wins.

    ``seeds`` are scored together and only the best one is climbed, which keeps
    a large PROP+ seed set cheap.
    """
    deadline = time.monotonic() + time_limit
    starts = []
    seeds = [np.asarray(s, dtype=np.int64) for s in seeds]
    if seeds:
        S = np.array(seeds)
        starts.append(S[int(np.argmax(objective(S)))])
    starts.extend(np.asarray(restarts, dtype=np.int64).reshape(-1, T.game_count))
    best, best_val = None, -np.inf
    for s in starts:
        cand, v = hill_climb(T, s, objective, strength, max_sweeps, deadline)
        if v > best_val + IMPROVE_EPS:
            best, best_val = cand, v
    return best, best_val
