"""Sample-average entry selection: the greedy G-SAA loop and small joint SAA.

Step ``k`` of the greedy loop draws a fresh pool of outcomes, records the best
score ``s_bar`` the entries chosen so far reach on each outcome, and adds the
bracket maximising the pool average of ``max(s_bar, s(E, O))``.
"""

from __future__ import annotations

import itertools
import logging

import numpy as np

from ..errors import GuardRefusal, StructuralError
from ..exact import outcome_probabilities
from ..probability import propagate, validate_pteam
from ..simulation import derive_seed, max_scores, pool_outcomes, sample_pool
from ..tournament import Tournament, all_brackets, fill_greedy, score_matrix
from .config import SolveBudget
from .prop import prop_plus_generate
from .search import enumerate_best, multi_start, use_exact

log = logging.getLogger(__name__)

# native joint SAA is limited to pairs of entries on tournaments this small
SAA_NATIVE_MAX_TEAMS = 8


def pool_round_frequency(T: Tournament, O: np.ndarray) -> np.ndarray:
    """Fraction of outcomes in which each team wins a game of each round."""
    freq = np.zeros((T.team_count, T.round_count))
    for r in range(1, T.round_count + 1):
        picks = O[:, list(T.games_in_round(r))].ravel()
        freq[:, r - 1] = np.bincount(picks, minlength=T.team_count) / O.shape[0]
    return freq


def incumbent_objective(T: Tournament, O: np.ndarray, sbar: np.ndarray):
    def objective(N: np.ndarray) -> np.ndarray:
        return np.maximum(score_matrix(T, N, O), sbar[None, :]).mean(axis=1)
    return objective


def subproblem_solve(T: Tournament, pool, sbar, budget: SolveBudget, P=None,
                     seeds=(), step: int = 0) -> tuple[np.ndarray, float]:
    """Bracket maximising the pool average of ``max(sbar_w, s(E, O_w))``, with that value.

    Exact for t <= 16 (unless ``budget.exact`` is False); otherwise hill
    climbing from the best of ``seeds`` plus ``budget.restarts`` pool outcomes.
    Greedy repairs use ``P``'s round win probabilities when given, else the
    pool's round win frequencies.
    """
    if not isinstance(budget, SolveBudget):
        raise StructuralError("budget must be a SolveBudget")
    O = pool_outcomes(T, pool)
    sbar = np.asarray(sbar, dtype=float)
    if sbar.shape != (O.shape[0],) or (sbar < 0).any():
        raise StructuralError(f"s_bar must be {O.shape[0]} nonnegative values")
    objective = incumbent_objective(T, O, sbar)
    if use_exact(T, budget.exact):
        return enumerate_best(T, objective)
    strength = propagate(T, P)[1] if P is not None else pool_round_frequency(T, O)
    seeds = list(seeds) or [fill_greedy(T, [-1] * T.game_count, strength)]
    rng = np.random.default_rng(derive_seed(budget.master_seed, 1, step))
    restarts = O[rng.choice(O.shape[0], size=min(budget.restarts, O.shape[0]), replace=False)]
    return multi_start(T, objective, strength, seeds, restarts, budget.max_sweeps,
                       budget.time_limit_seconds)


def gsaa_generate(T: Tournament, P, e: int, budget: SolveBudget | None = None,
                  threads: int = 1, trace: list | None = None,
                  settings=None) -> np.ndarray:
    """Greedy sequence of ``e`` entries, one sample-average subproblem per entry.

    If ``trace`` is a list, ``(step, objective_before, objective_after)`` is
    appended for every step, both measured on that step's own pool.
    """
    if e < 1:
        raise StructuralError(f"need at least one entry, got {e}")
    budget = budget or SolveBudget()
    P = validate_pteam(P, T.team_count)
    seeds = ()
    if not use_exact(T, budget.exact):
        seeds = prop_plus_generate(T, propagate(T, P)[1], e, settings=settings)
    chosen: list[np.ndarray] = []
    for k in range(e):
        pool = sample_pool(T, P, budget.sample_count, derive_seed(budget.master_seed, 0, k),
                           threads=threads)
        sbar = (max_scores(T, np.array(chosen), pool).astype(float) if chosen
                else np.zeros(pool.w))
        E, val = subproblem_solve(T, pool, sbar, budget, P=P, seeds=seeds, step=k)
        if trace is not None:
            trace.append((k, float(sbar.mean()), val))
        log.info("G-SAA step %d: in-sample objective %.6f", k + 1, val)
        chosen.append(E)
    out = np.array(chosen, dtype=np.int64)
    out.flags.writeable = False
    return out


def saa_pair_solve(T: Tournament, pool) -> tuple[np.ndarray, float]:
    """Joint SAA for two entries by enumerating every bracket pair (t <= 8)."""
    if T.team_count > SAA_NATIVE_MAX_TEAMS:
        raise GuardRefusal(
            f"native joint SAA is limited to t <= {SAA_NATIVE_MAX_TEAMS}; export an LP instead")
    O = pool_outcomes(T, pool)
    B = all_brackets(T)
    S = score_matrix(T, B, O)
    best, pair = -1.0, (0, 0)
    for i in range(B.shape[0]):
        vals = np.maximum(S[i][None, :], S[i:]).mean(axis=1)
        j = int(np.argmax(vals))
        if vals[j] > best + 1e-12:
            best, pair = float(vals[j]), (i, i + j)
    return B[list(pair)].copy(), best


def optimal_pair(T: Tournament, P) -> tuple[np.ndarray, float]:
    """Exact EMS-optimal pair of entries by enumerating all pairs (t <= 8)."""
    if T.team_count > SAA_NATIVE_MAX_TEAMS:
        raise GuardRefusal(f"pair enumeration is limited to t <= {SAA_NATIVE_MAX_TEAMS}")
    P = validate_pteam(P, T.team_count)
    B = all_brackets(T)
    probs = outcome_probabilities(T, P, B)
    S = score_matrix(T, B, B)
    best, pair = -1.0, (0, 0)
    for i, j in itertools.combinations_with_replacement(range(B.shape[0]), 2):
        v = float(np.maximum(S[i], S[j]) @ probs)
        if v > best + 1e-12:
            best, pair = v, (i, j)
    return B[list(pair)].copy(), best
