"""Exact expected-maximum-score (EMS) evaluation.

Two independent routes:

* ``brute_force_ems`` enumerates every outcome with its probability (t <= 16);
* ``dp_ems`` runs the dynamic program over sub-tournaments.  For each game
  ``g`` it keeps ``Z[g][i, x_1, ..., x_e]``: the probability that the ``i``-th
  team of ``g`` wins ``g`` while entry ``k`` scores ``x_k`` inside the
  sub-tournament ending at ``g``.  A team coming from one predecessor combines
  its own table with the opponent mixture of the other predecessor by
  convolution over the score axes, then every entry that picked it at ``g``
  is shifted by the game's weight.
"""

from __future__ import annotations

import time

import numpy as np
from scipy.signal import fftconvolve

from .errors import GuardRefusal, InfeasibleBracketError
from .probability import propagate, random_pteam, validate_pteam
from .simulation import sample_pool
from .tournament import (MAX_ENUMERABLE_TEAMS, Tournament, all_brackets, build_tournament,
                         check_entries, losers, score_matrix, validate_bracket)

# (entries, largest team count) the dynamic program accepts
DP_LIMITS = {1: 1 << 30, 2: 1 << 30, 3: 8}


def outcome_probabilities(T: Tournament, P, outcomes) -> np.ndarray:
    """Probability of each (feasible) outcome row under a Markov tournament."""
    O = np.asarray(outcomes, dtype=np.int64).reshape(-1, T.game_count)
    L = losers(T, O)
    return np.prod(P[O, L], axis=1)


def outcome_probability(T: Tournament, P, O) -> float:
    """Probability that the tournament ends exactly as bracket ``O``."""
    P = validate_pteam(P, T.team_count)
    bad = validate_bracket(T, O)
    if bad:
        raise InfeasibleBracketError(bad)
    return float(outcome_probabilities(T, P, O)[0])


def expected_single_score(T: Tournament, pgame, E) -> float:
    """Expected score of one entry: sum of weight times win probability of its picks."""
    E = np.asarray(E, dtype=np.int64)
    return float(np.sum(T.weights * np.asarray(pgame)[E, np.arange(T.game_count)], axis=-1))


def brute_force_ems(T: Tournament, P, entries) -> float:
    """EMS by summing over every possible outcome (only for t <= 16)."""
    if T.team_count > MAX_ENUMERABLE_TEAMS:
        raise GuardRefusal(
            f"brute force needs all 2^{T.game_count} outcomes; use dp_ems or mc_ems for t > 16")
    P = validate_pteam(P, T.team_count)
    E = check_entries(T, entries)
    O = all_brackets(T)
    probs = outcome_probabilities(T, P, O)
    best = score_matrix(T, E, O).max(axis=0)
    return float(probs @ best)


def dp_state_count(T: Tournament, e: int) -> int:
    """Number of table cells the dynamic program would allocate."""
    total = 0
    for g in range(T.game_count):
        r = int(T.game_round[g])
        total += 2**r * (r * 2 ** (r - 1) + 1) ** e
    return total


def _check_guard(T: Tournament, e: int) -> None:
    limit = DP_LIMITS.get(e, 0)
    if T.team_count > limit:
        raise GuardRefusal(
            f"exact EMS with {e} entries on {T.team_count} teams refused: "
            f"~{dp_state_count(T, e):.3e} states; use Monte Carlo instead")


def dp_table(T: Tournament, P, entries) -> list[np.ndarray]:
    """Per-game joint tables of (winner, per-entry scores) probabilities.

    ``Z[g]`` has shape ``(2**r, S+1, ..., S+1)`` with ``S = r * 2**(r-1)``;
    row ``i`` corresponds to team ``T.teams(g)[i]``.
    """
    P = validate_pteam(P, T.team_count)
    E = check_entries(T, entries)
    e = E.shape[0]
    _check_guard(T, e)
    axes = tuple(range(1, e + 1))
    leaf = np.ones((1,) + (1,) * e)
    Z: list[np.ndarray] = []
    for g in range(T.game_count):
        r = int(T.game_round[g])
        bonus = 2 ** (r - 1)
        S = r * bonus
        teams = T.teams(g)
        if r == 1:
            sides = [(range(teams.start, teams.start + 1), leaf, range(teams.start + 1, teams.stop), leaf)]
            sides.append((sides[0][2], leaf, sides[0][0], leaf))
        else:
            a, b = T.children[g]
            A, B = T.teams(a), T.teams(b)
            sides = [(A, Z[a], B, Z[b]), (B, Z[b], A, Z[a])]
        out = np.zeros((len(teams),) + (S + 1,) * e)
        for own, Zown, opp, Zopp in sides:
            mix = P[own.start:own.stop, opp.start:opp.stop] @ Zopp.reshape(len(opp), -1)
            mix = mix.reshape((len(own),) + Zopp.shape[1:])
            if Zown.shape[1] == 1:
                conv = Zown * mix
            else:
                conv = fftconvolve(Zown, mix, axes=axes)
                np.clip(conv, 0.0, None, out=conv)
            width = conv.shape[1]
            for i, team in enumerate(own):
                shift = [bonus if E[k, g] == team else 0 for k in range(e)]
                idx = (team - teams.start,) + tuple(slice(s, s + width) for s in shift)
                out[idx] = conv[i]
        Z.append(out)
    return Z


def _expected_max(table: np.ndarray) -> float:
    joint = table.sum(axis=0)
    grids = np.meshgrid(*[np.arange(n) for n in joint.shape], indexing="ij")
    return float(np.sum(np.maximum.reduce(grids) * joint))


def dp_ems(T: Tournament, P, entries) -> float:
    """Exact EMS via the sub-tournament dynamic program."""
    Z = dp_table(T, P, entries)
    return _expected_max(Z[T.final])


def dp_runtime_probe(t_values, seed: int = 0, repeats: int = 1) -> list[tuple[int, float]]:
    """Average wall-clock seconds of a 2-entry ``dp_ems`` per tournament size."""
    rng = np.random.default_rng(seed)
    rows = []
    for t in t_values:
        T = build_tournament(t)
        elapsed = 0.0
        for k in range(repeats):
            P = random_pteam(t, rng)
            E = sample_pool(T, P, 2, int(rng.integers(1 << 62))).outcomes
            start = time.perf_counter()
            dp_ems(T, P, E)
            elapsed += time.perf_counter() - start
        rows.append((t, elapsed / repeats))
    return rows


def single_entry_values(T: Tournament, P) -> tuple[np.ndarray, np.ndarray]:
    """Every bracket (t <= 16) with its expected single-entry score."""
    pgame, _ = propagate(T, P)
    B = all_brackets(T)
    vals = (T.weights[None, :] * pgame[B, np.arange(T.game_count)[None, :]]).sum(axis=1)
    return B, vals
