"""Entry sets with deterministic worst-case guarantees, and their verification.

Every construction leaves some picks unconstrained; those are filled greedily
by round win probability (``pround``), or by lowest team index when no
probabilities are given.  Covered sub-tournaments are always the ones that
contain the first team.
"""

from __future__ import annotations

import logging
import warnings
from typing import NamedTuple

import numpy as np

from .errors import StructuralError
from .simulation import pool_outcomes
from .tournament import (MAX_ENUMERABLE_TEAMS, Tournament, all_brackets, as_bracket,
                         check_entries, fill_greedy, score_matrix)

log = logging.getLogger(__name__)


class NonExhaustiveWarning(UserWarning):
    """A worst-case score was taken over a sample of outcomes, not all of them."""


def _strength(T: Tournament, pround) -> np.ndarray:
    if pround is None:
        return np.zeros((T.team_count, T.round_count))
    return np.asarray(pround, dtype=float)


def _freeze(rows) -> np.ndarray:
    out = np.array(rows, dtype=np.int64)
    out.flags.writeable = False
    return out


def complementary_pair(T: Tournament, base, pround=None) -> np.ndarray:
    """``base`` plus an entry with every first-round pick flipped (worst case >= t/4)."""
    base = check_entries(T, as_bracket(T, base))[0]
    partial = np.full(T.game_count, -1, dtype=np.int64)
    r1 = list(T.games_in_round(1))
    partial[r1] = base[r1] ^ 1
    return _freeze([base, fill_greedy(T, partial, _strength(T, pround))])


def _covering_entry(T: Tournament, winner: int, r: int, strength) -> np.ndarray:
    partial = np.full(T.game_count, -1, dtype=np.int64)
    for rr in range(1, r + 1):
        partial[T.game_of(winner, rr)] = winner
    return fill_greedy(T, partial, strength)


def round_cover(T: Tournament, r: int, pround=None) -> np.ndarray:
    """``2**r`` entries, one per possible winner of the round-``r`` game of team 1.

    Whoever wins that game, some entry has it winning all ``r`` of its games
    up to there, which is worth ``2**r - 1`` points.
    """
    if not 1 <= r <= T.round_count:
        raise StructuralError(f"round must lie in 1..{T.round_count}, got {r}")
    strength = _strength(T, pround)
    g = T.game_of(0, r)
    return _freeze([_covering_entry(T, x, r, strength) for x in T.teams(g)])


def example16_cover(T: Tournament, pround=None) -> np.ndarray:
    """Sixteen entries guaranteeing ``t/4 + 2`` points.

    The first eight cover every outcome of the two first-round games of teams
    1-4 and the round-2 game between their winners.  Entries 9-16 repeat those
    three picks and flip every other first-round pick.
    """
    if T.team_count < 8:
        raise StructuralError("the sixteen-entry cover needs at least 8 teams")
    strength = _strength(T, pround)
    g1, g2 = T.game_of(0, 1), T.game_of(2, 1)
    g3 = T.game_of(0, 2)
    others = [g for g in T.games_in_round(1) if g not in (g1, g2)]
    chalk = fill_greedy(T, np.full(T.game_count, -1, dtype=np.int64), strength)
    rows = []
    for flip in (0, 1):
        for a in (0, 1):
            for b in (2, 3):
                for champ in (a, b):
                    partial = np.full(T.game_count, -1, dtype=np.int64)
                    partial[g1], partial[g2], partial[g3] = a, b, champ
                    partial[others] = chalk[others] ^ flip
                    rows.append(fill_greedy(T, partial, strength))
    return _freeze(rows)


def min_guaranteed_score(T: Tournament, entries, pool=None) -> int:
    """Worst score of the entry set over every outcome (t <= 16).

    For larger tournaments a pool of outcomes is required and the minimum is
    over that sample only, so it only bounds the true worst case from above;
    a ``NonExhaustiveWarning`` is issued.
    """
    E = check_entries(T, entries)
    if T.team_count <= MAX_ENUMERABLE_TEAMS and pool is None:
        O = all_brackets(T)
    else:
        if pool is None:
            raise StructuralError(
                f"exhaustive check is limited to t <= {MAX_ENUMERABLE_TEAMS}; pass a pool")
        O = pool_outcomes(T, pool)
        warnings.warn("worst case taken over sampled outcomes only", NonExhaustiveWarning,
                      stacklevel=2)
    lo = None
    for i in range(0, O.shape[0], 8192):
        m = int(score_matrix(T, E, O[i:i + 8192]).max(axis=0).min())
        lo = m if lo is None else min(lo, m)
    return lo


class Certificate(NamedTuple):
    disjoint: bool
    first_overlap: int | None  # 0-based game index


def disjointness_certificate(T: Tournament, entries) -> Certificate:
    """Whether two entries disagree on every game, else the first shared pick."""
    E = check_entries(T, entries)
    if E.shape[0] != 2:
        raise StructuralError(f"need exactly two entries, got {E.shape[0]}")
    same = np.flatnonzero(E[0] == E[1])
    return Certificate(True, None) if same.size == 0 else Certificate(False, int(same[0]))
