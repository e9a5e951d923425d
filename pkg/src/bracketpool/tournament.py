"""Single-elimination tournament structure, brackets, feasibility and scoring.

Conventions used throughout the package:

* Teams are indexed ``0 .. t-1`` internally; file formats use ids ``1 .. t``.
* Games are numbered round-major: the ``t/2`` first-round games come first,
  then the ``t/4`` second-round games, and so on up to the final.  Game ``k``
  of round 1 is played by teams ``2k`` and ``2k+1``.
* A bracket is a 1-D integer array of length ``t-1`` whose position ``g``
  holds the team picked to win game ``g``.  A set of entries is a 2-D array
  with one bracket per row.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .errors import GuardRefusal, InfeasibleBracketError, StructuralError

# exhaustive enumeration of all 2**(t-1) brackets is allowed up to this size
MAX_ENUMERABLE_TEAMS = 16


@dataclass(frozen=True, eq=False)
class Tournament:
    """Layered game graph of a ``t``-team single-elimination tournament."""

    team_count: int
    round_count: int
    game_round: np.ndarray  # (g,) round label, 1-based
    round_offset: tuple[int, ...]  # index of the first game of each round
    children: np.ndarray  # (g, 2) predecessor games, -1 in round 1
    parent: np.ndarray  # (g,) successor game, -1 for the final
    weights: np.ndarray  # (g,) points for a correct pick, 2**(r-1)

    @property
    def game_count(self) -> int:
        return self.team_count - 1

    @property
    def final(self) -> int:
        return self.game_count - 1

    @property
    def max_score(self) -> int:
        return self.round_count * self.team_count // 2

    def games_in_round(self, r: int) -> range:
        start = self.round_offset[r - 1]
        return range(start, start + self.team_count // 2**r)

    def game_of(self, team: int, r: int) -> int:
        """Game that ``team`` plays in round ``r`` if it gets that far."""
        return self.round_offset[r - 1] + (team >> r)

    def teams(self, g: int) -> range:
        """Teams that might play game ``g``."""
        r = int(self.game_round[g])
        j = g - self.round_offset[r - 1]
        return range(j << r, (j + 1) << r)

    def path(self, team: int, up_to_round: int | None = None) -> list[int]:
        """Games on ``team``'s path to the final, round 1 first."""
        last = self.round_count if up_to_round is None else up_to_round
        return [self.game_of(team, r) for r in range(1, last + 1)]

    def gamma(self, g: int, team: int) -> int:
        """Predecessor of ``g`` that ``team`` must win to play ``g``."""
        r = int(self.game_round[g])
        if r == 1:
            raise StructuralError("first-round games have no predecessors")
        return self.game_of(team, r - 1)

    def delta(self, g: int, team: int) -> int:
        """Predecessor of ``g`` that ``team`` cannot play."""
        a, b = self.children[g]
        return int(b) if self.gamma(g, team) == a else int(a)

    def round_one_opponent(self, team: int) -> int:
        return team ^ 1


@lru_cache(maxsize=None)
def build_tournament(team_count: int) -> Tournament:
    """Build the ``team_count``-team tournament (a power of two, at least 4)."""
    t = int(team_count)
    if t < 4 or t & (t - 1):
        raise StructuralError(f"team_count must be a power of two >= 4, got {team_count}")
    rounds = t.bit_length() - 1
    g = t - 1
    offsets = []
    game_round = np.empty(g, dtype=np.int64)
    pos = 0
    for r in range(1, rounds + 1):
        offsets.append(pos)
        n = t >> r
        game_round[pos:pos + n] = r
        pos += n
    children = np.full((g, 2), -1, dtype=np.int64)
    parent = np.full(g, -1, dtype=np.int64)
    for r in range(2, rounds + 1):
        for j in range(t >> r):
            gg = offsets[r - 1] + j
            a = offsets[r - 2] + 2 * j
            children[gg] = (a, a + 1)
            parent[a] = parent[a + 1] = gg
    weights = 2 ** (game_round - 1)
    for arr in (game_round, children, parent, weights):
        arr.flags.writeable = False
    return Tournament(t, rounds, game_round, tuple(offsets), children, parent, weights)


class Violation(NamedTuple):
    game: int
    condition: int
    message: str

    def __str__(self):
        return f"game {self.game + 1}: condition {self.condition}: {self.message}"


def as_bracket(T: Tournament, B) -> np.ndarray:
    arr = np.asarray(B, dtype=np.int64)
    if arr.ndim != 1 or arr.shape[0] != T.game_count:
        raise StructuralError(
            f"bracket must have {T.game_count} picks, got shape {arr.shape}")
    return arr


def as_entries(T: Tournament, entries) -> np.ndarray:
    arr = np.asarray(entries, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != T.game_count:
        raise StructuralError(
            f"entry set must have rows of {T.game_count} picks, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise StructuralError("entry set is empty")
    return arr


def validate_bracket(T: Tournament, B) -> list[Violation]:
    """Return every violated feasibility condition; an empty list means feasible.

    Condition 1 is a team id outside the tournament (no valid team assigned),
    condition 2 a pick of a team that cannot play the game, condition 3 a pick
    that did not also win the game leading to it.
    """
    B = as_bracket(T, B)
    out = []
    t = T.team_count
    for g in range(T.game_count):
        w = int(B[g])
        if not 0 <= w < t:
            out.append(Violation(g, 1, f"team id {w + 1} is not in the tournament"))
            continue
        if w not in T.teams(g):
            out.append(Violation(g, 2, f"team {w + 1} cannot play this game"))
            continue
        r = int(T.game_round[g])
        if r > 1 and B[T.gamma(g, w)] != w:
            out.append(Violation(
                g, 3, f"team {w + 1} is picked here but not in game {T.gamma(g, w) + 1}"))
    return out


def is_feasible(T: Tournament, B) -> bool:
    return not validate_bracket(T, B)


def check_entries(T: Tournament, entries) -> np.ndarray:
    """Coerce to a 2-D entry array and raise on the first infeasible row."""
    arr = as_entries(T, entries)
    ok = feasible_mask(T, arr)
    if not ok.all():
        bad = int(np.flatnonzero(~ok)[0])
        raise InfeasibleBracketError(validate_bracket(T, arr[bad]))
    return arr


def feasible_mask(T: Tournament, brackets) -> np.ndarray:
    """Vectorised feasibility test for a 2-D array of brackets."""
    B = np.asarray(brackets, dtype=np.int64)
    n = B.shape[0]
    ok = np.ones(n, dtype=bool)
    for g in range(T.game_count):
        r = int(T.game_round[g])
        lo = T.teams(g).start
        w = B[:, g]
        ok &= (w >= lo) & (w < lo + 2**r)
        if r > 1:
            a, b = T.children[g]
            ok &= (w == B[:, a]) | (w == B[:, b])
    return ok


def _onehot(T: Tournament, brackets: np.ndarray, weighted: bool) -> np.ndarray:
    # column (round-1)*t + team identifies a game pick uniquely: a team plays
    # at most one game per round
    n = brackets.shape[0]
    t = T.team_count
    X = np.zeros((n, T.round_count * t))
    cols = (T.game_round - 1)[None, :] * t + brackets
    vals = T.weights.astype(float) if weighted else 1.0
    rows = np.repeat(np.arange(n)[:, None], T.game_count, axis=1)
    X[rows, cols] = vals if np.isscalar(vals) else np.broadcast_to(vals, cols.shape)
    return X


def score_matrix(T: Tournament, entries, outcomes) -> np.ndarray:
    """Scores of every entry (rows) against every outcome (columns)."""
    E = np.asarray(entries, dtype=np.int64).reshape(-1, T.game_count)
    O = np.asarray(outcomes, dtype=np.int64).reshape(-1, T.game_count)
    S = _onehot(T, E, weighted=True) @ _onehot(T, O, weighted=False).T
    return np.rint(S).astype(np.int64)


def score(T: Tournament, E, O) -> int:
    """Points earned by entry ``E`` when the tournament ends as ``O``."""
    E = check_entries(T, E)[0]
    O = check_entries(T, O)[0]
    return int(T.weights[E == O].sum())


def max_set_score(T: Tournament, entries, O) -> int:
    """Score of the best-performing entry of ``entries`` under outcome ``O``."""
    E = check_entries(T, entries)
    O = check_entries(T, O)[0]
    return int(((E == O[None, :]) * T.weights[None, :]).sum(axis=1).max())


def overlap_counts(T: Tournament, E1, E2) -> tuple[tuple[int, ...], int]:
    """Per-round number of identical picks between two brackets, and the total."""
    pair = check_entries(T, np.vstack([as_bracket(T, E1), as_bracket(T, E2)]))
    same = pair[0] == pair[1]
    per_round = tuple(int(same[list(T.games_in_round(r))].sum())
                      for r in range(1, T.round_count + 1))
    return per_round, sum(per_round)


def champion(T: Tournament, B) -> int:
    return int(np.asarray(B)[..., T.final])


def finalists(T: Tournament, B) -> tuple[int, int]:
    a, b = T.children[T.final]
    B = np.asarray(B)
    return int(B[a]), int(B[b])


@lru_cache(maxsize=None)
def _enumerate(t: int) -> np.ndarray:
    T = build_tournament(t)
    g = T.game_count
    codes = np.arange(1 << g, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(g)) & 1
    out = np.empty((1 << g, g), dtype=np.int64)
    for gg in range(g):
        if T.game_round[gg] == 1:
            out[:, gg] = T.teams(gg).start + bits[:, gg]
        else:
            a, b = T.children[gg]
            out[:, gg] = np.where(bits[:, gg] == 0, out[:, a], out[:, b])
    out.flags.writeable = False
    return out


def all_brackets(T: Tournament) -> np.ndarray:
    """Every feasible bracket, one per row (``2**(t-1)`` rows).

    Bit ``g`` of the row index selects which side wins game ``g``.
    """
    if T.team_count > MAX_ENUMERABLE_TEAMS:
        raise GuardRefusal(
            f"enumerating 2^{T.game_count} brackets is refused for t > {MAX_ENUMERABLE_TEAMS}")
    return _enumerate(T.team_count)


def losers(T: Tournament, brackets) -> np.ndarray:
    """Team eliminated in each game, given the winners of every game."""
    B = np.asarray(brackets, dtype=np.int64)
    L = np.empty_like(B)
    for g in range(T.game_count):
        if T.game_round[g] == 1:
            L[..., g] = B[..., g] ^ 1
        else:
            a, b = T.children[g]
            L[..., g] = np.where(B[..., g] == B[..., a], B[..., b], B[..., a])
    return L


def fill_greedy(T: Tournament, partial: Sequence[int], strength: np.ndarray) -> np.ndarray:
    """Complete a partial bracket (``-1`` = unset) bottom-up.

    Unset round-1 games take the team with larger ``strength[team, 0]``; unset
    later games take the larger ``strength[team, r-1]`` of the two predecessor
    winners.  Ties go to the lower team index.  Picks already set are kept and
    must be consistent.
    """
    B = np.array(partial, dtype=np.int64)
    for g in range(T.game_count):
        if B[g] >= 0:
            continue
        r = int(T.game_round[g])
        if r == 1:
            a = T.teams(g).start
            cands = (a, a + 1)
        else:
            cands = tuple(int(B[c]) for c in T.children[g])
        B[g] = cands[1] if strength[cands[1], r - 1] > strength[cands[0], r - 1] else cands[0]
    return B
