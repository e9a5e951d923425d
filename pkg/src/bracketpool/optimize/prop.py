"""Proportion heuristics PROP and PROP+.

Entries are filled from the final backwards.  The entry with the lowest
expected score so far receives the next pick: the team whose selection count
in the round is furthest below its target ``e * P_round``.  Picking a team for
a round-``r`` game also picks it for its earlier games on the way there.
PROP+ only considers teams whose round win probability exceeds a per-round
threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import StructuralError
from ..tournament import Tournament
from .config import load_settings


@dataclass(frozen=True)
class PropPlusThresholds:
    """Minimum round win probability, indexed by round (first element = round 1).

    Rounds past the end of ``values`` are unfiltered.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        if any(not 0.0 <= v < 1.0 for v in self.values):
            raise StructuralError(f"thresholds must lie in [0, 1): {self.values}")

    def for_round(self, r: int) -> float | None:
        return self.values[r - 1] if r <= len(self.values) else None

    @classmethod
    def defaults(cls, e: int, settings=None) -> "PropPlusThresholds":
        if settings is None:
            settings = load_settings(use_env=False)
        return cls(settings.thresholds_for(e))


def prop_generate(T: Tournament, pround, e: int,
                  thresholds: PropPlusThresholds | Sequence[float] | None = None) -> np.ndarray:
    """Build ``e`` entries by matching selection counts to round win probabilities."""
    if e < 1:
        raise StructuralError(f"need at least one entry, got {e}")
    if thresholds is not None and not isinstance(thresholds, PropPlusThresholds):
        thresholds = PropPlusThresholds(tuple(float(v) for v in thresholds))
    pround = np.asarray(pround, dtype=float)
    R = T.round_count
    E = np.full((e, T.game_count), -1, dtype=np.int64)
    q = np.zeros(e)
    N = np.zeros((T.team_count, R))
    target = e * pround
    for r in range(R, 0, -1):
        games = np.array(list(T.games_in_round(r)))
        cut = thresholds.for_round(r) if thresholds is not None else None
        active = np.ones(e, dtype=bool)
        while active.any():
            live = np.flatnonzero(active)
            k = int(live[np.argmin(q[live])])
            open_games = games[E[k, games] < 0]
            cands = []
            for g in open_games:
                teams = np.arange(T.teams(g).start, T.teams(g).stop)
                if cut is not None:
                    kept = teams[pround[teams, r - 1] > cut]
                    teams = kept if kept.size else teams
                cands.append(teams)
            cands = np.sort(np.concatenate(cands))
            gain = (N[cands, r - 1] - target[cands, r - 1]) ** 2 \
                - (N[cands, r - 1] + 1 - target[cands, r - 1]) ** 2
            team = int(cands[np.argmax(gain)])
            for rr in range(1, r + 1):
                E[k, T.game_of(team, rr)] = team
                q[k] += 2 ** (rr - 1) * pround[team, rr - 1]
                N[team, rr - 1] += 1
            if (E[k, games] >= 0).all():
                active[k] = False
    E.flags.writeable = False
    return E


def prop_plus_generate(T: Tournament, pround, e: int,
                       thresholds: PropPlusThresholds | Sequence[float] | None = None,
                       settings=None) -> np.ndarray:
    """PROP restricted to teams above the per-round thresholds (shipped defaults if omitted)."""
    if thresholds is None:
        thresholds = PropPlusThresholds.defaults(e, settings)
    return prop_generate(T, pround, e, thresholds)
