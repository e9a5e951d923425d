"""Best single entry: exact maximiser of the expected single-entry score."""

from __future__ import annotations

import numpy as np

from ..probability import propagate
from ..tournament import Tournament


def best_single_entry(T: Tournament, P, pgame=None) -> tuple[np.ndarray, float]:
    """Bracket maximising the expected score, and that score.

    ``f(g, t)`` is the best expected score inside the sub-tournament of ``g``
    when ``t`` is picked to win ``g``: its own game value, plus ``f`` of the
    game it came from, plus the best choice on the other side.  Ties go to the
    lower team index.
    """
    if pgame is None:
        pgame, _ = propagate(T, P)
    f: list[np.ndarray] = []
    for g in range(T.game_count):
        teams = T.teams(g)
        own = T.weights[g] * pgame[teams.start:teams.stop, g]
        if T.game_round[g] == 1:
            f.append(own)
            continue
        a, b = T.children[g]
        fa, fb = f[a], f[b]
        f.append(own + np.concatenate([fa + fb.max(), fb + fa.max()]))
    B = np.empty(T.game_count, dtype=np.int64)

    def pick(g, team):
        B[g] = team
        if T.game_round[g] > 1:
            gam, dlt = T.gamma(g, team), T.delta(g, team)
            pick(gam, team)
            pick(dlt, T.teams(dlt).start + int(np.argmax(f[dlt])))

    final = T.final
    pick(final, int(np.argmax(f[final])))
    return B, float(f[final].max())
