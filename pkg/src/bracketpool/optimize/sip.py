"""Sequential single-entry optimisation with diversification constraints (SIP).

Entry ``k`` maximises its own expected score subject to constraints relative
to entries ``1 .. k-1``:

* champion: a team may be picked in the last two rounds by at most
  ``ceil(e * P_round[t, r])`` entries;
* finalist: each entry has its own pair of finalists;
* global / round overlap: any two entries agree on at most ``sigma`` picks in
  total, or ``sigma_r`` picks within round ``r``.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from ..errors import InfeasibleConstraintsError, StructuralError
from ..probability import propagate, validate_pteam
from ..simulation import derive_seed, sample_pool
from ..tournament import Tournament, all_brackets
from .config import DiversificationConfig, SolveBudget, load_settings
from .prop import prop_plus_generate
from .search import enumerate_best, multi_start, use_exact
from .single import best_single_entry

log = logging.getLogger(__name__)

CEIL_EPS = 1e-12


def champion_caps(T: Tournament, pround, e: int) -> np.ndarray:
    """``ceil(e * P_round)`` for every team and round, guarded against near-integers."""
    raw = e * np.asarray(pround, dtype=float) - CEIL_EPS
    return np.vectorize(math.ceil, otypes=[np.int64])(raw)


def constraint_violations(T: Tournament, config: DiversificationConfig, caps, previous,
                          N) -> dict[str, np.ndarray]:
    """Per-family violation amount of each candidate row of ``N`` (0 = satisfied)."""
    N = np.asarray(N, dtype=np.int64).reshape(-1, T.game_count)
    X = np.asarray(previous, dtype=np.int64).reshape(-1, T.game_count)
    m = N.shape[0]
    out: dict[str, np.ndarray] = {}
    if X.shape[0] == 0:
        return out
    R = T.round_count
    if config.enable_champion:
        v = np.zeros(m)
        for r in (R - 1, R):
            games = list(T.games_in_round(r))
            counts = np.bincount(X[:, games].ravel(), minlength=T.team_count)
            picks = N[:, games]
            v += np.maximum(0, counts[picks] + 1 - caps[picks, r - 1]).sum(axis=1)
        out["champion"] = v
    if config.enable_finalist:
        a, b = T.children[T.final]
        same = (N[:, None, a] == X[None, :, a]) & (N[:, None, b] == X[None, :, b])
        out["finalist"] = same.sum(axis=1).astype(float)
    if config.global_sigma is not None or config.round_sigmas:
        same = N[:, None, :] == X[None, :, :]
        if config.global_sigma is not None:
            out["global"] = np.maximum(0, same.sum(axis=2) - config.global_sigma).sum(axis=1)
        if config.round_sigmas:
            v = np.zeros(m)
            for r, s in sorted(config.round_sigmas.items()):
                games = list(T.games_in_round(r))
                v += np.maximum(0, same[:, :, games].sum(axis=2) - s).sum(axis=1)
            out["round"] = v
    return out


def _infeasible(step: int, fams: dict[str, np.ndarray], exhaustive: bool):
    binding = [k for k, v in fams.items() if (v > 0).all()] or list(fams)
    how = "no bracket satisfies" if exhaustive else "local search found no bracket satisfying"
    return InfeasibleConstraintsError(
        f"entry {step + 1}: {how} the {', '.join(binding)} constraint(s)", binding)


def sip_generate(T: Tournament, P, e: int, config: DiversificationConfig | None = None,
                 budget: SolveBudget | None = None, settings=None) -> np.ndarray:
    """``e`` entries, each the best single entry allowed by the constraints so far.

    ``config`` defaults to the shipped per-``e`` configuration, clipped to the
    tournament's size.
    """
    if e < 1:
        raise StructuralError(f"need at least one entry, got {e}")
    budget = budget or SolveBudget()
    P = validate_pteam(P, T.team_count)
    if config is None:
        config = (settings or load_settings(use_env=False)).sip_config_for(e).fitted(T)
    config.validate(T)
    pgame, pround = propagate(T, P)
    caps = champion_caps(T, pround, e)
    cols = np.arange(T.game_count)
    exact = use_exact(T, budget.exact)
    penalty = T.max_score + 1.0
    seeds = () if exact else prop_plus_generate(T, pround, e, settings=settings)

    first, _ = best_single_entry(T, P, pgame)
    chosen = [first]
    for k in range(1, e):
        X = np.array(chosen)

        def objective(N, X=X):
            value = (T.weights[None, :] * pgame[N, cols[None, :]]).sum(axis=1)
            fams = constraint_violations(T, config, caps, X, N)
            viol = sum(fams.values()) if fams else 0.0
            return value - penalty * viol

        if exact:
            E, key = enumerate_best(T, objective)
        else:
            starts = sample_pool(T, P, max(1, budget.restarts),
                                 derive_seed(budget.master_seed, 2, k)).outcomes
            E, key = multi_start(T, objective, pround, list(seeds) + [first],
                                 starts[:budget.restarts], budget.max_sweeps,
                                 budget.time_limit_seconds)
        fams = constraint_violations(T, config, caps, X, E[None, :])
        if any(v[0] > 0 for v in fams.values()):
            if exact:
                fams = constraint_violations(T, config, caps, X, all_brackets(T))
            raise _infeasible(k, fams, exact)
        chosen.append(E)
    out = np.array(chosen, dtype=np.int64)
    out.flags.writeable = False
    return out
