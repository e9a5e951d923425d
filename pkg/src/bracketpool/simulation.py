"""Monte Carlo outcome generation and expected-maximum-score estimation.

Every simulated outcome ``i`` of a pool draws its game uniforms from its own
counter-based Philox stream keyed by ``(master_seed, i)``; the uniform used
for game ``g`` is the ``g``-th draw of that stream.  Pools are therefore
bit-identical however the index range is split across threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import StructuralError
from .probability import digest, validate_pteam
from .tournament import Tournament, check_entries, score_matrix

DEFAULT_W_OPTIMIZE = 250
DEFAULT_W_EVALUATE = 10_000
_MASK64 = (1 << 64) - 1


def stream(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for outcome ``index`` of the pool ``master_seed``."""
    key = ((int(master_seed) & _MASK64) << 64) | (int(index) & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(master_seed: int, *path: int) -> int:
    """Child seed for a sub-task (for example one optimizer step)."""
    ss = np.random.SeedSequence(int(master_seed) & _MASK64, spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _play(T: Tournament, P: np.ndarray, U: np.ndarray) -> np.ndarray:
    # U: (n, g) uniforms; the first listed side wins game g iff u < P[first, second]
    n = U.shape[0]
    W = np.empty((n, T.game_count), dtype=np.int64)
    for g in range(T.game_count):
        if T.game_round[g] == 1:
            a = np.full(n, T.teams(g).start)
            b = a + 1
        else:
            ca, cb = T.children[g]
            a, b = W[:, ca], W[:, cb]
        W[:, g] = np.where(U[:, g] < P[a, b], a, b)
    return W


def sim_outcome(T: Tournament, P, rng: np.random.Generator) -> np.ndarray:
    """Draw one tournament outcome, playing games round by round."""
    P = validate_pteam(P, T.team_count)
    return _play(T, P, rng.random((1, T.game_count)))[0]


@dataclass(frozen=True, eq=False)
class OutcomePool:
    """A reproducible set of simulated outcomes (one bracket per row)."""

    master_seed: int
    outcomes: np.ndarray
    team_count: int
    pteam_digest: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def w(self) -> int:
        return self.outcomes.shape[0]


def sample_pool(T: Tournament, P, w: int, master_seed: int, threads: int = 1,
                start: int = 0) -> OutcomePool:
    """Simulate ``w`` outcomes; outcome ``i`` uses ``stream(master_seed, start + i)``."""
    if w < 1:
        raise StructuralError(f"pool size must be positive, got {w}")
    P = validate_pteam(P, T.team_count)
    g = T.game_count

    def chunk(lo, hi):
        U = np.empty((hi - lo, g))
        for k, i in enumerate(range(lo, hi)):
            U[k] = stream(master_seed, start + i).random(g)
        return _play(T, P, U)

    threads = max(1, int(threads))
    bounds = np.linspace(0, w, min(threads, w) + 1).astype(int)
    if threads == 1:
        outs = [chunk(0, w)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            outs = list(ex.map(chunk, bounds[:-1], bounds[1:]))
    O = np.vstack(outs)
    O.flags.writeable = False
    return OutcomePool(int(master_seed), O, T.team_count, digest(P))


def pool_outcomes(T: Tournament, pool) -> np.ndarray:
    O = pool.outcomes if isinstance(pool, OutcomePool) else np.asarray(pool, dtype=np.int64)
    if isinstance(pool, OutcomePool) and pool.team_count != T.team_count:
        raise StructuralError(
            f"pool was simulated for {pool.team_count} teams, tournament has {T.team_count}")
    if O.ndim != 2 or O.shape[1] != T.game_count or O.shape[0] == 0:
        raise StructuralError(f"pool must be a nonempty (w, {T.game_count}) array")
    return O


@dataclass(frozen=True)
class EmsEstimate:
    mean: float
    sample_sd: float
    w: int
    ci95_halfwidth: float

    @classmethod
    def from_samples(cls, x) -> "EmsEstimate":
        x = np.asarray(x, dtype=float)
        n = x.size
        sd = float(x.std(ddof=1)) if n > 1 else 0.0
        return cls(float(x.mean()), sd, n, 1.96 * sd / math.sqrt(n))


def max_scores(T: Tournament, entries, pool, threads: int = 1) -> np.ndarray:
    """Best entry score for every outcome of the pool."""
    E = check_entries(T, entries)
    O = pool_outcomes(T, pool)
    threads = max(1, int(threads))
    if threads == 1 or O.shape[0] < 2 * threads:
        return score_matrix(T, E, O).max(axis=0)
    bounds = np.linspace(0, O.shape[0], threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        parts = ex.map(lambda lo, hi: score_matrix(T, E, O[lo:hi]).max(axis=0),
                       bounds[:-1], bounds[1:])
        return np.concatenate(list(parts))


def mc_ems(T: Tournament, entries, pool, threads: int = 1) -> EmsEstimate:
    """Sample-average estimate of the expected maximum score of ``entries``."""
    return EmsEstimate.from_samples(max_scores(T, entries, pool, threads))


def repeated_ci_halfwidth(T: Tournament, P, entries, w: int, repeats: int,
                          master_seed: int) -> tuple[float, float]:
    """Mean and 95% CI half-width of the EMS from ``repeats`` independent pools.

    Each repeat estimates the EMS on a fresh pool of ``w`` outcomes; the
    half-width is ``1.96 * sd(estimates) / sqrt(repeats)``.
    """
    means = []
    for k in range(repeats):
        pool = sample_pool(T, P, w, derive_seed(master_seed, w, k))
        means.append(mc_ems(T, entries, pool).mean)
    est = EmsEstimate.from_samples(means)
    return est.mean, est.ci95_halfwidth
