"""Win-probability tables: team-vs-team, per game and per round, plus model metrics.

``pteam[i, j]`` is the probability team ``i`` beats team ``j``.  The game table
``pgame[i, g]`` is the probability team ``i`` wins game ``g`` and the round
table ``pround[i, r-1]`` the probability it wins its round-``r`` game.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Mapping

import numpy as np

from .errors import ProbabilityError
from .tournament import Tournament

TOL = 1e-9
ELO_SCALE = 30.464
LOGLOSS_CLIP = 1e-15


def validate_pteam(P, team_count: int | None = None) -> np.ndarray:
    """Check and return a team-by-team win matrix with a zero diagonal."""
    P = np.array(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ProbabilityError(f"team win matrix must be square, got {P.shape}")
    if team_count is not None and P.shape[0] != team_count:
        raise ProbabilityError(
            f"team win matrix is {P.shape[0]}x{P.shape[0]}, tournament has {team_count} teams")
    np.fill_diagonal(P, 0.0)
    if not np.isfinite(P).all():
        raise ProbabilityError("team win matrix has non-finite entries")
    if (P < -TOL).any() or (P > 1 + TOL).any():
        raise ProbabilityError("team win matrix entries must lie in [0, 1]")
    off = ~np.eye(P.shape[0], dtype=bool)
    err = np.abs(P + P.T - 1.0)[off]
    if err.size and err.max() > TOL:
        i, j = np.argwhere(np.abs(P + P.T - 1.0) * off > TOL)[0]
        raise ProbabilityError(
            f"P[{i + 1},{j + 1}] + P[{j + 1},{i + 1}] = {P[i, j] + P[j, i]!r}, expected 1")
    P = np.clip(P, 0.0, 1.0)
    P.flags.writeable = False
    return P


def pteam_from_ratings(ratings: Mapping[int, float] | Iterable[float],
                       scale: float = ELO_SCALE, team_count: int | None = None) -> np.ndarray:
    """Elo-style win matrix from team ratings.

    ``P[a, b] = 1 / (1 + 10 ** ((r_b - r_a) * scale / 400))`` so the higher
    rated team is the favourite.  Writing the exponent as ``r_a - r_b``
    would make the stronger team the underdog; the conventional sign is used.

    ``ratings`` is either a sequence indexed by team or a mapping from 1-based
    team id to rating; with a mapping every id ``1..team_count`` must appear.
    """
    if isinstance(ratings, Mapping):
        n = team_count if team_count is not None else len(ratings)
        missing = [tid for tid in range(1, n + 1) if tid not in ratings]
        if missing:
            raise ProbabilityError(f"no rating for team {missing[0]}")
        r = np.array([float(ratings[tid]) for tid in range(1, n + 1)])
    else:
        r = np.asarray(list(ratings), dtype=float)
        if team_count is not None and r.size != team_count:
            raise ProbabilityError(f"expected {team_count} ratings, got {r.size}")
    if not np.isfinite(r).all():
        bad = int(np.flatnonzero(~np.isfinite(r))[0])
        raise ProbabilityError(f"rating of team {bad + 1} is not finite")
    diff = (r[None, :] - r[:, None]) * scale / 400.0
    P = 1.0 / (1.0 + 10.0 ** diff)
    # exact complementarity regardless of rounding
    upper = np.triu(P, 1)
    P = upper + (1.0 - upper.T) * np.tri(r.size, k=-1)
    np.fill_diagonal(P, 0.0)
    return validate_pteam(P)


def propagate(T: Tournament, P) -> tuple[np.ndarray, np.ndarray]:
    """Propagate a team win matrix to the game and round win tables.

    A team wins game ``g`` when it wins the game leading to ``g`` and then
    beats whichever opponent arrives from the other side.
    """
    P = validate_pteam(P, T.team_count)
    t = T.team_count
    pgame = np.zeros((t, T.game_count))
    for g in range(T.game_count):
        r = int(T.game_round[g])
        lo = T.teams(g).start
        if r == 1:
            pgame[lo, g] = P[lo, lo + 1]
            pgame[lo + 1, g] = P[lo + 1, lo]
            continue
        a, b = T.children[g]
        A, B = T.teams(a), T.teams(b)
        pa = pgame[A.start:A.stop, a]
        pb = pgame[B.start:B.stop, b]
        pgame[A.start:A.stop, g] = pa * (P[A.start:A.stop, B.start:B.stop] @ pb)
        pgame[B.start:B.stop, g] = pb * (P[B.start:B.stop, A.start:A.stop] @ pa)
    pround = np.zeros((t, T.round_count))
    for r in range(1, T.round_count + 1):
        pround[:, r - 1] = pgame[:, list(T.games_in_round(r))].sum(axis=1)
    pgame.flags.writeable = False
    pround.flags.writeable = False
    return pgame, pround


def check_pgame(T: Tournament, pgame, tol: float = TOL) -> None:
    pgame = np.asarray(pgame, dtype=float)
    for g in range(T.game_count):
        inside = T.teams(g)
        mass = pgame[inside.start:inside.stop, g].sum()
        if abs(mass - 1.0) > tol:
            raise ProbabilityError(f"game {g + 1}: win probabilities sum to {mass!r}")
        outside = np.delete(pgame[:, g], np.arange(inside.start, inside.stop))
        if np.abs(outside).max(initial=0.0) > tol:
            raise ProbabilityError(f"game {g + 1}: a team outside the game has mass")


def check_pround(T: Tournament, pround, tol: float = TOL) -> None:
    pround = np.asarray(pround, dtype=float)
    t = T.team_count
    for r in range(1, T.round_count + 1):
        s = pround[:, r - 1].sum()
        if abs(s - t / 2**r) > tol:
            raise ProbabilityError(f"round {r}: column sums to {s!r}, expected {t / 2**r}")
    if (np.diff(pround, axis=1) > tol).any():
        raise ProbabilityError("round win probabilities increase with the round")


def model_metrics(predictions: Iterable[tuple[float, int]]) -> tuple[float, float]:
    """Accuracy and log-loss of probabilistic predictions ``(p, y)``.

    A prediction is correct when ``p > 0.5`` and ``y == 1`` or ``p < 0.5`` and
    ``y == 0``; ``p == 0.5`` counts as half correct.  Probabilities are clamped
    to ``[1e-15, 1 - 1e-15]`` before taking logs.
    """
    data = np.asarray(list(predictions), dtype=float)
    if data.size == 0:
        raise ProbabilityError("model_metrics needs at least one prediction")
    p, y = data[:, 0], data[:, 1]
    hit = np.where(p == 0.5, 0.5, ((p > 0.5) == (y == 1)).astype(float))
    pc = np.clip(p, LOGLOSS_CLIP, 1 - LOGLOSS_CLIP)
    logloss = -np.mean(y * np.log(pc) + (1 - y) * np.log(1 - pc))
    return float(hit.mean()), float(logloss)


def kl_from_uniform(P) -> float:
    """Divergence of a win matrix from the all-0.5 matrix (natural log).

    Only ordered pairs with ``P[i, j] > 0.5`` contribute ``P log(P / 0.5)``.
    """
    P = validate_pteam(P)
    fav = P[P > 0.5]
    return float(np.sum(fav * np.log(fav / 0.5)))


def uniform_pteam(team_count: int) -> np.ndarray:
    P = np.full((team_count, team_count), 0.5)
    np.fill_diagonal(P, 0.0)
    return validate_pteam(P)


def random_pteam(team_count: int, rng: np.random.Generator) -> np.ndarray:
    """Unstructured random win matrix: independent uniform upper triangle."""
    U = rng.random((team_count, team_count))
    upper = np.triu(U, 1)
    P = upper + (1.0 - upper.T) * np.tri(team_count, k=-1)
    np.fill_diagonal(P, 0.0)
    return validate_pteam(P)


def seed_order(size: int) -> list[int]:
    """Seeds by bracket position so that seed ``s`` meets ``size + 1 - s`` first."""
    order = [1, 2]
    while len(order) < size:
        n = 2 * len(order) + 1
        order = [s for a in order for s in (a, n - a)]
    return order


def seeded_ratings(team_count: int, rng: np.random.Generator,
                   top: float = 92.0, spread: float = 22.0, noise: float = 2.5) -> np.ndarray:
    """Random ratings resembling a seeded field, laid out in bracket order.

    Each block of up to 16 teams is a region seeded from 1; a team's rating
    falls linearly with its seed plus Gaussian noise.
    """
    size = min(team_count, 16)
    seeds = np.array(seed_order(size) * (team_count // size), dtype=float)
    base = top - spread * (seeds - 1) / (size - 1)
    return base + rng.normal(0.0, noise, size=team_count)


def random_seeded_pteam(team_count: int, rng: np.random.Generator, **kw) -> np.ndarray:
    return pteam_from_ratings(seeded_ratings(team_count, rng, **kw))


def digest(P) -> str:
    """Stable hex digest of a probability table (used in file headers)."""
    arr = np.ascontiguousarray(np.asarray(P, dtype="<f8"))
    return hashlib.sha256(arr.tobytes()).hexdigest()[:16]

