"""Evaluate participants' entry sets against a field on a shared outcome pool."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StructuralError
from .simulation import EmsEstimate, max_scores, pool_outcomes
from .tournament import Tournament, check_entries, score_matrix

TIE_POLICIES = ("share", "optimistic")


@dataclass(frozen=True)
class Field:
    """Participant id -> entry set, in insertion order."""

    participants: dict[str, np.ndarray]

    def __post_init__(self):
        if not self.participants:
            raise StructuralError("field has no participants")

    def checked(self, T: Tournament) -> "Field":
        return Field({p: check_entries(T, E) for p, E in self.participants.items()})

    @property
    def ids(self) -> list[str]:
        return list(self.participants)


@dataclass(frozen=True)
class PayoffTable:
    """Inclusive 1-based rank ranges and the amount paid to each rank in them."""

    rows: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        last = 0
        for lo, hi, amount in self.rows:
            if lo <= last or hi < lo or amount < 0:
                raise StructuralError(
                    "payoff rows must be ascending, non-overlapping rank ranges with amounts >= 0")
            last = hi

    def per_rank(self, n: int) -> np.ndarray:
        """Amount for ranks ``1..n`` (index 0 is rank 1); unpaid ranks get 0."""
        out = np.zeros(n)
        for lo, hi, amount in self.rows:
            if lo <= n:
                out[lo - 1:min(hi, n)] = amount
        return out


def victory_probability(T: Tournament, field: Field, pool, threads: int = 1) -> dict[str, float]:
    """Fraction of outcomes in which each participant ties or beats the field's best."""
    field = field.checked(T)
    best = np.array([max_scores(T, E, pool, threads) for E in field.participants.values()])
    top = best.max(axis=0)
    return {p: float((best[i] == top).mean()) for i, p in enumerate(field.ids)}


def field_ems(T: Tournament, field: Field, pool, threads: int = 1) -> dict[str, EmsEstimate]:
    field = field.checked(T)
    return {p: EmsEstimate.from_samples(max_scores(T, E, pool, threads))
            for p, E in field.participants.items()}


def expected_payoff(T: Tournament, field: Field, pool, payoffs: PayoffTable,
                    tie_policy: str = "share") -> dict[str, float]:
    """Mean payout per participant, summed over their entries.

    Entries are ranked by score on every outcome.  A group of ``n`` tied
    entries occupies ranks ``k+1 .. k+n``; under ``share`` each receives the
    average payout of those ranks, under ``optimistic`` each receives the
    payout of rank ``k+1``.
    """
    if tie_policy not in TIE_POLICIES:
        raise StructuralError(f"unknown tie policy {tie_policy!r}; choose from {TIE_POLICIES}")
    field = field.checked(T)
    O = pool_outcomes(T, pool)
    owners = np.concatenate([np.full(E.shape[0], i) for i, E in enumerate(field.participants.values())])
    S = score_matrix(T, np.vstack(list(field.participants.values())), O)
    n = S.shape[0]
    pay = payoffs.per_rank(n)
    cum = np.concatenate([[0.0], np.cumsum(pay)])
    total = np.zeros(n)
    for w in range(S.shape[1]):
        col = S[:, w]
        srt = np.sort(col)
        left = np.searchsorted(srt, col, "left")
        right = np.searchsorted(srt, col, "right")
        above = n - right
        ties = right - left
        if tie_policy == "share":
            total += (cum[above + ties] - cum[above]) / ties
        else:
            total += pay[above]
    per_entry = total / S.shape[1]
    sums = np.bincount(owners, weights=per_entry, minlength=len(field.ids))
    return {p: float(sums[i]) for i, p in enumerate(field.ids)}
