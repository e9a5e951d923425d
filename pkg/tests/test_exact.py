import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bracketpool.errors import GuardRefusal, InfeasibleBracketError
from bracketpool.exact import (brute_force_ems, dp_ems, dp_runtime_probe, dp_state_count,
                               dp_table, expected_single_score, outcome_probability)
from bracketpool.probability import propagate, random_pteam, uniform_pteam
from bracketpool.simulation import sample_pool
from bracketpool.tournament import all_brackets, build_tournament
from fourteam import A, BRACKETS, C, D, P_CLOSE, P_DOMINANT, entries


def test_uniform_outcome_probability(T4):
    for B in BRACKETS.values():
        assert outcome_probability(T4, uniform_pteam(4), B) == pytest.approx(1 / 8)


def test_binary_outcome_probability(T4):
    P = np.triu(np.ones((4, 4)), 1)
    assert outcome_probability(T4, P, BRACKETS["B1"]) == 1.0
    assert outcome_probability(T4, P, BRACKETS["B2"]) == 0.0


def test_outcome_probability_product(T4):
    assert outcome_probability(T4, P_CLOSE, BRACKETS["B1"]) == pytest.approx(0.7 * 0.55 * 0.55)
    assert outcome_probability(T4, P_CLOSE, BRACKETS["B1"]) == pytest.approx(0.21175)


def test_outcome_probability_infeasible(T4):
    with pytest.raises(InfeasibleBracketError):
        outcome_probability(T4, P_CLOSE, (A, C, D))


@pytest.mark.parametrize("ems", [brute_force_ems, dp_ems])
@pytest.mark.parametrize("names, value", [
    (("B1",), 2.0515), (("B1", "B7"), 2.72275), (("B2", "B3"), 2.83425)])
def test_reference_values(T4, ems, names, value):
    assert abs(ems(T4, P_CLOSE, entries(*names)) - value) < 1e-9


def test_brute_force_refuses_large():
    T = build_tournament(32)
    P = uniform_pteam(32)
    with pytest.raises(GuardRefusal):
        brute_force_ems(T, P, sample_pool(T, P, 1, 0).outcomes)


def test_dominant_favourite_pair(T4):
    B = all_brackets(T4)
    vals = {(i, j): dp_ems(T4, P_DOMINANT, B[[i, j]])
            for i, j in itertools.combinations(range(8), 2)}
    best = max(vals, key=vals.get)
    assert [tuple(B[k]) for k in best] == [BRACKETS["B1"], BRACKETS["B2"]]
    assert B[best[0]][2] == B[best[1]][2] == A


def test_uniform_disjoint_pair(T4):
    assert dp_ems(T4, uniform_pteam(4), entries("B1", "B8")) == pytest.approx(2.5, abs=1e-12)


@pytest.mark.parametrize("t, e", [(4, 1), (4, 2), (8, 1), (8, 2), (16, 1), (16, 2), (8, 3)])
def test_dp_matches_brute_force(t, e, rng):
    T = build_tournament(t)
    for _ in range(10):
        P = random_pteam(t, rng)
        E = sample_pool(T, P, e, int(rng.integers(1 << 40))).outcomes
        assert abs(dp_ems(T, P, E) - brute_force_ems(T, P, E)) < 1e-9


@given(st.sampled_from([4, 8, 16, 32]), st.integers(0, 2**32 - 1))
def test_single_entry_closed_form(t, seed):
    T = build_tournament(t)
    P = random_pteam(t, np.random.default_rng(seed))
    E = sample_pool(T, P, 1, seed).outcomes
    pgame, _ = propagate(T, P)
    assert abs(dp_ems(T, P, E) - expected_single_score(T, pgame, E[0])) < 1e-9


def test_table_mass_is_one(rng):
    T = build_tournament(16)
    P = random_pteam(16, rng)
    Z = dp_table(T, P, sample_pool(T, P, 2, 1).outcomes)
    for g, table in enumerate(Z):
        assert abs(table.sum() - 1.0) < 1e-9
        assert table.min() >= 0.0


def test_guard_three_entries_large():
    T = build_tournament(16)
    P = uniform_pteam(16)
    with pytest.raises(GuardRefusal, match="states"):
        dp_ems(T, P, sample_pool(T, P, 3, 0).outcomes)


def test_guard_four_entries():
    T = build_tournament(64)
    P = uniform_pteam(64)
    with pytest.raises(GuardRefusal):
        dp_ems(T, P, sample_pool(T, P, 4, 0).outcomes)
    assert dp_state_count(T, 4) > 1e10


def test_runtime_probe():
    rows = dp_runtime_probe([4, 8, 16])
    assert [t for t, _ in rows] == [4, 8, 16]
    assert all(s >= 0 for _, s in rows)


@given(st.integers(0, 2**32 - 1), st.integers(0, 7), st.integers(0, 7), st.integers(0, 7))
def test_submodular_on_random_matrices(seed, i, j, x):
    T = build_tournament(4)
    P = random_pteam(4, np.random.default_rng(seed))
    B = all_brackets(T)
    f = lambda idx: brute_force_ems(T, P, B[sorted(idx)]) if idx else 0.0  # noqa: E731
    small, big = {i}, {i, j}
    if x in big:
        return
    assert f(small | {x}) - f(small) >= f(big | {x}) - f(big) - 1e-12
    assert f(small | {x}) >= f(small) - 1e-12
