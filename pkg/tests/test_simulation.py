import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import chisquare

from bracketpool.errors import StructuralError
from bracketpool.exact import expected_single_score, outcome_probabilities
from bracketpool.probability import propagate, random_pteam, uniform_pteam
from bracketpool.simulation import (EmsEstimate, derive_seed, mc_ems, sample_pool, sim_outcome,
                                    stream)
from bracketpool.tournament import all_brackets, build_tournament, score_matrix
from fourteam import A, BRACKETS, P_CLOSE, entries


def bracket_index(T, O):
    """Row of each outcome in the enumeration of all brackets."""
    B = all_brackets(T)
    lookup = {tuple(row): i for i, row in enumerate(B.tolist())}
    return np.array([lookup[tuple(row)] for row in O.tolist()])


def test_binary_matrix_is_deterministic():
    T = build_tournament(8)
    P = np.triu(np.ones((8, 8)), 1)  # lower index always wins
    expected = np.array([2 * k for k in range(4)] + [0, 4, 0])
    for i in range(20):
        assert (sim_outcome(T, P, stream(3, i)) == expected).all()


def test_uniform_brackets_equally_likely(T4):
    n = 80_000
    counts = np.bincount(bracket_index(T4, sample_pool(T4, uniform_pteam(4), n, 2024).outcomes),
                         minlength=8)
    sigma = np.sqrt(n * (1 / 8) * (7 / 8))
    assert np.all(np.abs(counts - n / 8) < 3 * sigma)


def test_first_game_frequency(T4):
    n = 40_000
    O = sample_pool(T4, P_CLOSE, n, 5).outcomes
    freq = (O[:, 0] == A).mean()
    assert abs(freq - 0.7) < 3 * np.sqrt(0.7 * 0.3 / n)


def test_goodness_of_fit(T4):
    n = 100_000
    counts = np.bincount(bracket_index(T4, sample_pool(T4, P_CLOSE, n, 19).outcomes),
                         minlength=8)
    expected = n * outcome_probabilities(T4, P_CLOSE, all_brackets(T4))
    assert chisquare(counts, expected).pvalue > 0.001


def test_pool_reproducible():
    T = build_tournament(64)
    P = random_pteam(64, np.random.default_rng(0))
    a = sample_pool(T, P, 250, 7)
    b = sample_pool(T, P, 250, 7)
    c = sample_pool(T, P, 250, 7, threads=8)
    assert np.array_equal(a.outcomes, b.outcomes)
    assert np.array_equal(a.outcomes, c.outcomes)
    assert a.pteam_digest == c.pteam_digest


def test_pool_streams_are_per_index():
    T = build_tournament(16)
    P = random_pteam(16, np.random.default_rng(1))
    full = sample_pool(T, P, 30, 99).outcomes
    tail = sample_pool(T, P, 10, 99, start=20).outcomes
    assert np.array_equal(full[20:], tail)


def test_empty_pool_rejected(T4):
    with pytest.raises(StructuralError):
        sample_pool(T4, P_CLOSE, 0, 1)


def test_derived_seeds_differ():
    assert derive_seed(5, 0, 1) != derive_seed(5, 0, 2) != derive_seed(6, 0, 1)
    assert derive_seed(5, 0, 1) == derive_seed(5, 0, 1)


def test_single_entry_mean_matches_expectation():
    T = build_tournament(16)
    P = random_pteam(16, np.random.default_rng(2))
    pgame, _ = propagate(T, P)
    E = sample_pool(T, P, 1, 3).outcomes
    est = mc_ems(T, E, sample_pool(T, P, 20_000, 4))
    assert abs(est.mean - expected_single_score(T, pgame, E[0])) < 4 * est.ci95_halfwidth / 1.96


def test_all_brackets_always_perfect(T4):
    est = mc_ems(T4, all_brackets(T4), sample_pool(T4, P_CLOSE, 500, 8))
    assert est.mean == 4.0 and est.sample_sd == 0.0


def test_disjoint_pair_uniform(T4):
    est = mc_ems(T4, entries("B1", "B6"), sample_pool(T4, uniform_pteam(4), 40_000, 9))
    assert abs(est.mean - 2.5) < 4 * est.ci95_halfwidth / 1.96


def test_best_single_entry_estimate(T4):
    est = mc_ems(T4, entries("B1"), sample_pool(T4, P_CLOSE, 40_000, 10))
    assert abs(est.mean - 2.0515) < 4 * est.ci95_halfwidth / 1.96


def test_estimate_fields():
    est = EmsEstimate.from_samples([1, 2, 3, 4])
    assert est.mean == 2.5 and est.w == 4
    assert est.ci95_halfwidth == pytest.approx(1.96 * est.sample_sd / 2)


def test_ci_width_shrinks():
    T = build_tournament(64)
    P = random_pteam(64, np.random.default_rng(4))
    E = sample_pool(T, P, 2, 5).outcomes
    widths = [mc_ems(T, E, sample_pool(T, P, w, 6)).ci95_halfwidth for w in (50, 250, 1000)]
    assert widths[0] > widths[1] > widths[2]


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5))
def test_in_sample_monotone(seed, k, extra):
    T = build_tournament(8)
    rng = np.random.default_rng(seed)
    P = random_pteam(8, rng)
    pool = sample_pool(T, P, 60, seed)
    bigger = sample_pool(T, P, k + extra, seed + 1).outcomes
    assert mc_ems(T, bigger[:k], pool).mean <= mc_ems(T, bigger, pool).mean + 1e-12


def test_threaded_scoring_matches(T4):
    pool = sample_pool(T4, P_CLOSE, 1000, 12)
    E = entries("B2", "B3")
    assert mc_ems(T4, E, pool, threads=4) == mc_ems(T4, E, pool)
    assert score_matrix(T4, E, pool.outcomes).shape == (2, 1000)
