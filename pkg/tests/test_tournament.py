import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bracketpool.errors import InfeasibleBracketError, StructuralError
from bracketpool.tournament import (all_brackets, build_tournament, feasible_mask, fill_greedy,
                                    losers, max_set_score, overlap_counts, score, score_matrix,
                                    validate_bracket)
from fourteam import A, BRACKETS, C, D, entries


def bracket_from_bits(T, bits):
    """Feasible bracket where bit g chooses which side wins game g."""
    B = np.empty(T.game_count, dtype=np.int64)
    for g in range(T.game_count):
        if T.game_round[g] == 1:
            B[g] = T.teams(g).start + bits[g]
        else:
            B[g] = B[T.children[g][bits[g]]]
    return B


@st.composite
def brackets(draw, sizes=(4, 8, 16, 32, 64), n=1):
    T = build_tournament(draw(st.sampled_from(sizes)))
    out = [bracket_from_bits(T, draw(st.lists(st.integers(0, 1), min_size=T.game_count,
                                              max_size=T.game_count)))
           for _ in range(n)]
    return (T, *out)


def test_four_team_structure(T4):
    assert T4.game_count == 3 and T4.round_count == 2
    assert list(T4.teams(T4.final)) == [0, 1, 2, 3]


def test_sixty_four_team_structure():
    T = build_tournament(64)
    assert (T.game_count, T.round_count) == (63, 6)
    assert len(T.games_in_round(1)) == 32


def test_eight_team_predecessor_of_final():
    T = build_tournament(8)
    g = T.gamma(T.final, 0)
    assert T.game_round[g] == 2 and list(T.teams(g)) == [0, 1, 2, 3]
    assert list(T.teams(T.delta(T.final, 0))) == [4, 5, 6, 7]


@pytest.mark.parametrize("t", [0, 2, 6, 12, 100])
def test_bad_team_count(t):
    with pytest.raises(StructuralError):
        build_tournament(t)


@pytest.mark.parametrize("t", [4, 8, 16, 32, 64, 128])
def test_structure_invariants(t):
    T = build_tournament(t)
    for r in range(1, T.round_count + 1):
        games = T.games_in_round(r)
        assert len(games) == t // 2**r
        covered = sorted(x for g in games for x in T.teams(g))
        assert covered == list(range(t))
        for g in games:
            assert len(T.teams(g)) == 2**r
            if r > 1:
                a, b = T.children[g]
                assert list(T.teams(a)) + list(T.teams(b)) == list(T.teams(g))
    for team in range(t):
        path = T.path(team)
        assert path[-1] == T.final
        assert all(T.parent[path[i]] == path[i + 1] for i in range(len(path) - 1))


def test_validate_feasible(T4):
    assert validate_bracket(T4, BRACKETS["B1"]) == []


def test_validate_inconsistent_final(T4):
    v = validate_bracket(T4, (A, C, D))
    assert [(x.game, x.condition) for x in v] == [(2, 3)]


def test_validate_team_outside_game(T4):
    v = validate_bracket(T4, (C, C, C))
    assert [(x.game, x.condition) for x in v] == [(0, 2)]


def test_validate_unknown_team(T4):
    v = validate_bracket(T4, (7, C, C))
    assert v[0].condition == 1


def test_validate_length_mismatch(T4):
    with pytest.raises(StructuralError):
        validate_bracket(T4, (A, C))


def test_score_examples(T4):
    assert score(T4, BRACKETS["B1"], BRACKETS["B1"]) == 4
    assert score(T4, BRACKETS["B1"], BRACKETS["B2"]) == 3
    T = build_tournament(64)
    B = fill_greedy(T, [-1] * 63, np.zeros((64, 6)))
    assert score(T, B, B) == 192


def test_score_rejects_infeasible(T4):
    with pytest.raises(InfeasibleBracketError):
        score(T4, (A, C, D), BRACKETS["B1"])


def test_max_set_score_examples(T4):
    pair = entries("B1", "B6")
    assert max_set_score(T4, pair, BRACKETS["B5"]) == 3
    assert max_set_score(T4, pair, BRACKETS["B4"]) == 1
    assert max_set_score(T4, entries("B3"), BRACKETS["B3"]) == T4.max_score


def test_max_set_score_empty(T4):
    with pytest.raises(StructuralError):
        max_set_score(T4, np.empty((0, 3), dtype=int), BRACKETS["B1"])


def test_overlap_examples(T4):
    assert overlap_counts(T4, BRACKETS["B1"], BRACKETS["B1"]) == ((2, 1), 3)
    assert overlap_counts(T4, BRACKETS["B1"], BRACKETS["B6"]) == ((0, 0), 0)
    assert overlap_counts(T4, BRACKETS["B1"], BRACKETS["B2"]) == ((1, 1), 2)


def test_enumeration_four_teams(T4):
    got = {tuple(int(x) for x in row) for row in all_brackets(T4)}
    assert got == set(BRACKETS.values())


@pytest.mark.parametrize("t", [4, 8, 16])
def test_enumeration_counts(t):
    T = build_tournament(t)
    Bs = all_brackets(T)
    assert Bs.shape == (2 ** (t - 1), t - 1)
    assert feasible_mask(T, Bs).all()
    assert len(np.unique(Bs, axis=0)) == Bs.shape[0]


@given(brackets(n=2))
def test_score_symmetric_and_bounded(case):
    T, E, O = case
    s = score(T, E, O)
    assert s == score(T, O, E)
    assert 0 <= s <= T.max_score
    assert score_matrix(T, E, O)[0, 0] == s


@given(brackets())
def test_round_selection_counts(case):
    T, B = case
    assert validate_bracket(T, B) == []
    for r in range(1, T.round_count + 1):
        picked = B[list(T.games_in_round(r))]
        assert len(set(picked.tolist())) == T.team_count // 2**r
        if r > 1:
            prev = set(B[list(T.games_in_round(r - 1))].tolist())
            assert set(picked.tolist()) <= prev
    # every round is worth t/2 points
    assert score(T, B, B) == T.round_count * T.team_count // 2


@given(brackets(n=2))
def test_overlap_total_extremes(case):
    T, E1, E2 = case
    per_round, total = overlap_counts(T, E1, E2)
    assert total == sum(per_round)
    assert (total == T.game_count) == bool((E1 == E2).all())
    assert overlap_counts(T, E1, E1)[1] == T.game_count


@given(brackets())
def test_losers_complement_winners(case):
    T, B = case
    L = losers(T, B)
    for g in range(T.game_count):
        assert L[g] in T.teams(g) and L[g] != B[g]
