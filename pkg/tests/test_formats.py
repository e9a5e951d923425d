import numpy as np
import pytest

from bracketpool import formats
from bracketpool.errors import InfeasibleBracketError, StructuralError
from bracketpool.pooleval import Field
from bracketpool.probability import pteam_from_ratings, random_pteam
from bracketpool.simulation import sample_pool
from bracketpool.tournament import build_tournament
from fourteam import BRACKETS, P_CLOSE, entries


def test_bracket_text(T4):
    text = formats.format_entries(T4, entries("B1"))
    assert text == "# tournament t=4\n1,1\n2,3\n3,1\n"


def test_entries_round_trip(T4):
    E = entries("B1", "B6", "B8")
    T, back = formats.parse_entries(formats.format_entries(T4, E))
    assert T.team_count == 4 and (back == E).all()


def test_entries_ignore_comments_and_order(T4):
    T, E = formats.parse_entries("# tournament t=4\n# note\n3,1\n1,1\n2,3\n")
    assert E[0].tolist() == list(BRACKETS["B1"])


@pytest.mark.parametrize("text", [
    "1,1\n2,3\n3,1\n",
    "# tournament t=4\n1,1\n2,3\n",
    "# tournament t=4\n1,1\n2,3\n4,1\n",
    "# tournament t=4\n1;1\n2,3\n3,1\n",
    "# tournament t=4\n",
])
def test_malformed_entries(text):
    with pytest.raises(StructuralError):
        formats.parse_entries(text)


def test_infeasible_entry_rejected():
    with pytest.raises(InfeasibleBracketError):
        formats.parse_entries("# tournament t=4\n1,1\n2,3\n3,4\n")


def test_field_round_trip(T4):
    f = Field({"ann": entries("B1", "B7"), "bo": entries("B3")})
    T, back = formats.parse_field(formats.format_field(T4, f))
    assert back.ids == ["ann", "bo"]
    assert (back.participants["ann"] == f.participants["ann"]).all()


def test_field_errors():
    with pytest.raises(StructuralError):
        formats.parse_field("# tournament t=4\n1,1\n2,3\n3,1\n")
    dup = "# tournament t=4\nparticipant: a\n1,1\n2,3\n3,1\nparticipant: a\n1,1\n2,3\n3,1\n"
    with pytest.raises(StructuralError):
        formats.parse_field(dup)


def test_pool_round_trip(tmp_path):
    T = build_tournament(64)
    P = random_pteam(64, np.random.default_rng(1))
    pool = sample_pool(T, P, 300, 17)
    formats.write_pool(tmp_path / "p.bin", pool)
    back = formats.read_pool(tmp_path / "p.bin")
    assert (back.outcomes == pool.outcomes).all()
    assert (back.master_seed, back.team_count, back.pteam_digest) == (17, 64, pool.pteam_digest)


def test_pool_truncated(tmp_path, T4):
    formats.write_pool(tmp_path / "p.bin", sample_pool(T4, P_CLOSE, 5, 0))
    raw = (tmp_path / "p.bin").read_bytes()
    (tmp_path / "p.bin").write_bytes(raw[:-2])
    with pytest.raises(StructuralError):
        formats.read_pool(tmp_path / "p.bin")
    (tmp_path / "q.bin").write_bytes(b"garbage\n1234")
    with pytest.raises(StructuralError):
        formats.read_pool(tmp_path / "q.bin")


def test_pteam_round_trip(tmp_path):
    P = random_pteam(8, np.random.default_rng(5))
    formats.write_pteam(tmp_path / "p.csv", P)
    assert np.array_equal(formats.read_pteam(tmp_path / "p.csv"), P)


def test_pteam_dash_diagonal(tmp_path):
    (tmp_path / "p.csv").write_text("team,1,2,3,4\n1,-,0.7,0.5,0.5\n2,0.3,-,0.5,0.5\n"
                                    "3,0.5,0.5,-,0.6\n4,0.5,0.5,0.4,-\n")
    assert formats.read_pteam(tmp_path / "p.csv")[0, 1] == 0.7


def test_pteam_bad_axes(tmp_path):
    (tmp_path / "p.csv").write_text("team,2,1\n2,0,0.5\n1,0.5,0\n")
    with pytest.raises(StructuralError):
        formats.read_pteam(tmp_path / "p.csv")


def test_ratings_keep_file_ids(tmp_path):
    (tmp_path / "r.csv").write_text("team_id,rating\n1,90\n2,80\n3,70\n4,60\n")
    ratings = formats.read_ratings(tmp_path / "r.csv")
    assert ratings == {1: 90.0, 2: 80.0, 3: 70.0, 4: 60.0}
    P = pteam_from_ratings(ratings, team_count=4)
    assert P[0, 3] > 0.5 and np.allclose(P, pteam_from_ratings([90, 80, 70, 60]))


def test_payoffs(tmp_path):
    (tmp_path / "pay.csv").write_text("rank_lo,rank_hi,amount\n1,1,100\n2,3,10\n")
    assert formats.read_payoffs(tmp_path / "pay.csv").per_rank(4).tolist() == [100, 10, 10, 0]
