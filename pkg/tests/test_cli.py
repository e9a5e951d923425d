import json
import subprocess
import sys

import numpy as np
import pytest

from bracketpool import formats
from bracketpool.cli import run
from bracketpool.probability import random_pteam
from bracketpool.tournament import build_tournament, fill_greedy
from fourteam import P_CLOSE, entries


@pytest.fixture
def files(tmp_path, T4):
    formats.write_pteam(tmp_path / "p4.csv", P_CLOSE)
    formats.write_pteam(tmp_path / "p64.csv", random_pteam(64, np.random.default_rng(3)))
    formats.write_entries(tmp_path / "pair.txt", T4, entries("B2", "B3"))
    return tmp_path


def out_of(capsys, argv):
    code = run(argv)
    return code, capsys.readouterr()


def test_brute_ems(files, capsys):
    code, cap = out_of(capsys, ["ems", "--brute", "--entries", str(files / "pair.txt"),
                                "--pteam", str(files / "p4.csv")])
    assert code == 0 and "2.834250" in cap.out


def test_exact_matches_brute(files, capsys):
    code, cap = out_of(capsys, ["ems", "--exact", "--entries", str(files / "pair.txt"),
                                "--pteam", str(files / "p4.csv"), "--format", "csv"])
    assert code == 0
    assert float(cap.out.splitlines()[1].split(",")[2]) == pytest.approx(2.83425)


def test_usage_errors(files, capsys):
    assert out_of(capsys, ["ems", "--bogus"])[0] == 64
    assert out_of(capsys, ["ems", "--exact"])[0] == 64
    assert out_of(capsys, [])[0] == 64
    assert out_of(capsys, ["optimize", "--method", "nope", "--pteam", "x"])[0] == 64


def test_invalid_input(files, capsys):
    (files / "bad.csv").write_text("team,1,2\n1,0,0.9\n2,0.9,0\n")
    code, cap = out_of(capsys, ["propagate", "--pteam", str(files / "bad.csv")])
    assert code == 2 and "invalid input" in cap.err
    assert out_of(capsys, ["propagate", "--pteam", str(files / "missing.csv")])[0] == 2


def test_guard_refusal(files, capsys):
    T = build_tournament(64)
    chalk = fill_greedy(T, [-1] * T.game_count, np.zeros((T.team_count, T.round_count)))
    formats.write_entries(files / "e4.txt", T, np.tile(chalk, (4, 1)))
    code, cap = out_of(capsys, ["ems", "--exact", "--entries", str(files / "e4.txt"),
                                "--pteam", str(files / "p64.csv")])
    assert code == 3 and "refused" in cap.err


def test_simulate_deterministic_across_threads(files, capsys):
    base = ["simulate", "--pteam", str(files / "p64.csv"), "-w", "3000", "--seed", "9"]
    assert run(base + ["--out", str(files / "a.bin")]) == 0
    assert run(base + ["--out", str(files / "b.bin"), "--threads", "4"]) == 0
    assert (files / "a.bin").read_bytes() == (files / "b.bin").read_bytes()
    man = json.loads((files / "a.bin.manifest.json").read_text())
    assert man["master_seed"] == 9 and man["subcommand"] == "simulate"
    assert str(files / "p64.csv") in man["inputs"]
    assert {"argv", "version", "output_digest", "wall_clock_seconds"} <= set(man)


def test_prop_plus_repeatable(files, capsys):
    argv = ["optimize", "--method", "prop+", "-e", "100", "--seed", "7",
            "--pteam", str(files / "p64.csv")]
    assert run(argv + ["--entries-out", str(files / "x.txt")]) == 0
    assert run(argv + ["--entries-out", str(files / "y.txt")]) == 0
    assert (files / "x.txt").read_text() == (files / "y.txt").read_text()
    T, E = formats.read_entries(files / "x.txt")
    assert E.shape == (100, 63)


def test_mc_from_pool_file(files, capsys):
    assert run(["simulate", "--pteam", str(files / "p4.csv"), "-w", "20000",
                "--out", str(files / "pool.bin")]) == 0
    code, cap = out_of(capsys, ["ems", "--mc", "--entries", str(files / "pair.txt"),
                                "--pool", str(files / "pool.bin"), "--format", "csv"])
    assert code == 0
    row = cap.out.strip().splitlines()[-1].split(",")
    assert row[0] == "mc" and row[2] == "20000"
    assert abs(float(row[3]) - 2.83425) < 4 * float(row[5]) / 1.96


def test_optimize_methods(files, capsys):
    for method in ("single", "prop", "gsaa", "sip"):
        code = run(["optimize", "--method", method, "-e", "2", "--pteam", str(files / "p4.csv"),
                    "--entries-out", str(files / f"{method}.txt"), "--samples", "200"])
        assert code == 0, method
        formats.read_entries(files / f"{method}.txt")


def test_ratings_input(files, capsys):
    (files / "r.csv").write_text("team_id,rating\n1,95\n2,80\n3,70\n4,60\n")
    code, cap = out_of(capsys, ["propagate", "--ratings", str(files / "r.csv"), "--format", "csv"])
    assert code == 0
    rows = [ln.split(",") for ln in cap.out.strip().splitlines()[1:]]
    champion = {int(r[0]): float(r[2]) for r in rows}
    assert max(champion, key=champion.get) == 1


def test_bounds_and_lp_check(files, capsys):
    code, cap = out_of(capsys, ["bounds", "--construction", "example16", "--teams", "8",
                                "--out", str(files / "cov.txt"), "--format", "csv"])
    assert code == 0 and cap.out.strip().splitlines()[1].split(",")[3] == "5"
    assert run(["optimize", "--method", "saa-export", "--form", "IP", "--pteam",
                str(files / "p4.csv"), "--lp-out", str(files / "m.lp")]) == 0
    (files / "good.sol").write_text("x_1_1_1 1\nx_3_1_1 1\nx_1_2_1 1\n")
    (files / "bad.sol").write_text("x_1_1_1 1\nx_3_1_1 1\nx_4_2_1 1\n")
    lp = ["lp-check", "--lp", str(files / "m.lp"), "--solution"]
    assert run(lp + [str(files / "good.sol")]) == 0
    assert run(lp + [str(files / "bad.sol")]) == 2


def test_pool_eval(files, capsys, T4):
    (files / "field.txt").write_text(
        "# tournament t=4\nparticipant: a\n1,1\n2,3\n3,1\nparticipant: b\n1,1\n2,3\n3,1\n")
    (files / "pay.csv").write_text("1,1,100\n2,2,0\n")
    code, cap = out_of(capsys, ["pool-eval", "--field", str(files / "field.txt"), "--pteam",
                                str(files / "p4.csv"), "-w", "500", "--payoffs",
                                str(files / "pay.csv"), "--format", "csv"])
    assert code == 0
    rows = cap.out.strip().splitlines()[1:]
    assert [r.split(",")[-1] for r in rows] == ["50.000000", "50.000000"]


def test_console_script(files):
    res = subprocess.run([sys.executable, "-m", "bracketpool.cli", "ems", "--brute", "--entries",
                          str(files / "pair.txt"), "--pteam", str(files / "p4.csv")],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "2.834250" in res.stdout
