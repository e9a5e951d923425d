"""Text and binary file formats.  Files use 1-based team and game ids.

Bracket::

    # tournament t=4
    1,1
    2,3
    3,1

Entry set: bracket bodies separated by ``---`` lines under one header.
Field: entry-set blocks each introduced by ``participant: <id>``.
Pool: one ASCII header line ``BRACKETPOOL-POOL t=.. w=.. seed=.. digest=..``
followed by ``w * (t-1)`` little-endian uint16 winner ids.
"""

from __future__ import annotations

import csv
import io
import re
from pathlib import Path

import numpy as np

from .errors import StructuralError
from .pooleval import Field, PayoffTable
from .probability import validate_pteam
from .simulation import OutcomePool
from .tournament import Tournament, build_tournament, check_entries

_HEADER = re.compile(r"#\s*tournament\s+t\s*=\s*(\d+)")
POOL_MAGIC = "BRACKETPOOL-POOL"


def _body(T: Tournament, B) -> list[str]:
    return [f"{g + 1},{int(w) + 1}" for g, w in enumerate(B)]


def format_entries(T: Tournament, entries) -> str:
    E = check_entries(T, entries)
    lines = [f"# tournament t={T.team_count}"]
    for k, row in enumerate(E):
        if k:
            lines.append("---")
        lines.extend(_body(T, row))
    return "\n".join(lines) + "\n"


def _parse_block(T: Tournament, lines: list[str]) -> np.ndarray:
    B = np.full(T.game_count, -1, dtype=np.int64)
    for line in lines:
        try:
            g, w = (int(x) for x in line.split(","))
        except ValueError:
            raise StructuralError(f"expected 'game_index,winner_team_id', got {line!r}") from None
        if not 1 <= g <= T.game_count:
            raise StructuralError(f"game index {g} outside 1..{T.game_count}")
        B[g - 1] = w - 1
    if (B < 0).any():
        missing = np.flatnonzero(B < 0) + 1
        raise StructuralError(f"bracket has no pick for games {missing.tolist()}")
    return B


def _split_header(text: str) -> tuple[Tournament, list[str]]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not _HEADER.fullmatch(lines[0]):
        raise StructuralError("missing '# tournament t=<n>' header")
    return build_tournament(int(_HEADER.fullmatch(lines[0]).group(1))), lines[1:]


def _blocks(lines: list[str]) -> list[list[str]]:
    out, cur = [], []
    for ln in lines:
        if ln == "---":
            out.append(cur)
            cur = []
        elif not ln.startswith("#"):
            cur.append(ln)
    out.append(cur)
    return [b for b in out if b]


def parse_entries(text: str) -> tuple[Tournament, np.ndarray]:
    T, lines = _split_header(text)
    blocks = _blocks(lines)
    if not blocks:
        raise StructuralError("entry file holds no brackets")
    return T, check_entries(T, np.array([_parse_block(T, b) for b in blocks]))


def read_entries(path) -> tuple[Tournament, np.ndarray]:
    return parse_entries(Path(path).read_text())


def write_entries(path, T: Tournament, entries) -> None:
    Path(path).write_text(format_entries(T, entries))


def format_field(T: Tournament, field: Field) -> str:
    lines = [f"# tournament t={T.team_count}"]
    for pid, E in field.participants.items():
        lines.append(f"participant: {pid}")
        lines.extend(format_entries(T, E).splitlines()[1:])
    return "\n".join(lines) + "\n"


def parse_field(text: str) -> tuple[Tournament, Field]:
    T, lines = _split_header(text)
    groups: dict[str, list[str]] = {}
    cur = None
    for ln in lines:
        if ln.startswith("participant:"):
            cur = ln.split(":", 1)[1].strip()
            if cur in groups:
                raise StructuralError(f"participant {cur!r} listed twice")
            groups[cur] = []
        elif cur is None:
            raise StructuralError("field entries must follow a 'participant: <id>' line")
        else:
            groups[cur].append(ln)
    parts = {p: check_entries(T, np.array([_parse_block(T, b) for b in _blocks(ls)]))
             for p, ls in groups.items()}
    return T, Field(parts)


def read_field(path) -> tuple[Tournament, Field]:
    return parse_field(Path(path).read_text())


def _rows(path) -> list[list[str]]:
    with open(path, newline="") as fh:
        return [r for r in csv.reader(fh) if r and not r[0].startswith("#")]


def read_pteam(path) -> np.ndarray:
    """Square CSV with team ids along the header row and first column."""
    rows = _rows(path)
    ids = [int(x) for x in rows[0][1:]]
    t = len(ids)
    if ids != list(range(1, t + 1)) or len(rows) != t + 1:
        raise StructuralError("P_team CSV must list teams 1..t in order on both axes")
    P = np.zeros((t, t))
    for i, row in enumerate(rows[1:]):
        if int(row[0]) != i + 1 or len(row) != t + 1:
            raise StructuralError(f"malformed P_team row for team {i + 1}")
        P[i] = [float(x) if x.strip() not in ("", "-") else 0.0 for x in row[1:]]
    return validate_pteam(P)


def _write_table(path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    Path(path).write_text(buf.getvalue())


def write_pteam(path, P) -> None:
    P = np.asarray(P)
    t = P.shape[0]
    _write_table(path, ["team"] + list(range(1, t + 1)),
                 [[i + 1] + [f"{x:.17g}" for x in P[i]] for i in range(t)])


def write_team_table(path, table, column_label: str, decimals: int = 17) -> None:
    """Team-by-column table (P_game or P_round) with 1-based column labels."""
    table = np.asarray(table)
    fmt = f"{{:.{decimals}g}}"
    _write_table(path, ["team"] + [f"{column_label}{j + 1}" for j in range(table.shape[1])],
                 [[i + 1] + [fmt.format(x) for x in table[i]] for i in range(table.shape[0])])


def read_ratings(path) -> dict[int, float]:
    """``team_id,rating`` CSV; keys stay 1-based as in the file."""
    rows = _rows(path)
    if rows and not rows[0][0].strip().lstrip("-").isdigit():
        rows = rows[1:]
    return {int(r[0]): float(r[1]) for r in rows}


def read_team_metadata(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [dict(r, team_id=int(r["team_id"])) for r in csv.DictReader(fh)]


def read_payoffs(path) -> PayoffTable:
    rows = _rows(path)
    if rows and not rows[0][0].strip().isdigit():
        rows = rows[1:]
    return PayoffTable(tuple((int(a), int(b), float(c)) for a, b, c in rows))


def write_pool(path, pool: OutcomePool) -> None:
    t = pool.team_count
    head = (f"{POOL_MAGIC} t={t} w={pool.w} seed={pool.master_seed} "
            f"digest={pool.pteam_digest or '-'}\n").encode("ascii")
    body = (np.asarray(pool.outcomes) + 1).astype("<u2").tobytes()
    Path(path).write_bytes(head + body)


def read_pool(path) -> OutcomePool:
    raw = Path(path).read_bytes()
    nl = raw.index(b"\n")
    fields = raw[:nl].decode("ascii").split()
    if not fields or fields[0] != POOL_MAGIC:
        raise StructuralError(f"{path} is not a pool file")
    kv = dict(f.split("=", 1) for f in fields[1:])
    t, w = int(kv["t"]), int(kv["w"])
    O = np.frombuffer(raw[nl + 1:], dtype="<u2").astype(np.int64) - 1
    if O.size != w * (t - 1):
        raise StructuralError(f"pool file holds {O.size} picks, header promises {w * (t - 1)}")
    O = O.reshape(w, t - 1)
    O.flags.writeable = False
    digest = "" if kv.get("digest") == "-" else kv.get("digest", "")
    return OutcomePool(int(kv["seed"]), O, t, digest)
