"""Mixed-integer models in CPLEX LP text format, and a checker for solutions.

Variable naming (teams, rounds, games, outcomes and entries are 1-based):

``x_t_r_e``  team ``t`` picked in round ``r`` by entry ``e``
``s_w_e``    score of entry ``e`` on outcome ``w``
``smax_w``   best score on outcome ``w``
``z_w_e``    entry ``e`` is the best-scoring entry on outcome ``w``

The ``s * z`` products of the big-M constraints are written in the equivalent
linear form ``smax_w - s_w_e + M z_w_e <= M`` (and, for the greedy model,
``smax_w + (s_bar_w - M) z_w_1 <= s_bar_w``), with ``M = r * 2**(r-1)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import StructuralError
from ..probability import propagate
from ..simulation import pool_outcomes
from ..tournament import Tournament, check_entries, score_matrix
from .config import DiversificationConfig
from .sip import champion_caps

FORMS = ("IP", "SAA", "SIP", "GSAA")
TOL = 1e-6


@dataclass
class LpModel:
    objective: dict[str, float] = field(default_factory=dict)
    constraints: list[tuple[str, dict[str, float], str, float]] = field(default_factory=list)
    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)
    binaries: list[str] = field(default_factory=list)
    comment: str = ""

    def add(self, name, coeffs, sense, rhs):
        self.constraints.append((name, dict(coeffs), sense, float(rhs)))

    def family(self, prefix: str) -> list:
        return [c for c in self.constraints if c[0].split("_")[0] == prefix]

    def variables(self) -> set[str]:
        names = set(self.objective) | set(self.bounds) | set(self.binaries)
        for _, coeffs, _, _ in self.constraints:
            names.update(coeffs)
        return names


def xname(t: int, r: int, e: int) -> str:
    return f"x_{t + 1}_{r}_{e + 1}"


def big_m(T: Tournament) -> int:
    R = T.round_count
    return R * 2 ** (R - 1)


def _bracket_constraints(T: Tournament, m: LpModel, e: int, tag: str) -> None:
    for k in range(e):
        for g in range(T.game_count):
            r = int(T.game_round[g])
            m.add(f"{tag}.1_g{g + 1}_e{k + 1}", {xname(t, r, k): 1 for t in T.teams(g)}, "=", 1)
        for t in range(T.team_count):
            for r in range(2, T.round_count + 1):
                m.add(f"{tag}.2_t{t + 1}_r{r}_e{k + 1}",
                      {xname(t, r, k): 1, xname(t, r - 1, k): -1}, "<=", 0)
        m.binaries.extend(xname(t, r, k) for t in range(T.team_count)
                          for r in range(1, T.round_count + 1))


def _score_rows(T: Tournament, m: LpModel, O: np.ndarray, e: int, tag: str) -> None:
    for w in range(O.shape[0]):
        for k in range(e):
            coeffs = {f"s_{w + 1}_{k + 1}": 1.0}
            for g in range(T.game_count):
                r = int(T.game_round[g])
                name = xname(int(O[w, g]), r, k)
                coeffs[name] = coeffs.get(name, 0.0) - float(T.weights[g])
            m.add(f"{tag}.3_w{w + 1}_e{k + 1}", coeffs, "=", 0)
            m.bounds[f"s_{w + 1}_{k + 1}"] = (0.0, float(T.max_score))
        m.bounds[f"smax_{w + 1}"] = (0.0, float(T.max_score))


def build_model(T: Tournament, form: str, *, P=None, pool=None, e: int = 1, sbar=None,
                previous=None, config: DiversificationConfig | None = None,
                total_entries: int | None = None) -> LpModel:
    """Assemble one of the IP, SAA, SIP or GSAA models."""
    form = form.upper()
    if form not in FORMS:
        raise StructuralError(f"unsupported form {form!r}; choose from {', '.join(FORMS)}")
    m = LpModel(comment=f"{form} model, t={T.team_count}")
    M = big_m(T)
    if form in ("IP", "SIP"):
        if P is None:
            raise StructuralError(f"{form} needs a team win matrix")
        pgame, pround = propagate(T, P)
        _bracket_constraints(T, m, 1, form)
        for g in range(T.game_count):
            r = int(T.game_round[g])
            for t in T.teams(g):
                p = pround[t, r - 1] if form == "IP" else pgame[t, g]
                if p:
                    m.objective[xname(t, r, 0)] = float(T.weights[g] * p)
        if form == "SIP":
            _diversification(T, m, pround, previous, config, total_entries)
        return m
    if pool is None:
        raise StructuralError(f"{form} needs an outcome pool")
    O = pool_outcomes(T, pool)
    wn = O.shape[0]
    if form == "SAA":
        _bracket_constraints(T, m, e, "SAA")
        _score_rows(T, m, O, e, "SAA")
        for w in range(wn):
            m.add(f"SAA.4_w{w + 1}", {f"z_{w + 1}_{k + 1}": 1 for k in range(e)}, "=", 1)
            for k in range(e):
                m.add(f"SAA.5_w{w + 1}_e{k + 1}",
                      {f"smax_{w + 1}": 1, f"s_{w + 1}_{k + 1}": -1, f"z_{w + 1}_{k + 1}": M},
                      "<=", M)
            m.binaries.extend(f"z_{w + 1}_{k + 1}" for k in range(e))
    else:
        sbar = np.zeros(wn) if sbar is None else np.asarray(sbar, dtype=float)
        if sbar.shape != (wn,):
            raise StructuralError(f"s_bar must have {wn} values")
        _bracket_constraints(T, m, 1, "GSAA")
        _score_rows(T, m, O, 1, "GSAA")
        for w in range(wn):
            m.add(f"GSAA.4_w{w + 1}",
                  {f"smax_{w + 1}": 1, f"s_{w + 1}_1": -1, f"z_{w + 1}_1": M}, "<=", M)
            m.add(f"GSAA.5_w{w + 1}",
                  {f"smax_{w + 1}": 1, f"z_{w + 1}_1": float(sbar[w]) - M}, "<=", float(sbar[w]))
            m.binaries.append(f"z_{w + 1}_1")
    m.objective = {f"smax_{w + 1}": 1.0 / wn for w in range(wn)}
    return m


def _diversification(T, m, pround, previous, config, total_entries):
    if previous is None or config is None:
        return
    X = check_entries(T, previous)
    e = total_entries or X.shape[0] + 1
    R = T.round_count
    if config.enable_champion:
        caps = champion_caps(T, pround, e)
        for r in (R - 1, R):
            games = list(T.games_in_round(r))
            counts = np.bincount(X[:, games].ravel(), minlength=T.team_count)
            for t in range(T.team_count):
                m.add(f"SIP.champion_t{t + 1}_r{r}", {xname(t, r, 0): 1},
                      "<=", int(caps[t, r - 1] - counts[t]))
    if config.enable_finalist:
        a, b = T.children[T.final]
        for j, row in enumerate(X):
            m.add(f"SIP.finalist_j{j + 1}",
                  {xname(int(row[a]), R - 1, 0): 1, xname(int(row[b]), R - 1, 0): 1}, "<=", 1)
    for j, row in enumerate(X):
        if config.global_sigma is not None:
            coeffs = {xname(int(row[g]), int(T.game_round[g]), 0): 1
                      for g in range(T.game_count)}
            m.add(f"SIP.global_j{j + 1}", coeffs, "<=", config.global_sigma)
        for r, s in sorted(config.round_sigmas.items()):
            coeffs = {xname(int(row[g]), r, 0): 1 for g in T.games_in_round(r)}
            m.add(f"SIP.round_j{j + 1}_r{r}", coeffs, "<=", s)


def _terms(coeffs: dict[str, float]) -> str:
    parts = []
    for i, (name, c) in enumerate(coeffs.items()):
        sign = "-" if c < 0 else "+"
        mag = f"{abs(c):.17g}"
        body = name if mag == "1" else f"{mag} {name}"
        parts.append(f"{'- ' if sign == '-' else ''}{body}" if i == 0 else f"{sign} {body}")
    return " ".join(parts) if parts else "0 x_dummy"


def dumps(m: LpModel) -> str:
    lines = [f"\\ {m.comment}", "Maximize", f" obj: {_terms(m.objective)}", "Subject To"]
    for name, coeffs, sense, rhs in m.constraints:
        lines.append(f" {name}: {_terms(coeffs)} {sense} {rhs:.17g}")
    if m.bounds:
        lines.append("Bounds")
        lines.extend(f" {lo:.17g} <= {v} <= {hi:.17g}" for v, (lo, hi) in m.bounds.items())
    if m.binaries:
        lines.append("Binaries")
        lines.extend(f" {v}" for v in m.binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"


def saa_export(T: Tournament, form: str, path, **kw) -> LpModel:
    """Build the model (see ``build_model``) and write it to ``path``."""
    m = build_model(T, form, **kw)
    Path(path).write_text(dumps(m))
    return m


def _parse_expr(text: str) -> dict[str, float]:
    coeffs: dict[str, float] = {}
    sign, num = 1.0, None
    for tok in text.split():
        if tok in ("+", "-"):
            sign = -1.0 if tok == "-" else 1.0
        elif re.fullmatch(r"[+-]?[0-9.]+(?:[eE][+-]?\d+)?", tok):
            num = float(tok)
        else:
            if tok[0] in "+-":
                sign, tok = (-1.0 if tok[0] == "-" else 1.0), tok[1:]
            coeffs[tok] = coeffs.get(tok, 0.0) + sign * (1.0 if num is None else num)
            sign, num = 1.0, None
    return coeffs


def loads(text: str) -> LpModel:
    """Parse the LP subset written by ``dumps``."""
    m = LpModel()
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            m.comment = line[1:].strip()
            continue
        low = line.lower()
        if low in ("maximize", "subject to", "bounds", "binaries", "end"):
            section = low
            continue
        if section == "maximize":
            m.objective = _parse_expr(line.split(":", 1)[1])
        elif section == "subject to":
            name, body = line.split(":", 1)
            mt = re.match(r"(.*?)(<=|>=|=)\s*(\S+)$", body.strip())
            if not mt:
                raise StructuralError(f"cannot parse constraint line: {line}")
            m.add(name.strip(), _parse_expr(mt.group(1)), mt.group(2), float(mt.group(3)))
        elif section == "bounds":
            lo, v, hi = [p.strip() for p in line.split("<=")]
            m.bounds[v] = (float(lo), float(hi))
        elif section == "binaries":
            m.binaries.extend(line.split())
    return m


@dataclass
class CheckReport:
    feasible: bool
    objective: float
    violations: list[str]


def check_solution(m: LpModel, values: dict[str, float], tol: float = TOL) -> CheckReport:
    """Verify every constraint, bound and integrality condition; recompute the objective."""
    val = lambda v: float(values.get(v, 0.0))  # noqa: E731
    bad = [f"unknown variable {v}" for v in values if v not in m.variables()]
    for name, coeffs, sense, rhs in m.constraints:
        lhs = sum(c * val(v) for v, c in coeffs.items())
        ok = {"<=": lhs <= rhs + tol, ">=": lhs >= rhs - tol, "=": abs(lhs - rhs) <= tol}[sense]
        if not ok:
            bad.append(f"{name}: {lhs:.9g} {sense} {rhs:.9g} violated")
    for v, (lo, hi) in m.bounds.items():
        if not lo - tol <= val(v) <= hi + tol:
            bad.append(f"bound on {v}: {val(v):.9g} outside [{lo:.9g}, {hi:.9g}]")
    for v in m.binaries:
        if min(abs(val(v)), abs(val(v) - 1)) > tol:
            bad.append(f"{v} = {val(v):.9g} is not binary")
    obj = sum(c * val(v) for v, c in m.objective.items())
    return CheckReport(not bad, obj, bad)


def read_solution(path) -> dict[str, float]:
    """``name value`` per line; blank lines and ``#`` comments ignored."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            name, value = line.split()
            out[name] = float(value)
    return out


def write_solution(path, values: dict[str, float]) -> None:
    Path(path).write_text("".join(f"{k} {v:.17g}\n" for k, v in values.items()))


def solution_from_entries(T: Tournament, form: str, entries, *, pool=None,
                          sbar=None) -> dict[str, float]:
    """Variable values that encode ``entries`` in the given model form."""
    form = form.upper()
    E = check_entries(T, entries)
    vals: dict[str, float] = {}
    for k, row in enumerate(E):
        for g in range(T.game_count):
            vals[xname(int(row[g]), int(T.game_round[g]), k)] = 1.0
    if form in ("IP", "SIP"):
        return vals
    O = pool_outcomes(T, pool)
    S = score_matrix(T, E, O).astype(float)  # (e, w)
    if form == "GSAA":
        sb = np.zeros(O.shape[0]) if sbar is None else np.asarray(sbar, dtype=float)
        for w in range(O.shape[0]):
            vals[f"s_{w + 1}_1"] = S[0, w]
            vals[f"smax_{w + 1}"] = max(S[0, w], sb[w])
            vals[f"z_{w + 1}_1"] = float(S[0, w] >= sb[w])
        return vals
    best = S.argmax(axis=0)
    for w in range(O.shape[0]):
        vals[f"smax_{w + 1}"] = S[best[w], w]
        for k in range(E.shape[0]):
            vals[f"s_{w + 1}_{k + 1}"] = S[k, w]
            vals[f"z_{w + 1}_{k + 1}"] = float(k == best[w])
    return vals
