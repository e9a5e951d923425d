"""Optimizer settings: diversification families, PROP+ thresholds, solve budgets.

Settings live in INI-style ``key = value`` files.  The shipped
``data/defaults.cfg`` holds the tuned values; a user file given on the command
line (or through ``BRACKETPOOL_CONFIG``) overrides individual keys.
"""

from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import StructuralError
from ..tournament import Tournament

CONFIG_ENV = "BRACKETPOOL_CONFIG"


@dataclass(frozen=True)
class DiversificationConfig:
    enable_champion: bool = False
    enable_finalist: bool = False
    global_sigma: int | None = None
    round_sigmas: dict[int, int] = field(default_factory=dict)

    def validate(self, T: Tournament) -> None:
        if self.global_sigma is not None and self.round_sigmas:
            raise StructuralError("global and round overlap caps cannot be combined")
        if self.global_sigma is not None and not 0 <= self.global_sigma <= T.game_count:
            raise StructuralError(f"global sigma must lie in [0, {T.game_count}]")
        for r, s in self.round_sigmas.items():
            if not 1 <= r <= min(4, T.round_count):
                raise StructuralError(f"round caps apply to rounds 1..4 of the tournament, got {r}")
            if not 0 <= s <= len(T.games_in_round(r)):
                raise StructuralError(
                    f"sigma_{r} = {s} exceeds the {len(T.games_in_round(r))} games of round {r}")

    @property
    def empty(self) -> bool:
        return not (self.enable_champion or self.enable_finalist
                    or self.global_sigma is not None or self.round_sigmas)

    def fitted(self, T: Tournament) -> "DiversificationConfig":
        """Copy with caps clipped to what ``T`` has (rounds beyond the tournament dropped)."""
        rs = {r: min(s, len(T.games_in_round(r)))
              for r, s in self.round_sigmas.items() if r <= T.round_count}
        gs = None if self.global_sigma is None else min(self.global_sigma, T.game_count)
        return DiversificationConfig(self.enable_champion, self.enable_finalist, gs, rs)


@dataclass(frozen=True)
class SolveBudget:
    time_limit_seconds: float = 500.0
    sample_count: int = 250
    restarts: int = 4
    master_seed: int = 0
    max_sweeps: int = 200
    exact: bool | None = None  # None: enumerate when the tournament is small enough

    def __post_init__(self):
        if self.time_limit_seconds <= 0 or self.sample_count < 1 or self.restarts < 0 \
                or self.max_sweeps < 1:
            raise StructuralError(f"invalid solve budget {self}")


@dataclass
class Settings:
    """Everything read from a config file.  Threshold strings are kept verbatim."""

    prop_plus: dict[int, tuple[str, ...]]
    sip: list[tuple[int, int | None, DiversificationConfig]]
    budget: dict[str, str]
    parser: configparser.ConfigParser

    def thresholds_for(self, e: int) -> tuple[float, ...]:
        """PROP+ thresholds of the listed entry count nearest ``e`` (ties: smaller)."""
        key = min(self.prop_plus, key=lambda k: (abs(k - e), k))
        return tuple(float(v) for v in self.prop_plus[key])

    def sip_config_for(self, e: int) -> DiversificationConfig:
        if e <= 1:
            return DiversificationConfig()
        for lo, hi, cfg in self.sip:
            if lo <= e and (hi is None or e <= hi):
                return cfg
        return DiversificationConfig()

    def solve_budget(self, **overrides) -> SolveBudget:
        b = self.budget
        kw = dict(time_limit_seconds=float(b.get("time_limit_seconds", 500)),
                  sample_count=int(b.get("sample_count", 250)),
                  restarts=int(b.get("restarts", 4)),
                  master_seed=int(b.get("master_seed", 0)),
                  max_sweeps=int(b.get("max_sweeps", 200)))
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return SolveBudget(**kw)

    def dumps(self) -> str:
        buf = io.StringIO()
        self.parser.write(buf)
        return buf.getvalue()


def _split(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def _parse(parser: configparser.ConfigParser) -> Settings:
    prop = {}
    if parser.has_section("prop_plus"):
        for k, v in parser.items("prop_plus"):
            vals = _split(v)
            if any(not 0.0 <= float(x) < 1.0 for x in vals):
                raise StructuralError(f"prop_plus thresholds must lie in [0, 1): {k} = {v}")
            prop[int(k)] = vals
    sip = []
    for sec in parser.sections():
        if not sec.startswith("sip:"):
            continue
        lo, _, hi = sec[4:].partition("-")
        s = parser[sec]
        rs = s.get("round_sigmas")
        cfg = DiversificationConfig(
            enable_champion=s.getboolean("champion", False),
            enable_finalist=s.getboolean("finalist", False),
            global_sigma=int(s["global_sigma"]) if "global_sigma" in s else None,
            round_sigmas={i + 1: int(x) for i, x in enumerate(_split(rs))} if rs else {},
        )
        sip.append((int(lo), int(hi) if hi else None, cfg))
    sip.sort(key=lambda item: item[0])
    budget = dict(parser.items("budget")) if parser.has_section("budget") else {}
    return Settings(prop, sip, budget, parser)


def default_config_text() -> str:
    return resources.files("bracketpool").joinpath("data/defaults.cfg").read_text()


def load_settings(path: str | os.PathLike | None = None, use_env: bool = True) -> Settings:
    """Shipped defaults, overlaid with ``path`` (or ``$BRACKETPOOL_CONFIG``)."""
    parser = configparser.ConfigParser()
    parser.read_string(default_config_text())
    if path is None and use_env:
        path = os.environ.get(CONFIG_ENV) or None
    if path is not None:
        user = configparser.ConfigParser()
        user.read_string(Path(path).read_text())
        for sec in user.sections():
            if not parser.has_section(sec):
                parser.add_section(sec)
            for k, v in user.items(sec):
                parser.set(sec, k, v)
    return _parse(parser)


def loads_settings(text: str) -> Settings:
    parser = configparser.ConfigParser()
    parser.read_string(text)
    return _parse(parser)
