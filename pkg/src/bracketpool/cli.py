"""Command-line interface: ``bracketpool <subcommand> ...``.

Exit codes: 0 success, 2 invalid input, 3 refused by a size or budget guard,
64 usage error (unknown flag, missing argument).  Every output file gets a
``<file>.manifest.json`` next to it recording the arguments, seed, input
digests and version.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
import warnings
from importlib import metadata
from pathlib import Path

import numpy as np

from . import bounds, exact, formats
from .errors import BracketPoolError, GuardRefusal
from .optimize import lpformat
from .optimize.config import load_settings
from .optimize.gsaa import gsaa_generate
from .optimize.prop import prop_generate, prop_plus_generate
from .optimize.sip import sip_generate
from .optimize.single import best_single_entry
from .pooleval import TIE_POLICIES, expected_payoff, field_ems, victory_probability
from .probability import ELO_SCALE, propagate, pteam_from_ratings, uniform_pteam
from .simulation import DEFAULT_W_EVALUATE, derive_seed, max_scores, mc_ems, sample_pool
from .tournament import build_tournament, fill_greedy

EXIT_INVALID = 2
EXIT_REFUSED = 3
EXIT_USAGE = 64

log = logging.getLogger("bracketpool")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _digest_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


class Run:
    """Collects inputs and outputs of one invocation for its manifests."""

    def __init__(self, args, argv):
        self.args, self.argv = args, list(argv)
        self.inputs: dict[str, str] = {}
        self.outputs: list[Path] = []
        self.start = time.perf_counter()

    def read(self, path):
        self.inputs[str(path)] = _digest_file(path)
        return path

    def wrote(self, path):
        self.outputs.append(Path(path))

    def finish(self):
        manifest = {
            "subcommand": self.args.command,
            "argv": self.argv,
            "master_seed": self.args.seed,
            "inputs": self.inputs,
            "version": _version(),
            "wall_clock_seconds": round(time.perf_counter() - self.start, 6),
        }
        for out in self.outputs:
            manifest["output_digest"] = _digest_file(out)
            out.with_name(out.name + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _table(rows, header, fmt: str) -> str:
    cells = [[f"{v:.6f}" if isinstance(v, float) else str(v) for v in r] for r in rows]
    if fmt == "csv":
        return "\n".join(",".join(r) for r in [header] + cells)
    widths = [max(len(str(h)), *(len(r[i]) for r in cells)) if cells else len(h)
              for i, h in enumerate(header)]
    line = lambda r: "  ".join(str(c).rjust(w) for c, w in zip(r, widths))  # noqa: E731
    return "\n".join([line(header)] + [line(r) for r in cells])


def _load_pteam(run: Run, args):
    if getattr(args, "pteam", None):
        return formats.read_pteam(run.read(args.pteam))
    if getattr(args, "ratings", None):
        ratings = formats.read_ratings(run.read(args.ratings))
        return pteam_from_ratings(ratings, scale=args.scale, team_count=len(ratings))
    raise UsageError("one of --pteam or --ratings is required")


def _pool(run: Run, args, T, P):
    if getattr(args, "pool", None):
        pool = formats.read_pool(run.read(args.pool))
        if pool.team_count != T.team_count:
            raise UsageError(f"pool is for {pool.team_count} teams, inputs have {T.team_count}")
        return pool
    if P is None:
        raise UsageError("a pool (--pool) or a win matrix to simulate one from is required")
    return sample_pool(T, P, args.w, args.seed, threads=args.threads)


def cmd_propagate(run, args):
    P = _load_pteam(run, args)
    T = build_tournament(P.shape[0])
    pgame, pround = propagate(T, P)
    if args.out_game:
        formats.write_team_table(args.out_game, pgame, "g")
        run.wrote(args.out_game)
    if args.out_round:
        formats.write_team_table(args.out_round, pround, "r")
        run.wrote(args.out_round)
    rows = [[t + 1] + [float(x) for x in pround[t]] for t in range(T.team_count)]
    print(_table(rows, ["team"] + [f"r{r}" for r in range(1, T.round_count + 1)], args.format))


def cmd_simulate(run, args):
    P = _load_pteam(run, args)
    T = build_tournament(P.shape[0])
    pool = sample_pool(T, P, args.w, args.seed, threads=args.threads)
    formats.write_pool(args.out, pool)
    run.wrote(args.out)
    print(_table([[T.team_count, pool.w, pool.master_seed, pool.pteam_digest]],
                 ["t", "w", "seed", "pteam_digest"], args.format))


def cmd_ems(run, args):
    T, E = formats.read_entries(run.read(args.entries))
    P = _load_pteam(run, args) if (args.pteam or args.ratings) else None
    if P is not None and P.shape[0] != T.team_count:
        raise UsageError(f"win matrix has {P.shape[0]} teams, entries are for {T.team_count}")
    if args.mode in ("exact", "brute") and P is None:
        raise UsageError(f"--{args.mode} needs --pteam or --ratings")
    if args.mode == "exact":
        rows = [["dp", E.shape[0], exact.dp_ems(T, P, E)]]
        header = ["method", "entries", "ems"]
    elif args.mode == "brute":
        rows = [["brute", E.shape[0], exact.brute_force_ems(T, P, E)]]
        header = ["method", "entries", "ems"]
    else:
        est = mc_ems(T, E, _pool(run, args, T, P), threads=args.threads)
        rows = [["mc", E.shape[0], est.w, est.mean, est.sample_sd, est.ci95_halfwidth]]
        header = ["method", "entries", "w", "ems", "sd", "ci95"]
    print(_table(rows, header, args.format))


def cmd_optimize(run, args):
    settings = load_settings(run.read(args.config) if args.config else None)
    P = _load_pteam(run, args)
    T = build_tournament(P.shape[0])
    budget = settings.solve_budget(master_seed=args.seed, sample_count=args.samples,
                                   time_limit_seconds=args.time_limit, restarts=args.restarts,
                                   max_sweeps=args.max_sweeps)
    m = args.method
    if m == "saa-export":
        if not args.lp_out:
            raise UsageError("saa-export needs --lp-out")
        kw = {}
        if args.form in ("SAA", "GSAA"):
            kw["pool"] = sample_pool(T, P, budget.sample_count, derive_seed(args.seed, 0, 0),
                                     threads=args.threads)
        if args.form in ("IP", "SIP"):
            kw["P"] = P
        if args.form == "SIP" and args.previous:
            kw["previous"] = formats.read_entries(run.read(args.previous))[1]
            kw["config"] = settings.sip_config_for(args.e).fitted(T)
            kw["total_entries"] = args.e
        if args.form == "GSAA" and args.previous:
            prev = formats.read_entries(run.read(args.previous))[1]
            kw["sbar"] = max_scores(T, prev, kw["pool"]).astype(float)
        if args.form == "SAA":
            kw["e"] = args.e
        model = lpformat.saa_export(T, args.form, args.lp_out, **kw)
        run.wrote(args.lp_out)
        print(_table([[args.form, len(model.variables()), len(model.constraints)]],
                     ["form", "variables", "constraints"], args.format))
        return
    _, pround = propagate(T, P)
    if m == "single":
        E = best_single_entry(T, P)[0][None, :]
    elif m == "prop":
        E = prop_generate(T, pround, args.e)
    elif m == "prop+":
        E = prop_plus_generate(T, pround, args.e, settings=settings)
    elif m == "gsaa":
        E = gsaa_generate(T, P, args.e, budget, threads=args.threads, settings=settings)
    else:
        E = sip_generate(T, P, args.e, budget=budget, settings=settings)
    if args.entries_out:
        formats.write_entries(args.entries_out, T, E)
        run.wrote(args.entries_out)
    else:
        sys.stdout.write(formats.format_entries(T, E))
    pgame, _ = propagate(T, P)
    rows = [[k + 1, exact.expected_single_score(T, pgame, row), int(row[T.final]) + 1]
            for k, row in enumerate(E)]
    print(_table(rows, ["entry", "expected_score", "champion"], args.format),
          file=sys.stderr if not args.entries_out else sys.stdout)


def cmd_bounds(run, args):
    pround = None
    if args.pteam or args.ratings:
        P = _load_pteam(run, args)
        T = build_tournament(P.shape[0])
        pround = propagate(T, P)[1]
    elif args.teams:
        T = build_tournament(args.teams)
    else:
        raise UsageError("bounds needs --teams, --pteam or --ratings")
    c = args.construction
    if c == "pair":
        if args.base:
            base = formats.read_entries(run.read(args.base))[1][0]
        else:
            strength = pround if pround is not None else np.zeros((T.team_count, T.round_count))
            base = fill_greedy(T, [-1] * T.game_count, strength)
        E, promise = bounds.complementary_pair(T, base, pround), T.team_count // 4
    elif c.startswith("cover:"):
        r = int(c.split(":", 1)[1])
        E, promise = bounds.round_cover(T, r, pround), 2**r - 1
    elif c == "example16":
        E, promise = bounds.example16_cover(T, pround), T.team_count // 4 + 2
    else:
        raise UsageError(f"unknown construction {c!r}")
    formats.write_entries(args.out, T, E)
    run.wrote(args.out)
    if T.team_count <= 16:
        worst, how = bounds.min_guaranteed_score(T, E), "exhaustive"
    else:
        if pround is None:
            P = uniform_pteam(T.team_count)
        pool = sample_pool(T, P, args.w, args.seed, threads=args.threads)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", bounds.NonExhaustiveWarning)
            worst, how = bounds.min_guaranteed_score(T, E, pool), f"sampled w={args.w}"
    print(_table([[c, E.shape[0], promise, worst, how]],
                 ["construction", "entries", "guarantee", "worst_score", "check"], args.format))


def cmd_pool_eval(run, args):
    T, field = formats.read_field(run.read(args.field))
    P = None
    if args.pteam or args.ratings:
        P = _load_pteam(run, args)
    pool = _pool(run, args, T, P)
    ems = field_ems(T, field, pool, threads=args.threads)
    vic = victory_probability(T, field, pool, threads=args.threads)
    pay = None
    if args.payoffs:
        pay = expected_payoff(T, field, pool, formats.read_payoffs(run.read(args.payoffs)),
                              args.tie)
    header = ["participant", "entries", "ems", "ci95", "victory"] + (["payoff"] if pay else [])
    rows = []
    for p in field.ids:
        row = [p, field.participants[p].shape[0], ems[p].mean, ems[p].ci95_halfwidth, vic[p]]
        rows.append(row + ([pay[p]] if pay else []))
    print(_table(rows, header, args.format))


def cmd_lp_check(run, args):
    model = lpformat.loads(Path(run.read(args.lp)).read_text())
    rep = lpformat.check_solution(model, lpformat.read_solution(run.read(args.solution)))
    print(_table([["feasible" if rep.feasible else "infeasible", rep.objective,
                   len(rep.violations)]], ["status", "objective", "violations"], args.format))
    for v in rep.violations[:20]:
        print(v, file=sys.stderr)
    return 0 if rep.feasible else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("table", "csv"), default="table")
    common.add_argument("-v", "--verbose", action="store_true")

    def matrix(p):
        p.add_argument("--pteam", help="team-by-team win matrix CSV")
        p.add_argument("--ratings", help="team_id,rating CSV (Elo-style win matrix)")
        p.add_argument("--scale", type=float, default=ELO_SCALE)

    parser = _Parser(prog="bracketpool", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("propagate", parents=[common], help="game and round win tables")
    matrix(p)
    p.add_argument("--out-game")
    p.add_argument("--out-round")

    p = sub.add_parser("simulate", parents=[common], help="simulate an outcome pool")
    matrix(p)
    p.add_argument("-w", type=int, default=DEFAULT_W_EVALUATE)
    p.add_argument("--out", required=True)

    p = sub.add_parser("ems", parents=[common], help="expected maximum score of an entry set")
    mode = p.add_mutually_exclusive_group(required=True)
    for name in ("exact", "brute", "mc"):
        mode.add_argument(f"--{name}", dest="mode", action="store_const", const=name)
    p.add_argument("--entries", required=True)
    matrix(p)
    p.add_argument("--pool")
    p.add_argument("-w", type=int, default=DEFAULT_W_EVALUATE)

    p = sub.add_parser("optimize", parents=[common], help="generate entries")
    p.add_argument("--method", required=True,
                   choices=("single", "prop", "prop+", "gsaa", "sip", "saa-export"))
    p.add_argument("-e", type=int, default=1, help="number of entries")
    matrix(p)
    p.add_argument("--config", help="settings file (default: $BRACKETPOOL_CONFIG)")
    p.add_argument("--entries-out")
    p.add_argument("--samples", type=int, help="outcomes per subproblem")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-sweeps", type=int)
    p.add_argument("--form", choices=lpformat.FORMS, default="SAA")
    p.add_argument("--previous", help="entries chosen so far (SIP / GSAA export)")
    p.add_argument("--lp-out")

    p = sub.add_parser("bounds", parents=[common], help="worst-case guarantee constructions")
    p.add_argument("--construction", required=True, help="pair | cover:<r> | example16")
    p.add_argument("--teams", type=int)
    matrix(p)
    p.add_argument("--base", help="base bracket for the pair construction")
    p.add_argument("--out", required=True)
    p.add_argument("-w", type=int, default=DEFAULT_W_EVALUATE)

    p = sub.add_parser("pool-eval", parents=[common], help="evaluate a field of participants")
    p.add_argument("--field", required=True)
    p.add_argument("--pool")
    matrix(p)
    p.add_argument("-w", type=int, default=DEFAULT_W_EVALUATE)
    p.add_argument("--payoffs")
    p.add_argument("--tie", choices=TIE_POLICIES, default="share")

    p = sub.add_parser("lp-check", parents=[common], help="verify a solution of an LP file")
    p.add_argument("--lp", required=True)
    p.add_argument("--solution", required=True)
    return parser


COMMANDS = {
    "propagate": cmd_propagate, "simulate": cmd_simulate, "ems": cmd_ems,
    "optimize": cmd_optimize, "bounds": cmd_bounds, "pool-eval": cmd_pool_eval,
    "lp-check": cmd_lp_check,
}


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    r = Run(args, argv)
    try:
        code = COMMANDS[args.command](r, args) or 0
    except UsageError as exc:
        print(f"bracketpool {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GuardRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (BracketPoolError, ValueError, OSError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    r.finish()
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
