"""Command-line front end.

Every output starts with a metadata line (``#`` comment in CSV and text,
``<desc>`` element in SVG) naming the version, seed, generator and command. Option values
come from flags, then a ``--config`` JSON file, then built-in defaults; the
default seed is read from ``TVCOUPLE_SEED`` when set.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .bounds import emit_bounds_curve, kn_points, lb_kn_condition, step_grid
from .combinatorics import (
    affine_mod_assignment,
    check_combi_identity,
    count_disagreements,
    distance_profile_probs,
    distant_bound_threshold,
    exhaustive_min_distant,
    exhaustive_min_total,
    falling5,
    greedy_assignment,
    local_search_min_distant,
    min_triple_assignment,
    pair_totals,
    q_count,
    q_search,
    total_disagreement_lower,
)
from .couplings import KINDS, sample_indices
from .dist import Family, tv_distance
from .errors import DomainError, TvCoupleError
from .exact import agreement, big_f, tuple_agreement
from .lp import min_sum_disagreement, minimax_disagreement, optimal_pair_coupling
from .mc import event_label, mc_estimate
from .randomness import GENERATOR, parse_seed
from .render import render_simplex

SEED_ENV = "TVCOUPLE_SEED"

DEFAULTS = {
    "sample": {"coupling": "ii", "n": 1, "start": 0},
    "exact": {"coupling": "ii", "tuples": None},
    "mc": {"coupling": "ii", "n": 100_000, "start": 0, "tuples": None},
    "bounds": {"grid_step": 0.01, "kn_points": None},
    "assignments": {"restarts": 100, "iters": 10_000, "start": "random", "witness": None},
    "oracle": {"joint": False},
    "render": {"coupling": "ii", "resolution": 60, "clocks": None},
}


def fmt(x) -> str:
    """17 significant digits: round-trips every double."""
    return "%.17g" % x


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# --- output -------------------------------------------------------------------

class Output:
    """Collects lines and writes them to ``--out`` or stdout."""

    def __init__(self, args, header: str):
        self.path = args.out
        self.buf = io.StringIO()
        self.header = header

    def csv(self, rows, comment: bool = True):
        if comment:
            self.buf.write(f"# {self.header}\n")
        w = csv.writer(self.buf, lineterminator="\n")
        for row in rows:
            w.writerow(row)

    def text(self, s: str):
        self.buf.write(s)

    def close(self):
        data = self.buf.getvalue()
        if self.path:
            Path(self.path).write_text(data)
        else:
            sys.stdout.write(data)


def _header(args, argv: Sequence[str]) -> str:
    seed = getattr(args, "seed", None)
    return f"tvcouple {__version__} seed={seed if seed is not None else '-'} generator={GENERATOR} command={' '.join(argv)}"


# --- commands -------------------------------------------------------------------

def _family(args) -> Family:
    if not args.family:
        raise DomainError("--family is required")
    return Family.load(args.family)


def cmd_sample(args, out: Output):
    fam = _family(args)
    if args.n < 1:
        raise DomainError("--n must be positive")
    idx = sample_indices(fam, args.coupling, args.n, args.seed, args.start)
    U = fam.universe
    rows = [["replicate", *fam.names]]
    for r, row in enumerate(idx):
        rows.append([args.start + r, *(U[i] for i in row)])
    out.csv(rows)


def _tuples(fam: Family, k: int | None):
    if k is None:
        return None
    if not 2 <= k <= len(fam):
        raise DomainError(f"--tuples must lie in [2, {len(fam)}]")
    return list(itertools.combinations(fam.names, k))


def cmd_exact(args, out: Output):
    fam = _family(args)
    tuples = _tuples(fam, args.tuples)
    if tuples is None:
        rows = [["", *fam.names]]
        for a in fam.names:
            row = [a]
            for b in fam.names:
                row.append(fmt(0.0 if a == b else agreement(fam[a], fam[b], args.coupling).disagreement))
            rows.append(row)
    else:
        rows = [["tuple", "disagreement"]]
        for t in tuples:
            rows.append([event_label(t), fmt(1.0 - tuple_agreement([fam[n] for n in t], args.coupling))])
    out.csv(rows)


def cmd_mc(args, out: Output):
    fam = _family(args)
    events = _tuples(fam, args.tuples) or list(itertools.combinations(fam.names, 2))
    if args.event:
        events = [tuple(e.split(",")) for e in args.event]
    ests = mc_estimate(fam, args.coupling, events, args.n, args.seed, args.start)
    rows = [["event", "estimate", "stderr", "n", "seed", "exact", "z"]]
    for e, est in zip(events, ests):
        exact = z = ""
        if args.coupling in ("i", "ii"):
            p = 1.0 - tuple_agreement([fam[n] for n in e], args.coupling)
            sd = math.sqrt(p * (1 - p) / est.n)
            exact = fmt(p)
            z = fmt((est.estimate - p) / sd) if sd > 0 else ("0" if est.estimate == p else "inf")
        rows.append([est.event, fmt(est.estimate), fmt(est.stderr), est.n, est.seed, exact, z])
    out.csv(rows)


def cmd_bounds(args, out: Output):
    grid = step_grid(args.grid_step)
    if args.kn_points is not None:
        # reported on their own: F itself is a lower bound at these k/n
        rows = [["k", "n", "x", "F", "coarse"]]
        for k, n, x in kn_points(args.kn_points, x_min=float(grid[0])):
            rows.append([k, n, fmt(float(x)), fmt(big_f(float(x))), int(lb_kn_condition(k, n).coarse_holds)])
        out.csv(rows)
        return
    curve = emit_bounds_curve(grid)
    out.csv([["x", "F", "lower"], *[[fmt(x), fmt(f), fmt(lo)] for x, f, lo in curve]])


def _profile_rows(z) -> list:
    prof = count_disagreements(z)
    rows = [["quantity", "value"]]
    for m in sorted(prof.counts):
        rows.append([f"D_{m}", prof.counts[m]])
        rows.append([f"pairs_{m}", prof.totals[m]])
    rows.append(["total", prof.total])
    rows.append(["total_lower", total_disagreement_lower(z.n, z.k)])
    if z.k <= z.n:
        th = distant_bound_threshold(z.n, z.k)
        rows.append(["threshold", th])
        rows.append(["distant_bound_holds", int(prof[z.k] >= th)])
    return rows


def _write_witness(args, z):
    if args.witness:
        Path(args.witness).write_text(json.dumps(z.to_json(), indent=1) + "\n")


def cmd_assignments(args, out: Output):
    action, params = args.action, args.params
    if action == "q":
        n = _need(args.n, "--n")
        if "search" in params:
            r = q_search(n, args.seed, args.restarts)
            rows = [["quantity", "value"], ["best", r.best], ["min_assignment", r.min_value],
                    ["pair_total", r.pair_total], ["exhaustive", int(r.exhaustive)],
                    ["reaches_min_plus_4", int(r.reaches_min_plus_4)]]
            if args.witness:
                Path(args.witness).write_text(json.dumps(
                    {",".join(map(str, s)): v for s, v in zip(itertools.combinations(range(1, n + 1), 3), r.witness)}, indent=1) + "\n")
        else:
            rows = [["quantity", "value"], ["Q_min", q_count(min_triple_assignment(n), n)],
                    ["n_5", falling5(n)], ["pair_total", falling5(n) // 4]]
        out.csv(rows)
        return
    n, k = _need(args.n, "--n"), _need(args.k, "--k")
    if action == "greedy":
        z = greedy_assignment(n, k)
        _write_witness(args, z)
        out.csv(_profile_rows(z))
    elif action == "mod":
        if len(params) != 2:
            raise UsageError("assignments mod needs M C (modulus and multiplier)")
        modulus, mult = (int(v) for v in params)
        z = affine_mod_assignment(n, k, mult, modulus)
        _write_witness(args, z)
        out.csv(_profile_rows(z))
    elif action == "search":
        r = local_search_min_distant(n, k, args.seed, args.restarts, args.iters, args.start)
        _write_witness(args, r.witness)
        out.csv([["quantity", "value"], ["best", r.best], ["threshold", r.threshold],
                 ["below_threshold", int(r.below_threshold)], ["restarts", r.restarts]])
    elif action == "exhaustive":
        dk, z = exhaustive_min_distant(n, k)
        tot, _ = exhaustive_min_total(n, k)
        _write_witness(args, z)
        out.csv([["quantity", "value"], ["min_distant", dk], ["min_total", tot],
                 ["total_lower", total_disagreement_lower(n, k)]])
    elif action == "identity":
        chk = check_combi_identity(n, k)
        out.csv([["quantity", "value"], ["lhs", chk.lhs], ["rhs", chk.rhs], ["holds", int(chk.holds)]])
    elif action == "profile":
        totals, c = pair_totals(n, k), distance_profile_probs(n, k)
        out.csv([["m", "pairs", "c_m"], *[[m, totals[m], c[m]] for m in sorted(totals)]])


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def cmd_oracle(args, out: Output):
    fam = _family(args)
    if args.problem == "pair":
        if len(args.members) != 2:
            raise UsageError("oracle pair needs two member names")
        a, b = args.members
        rep = optimal_pair_coupling(fam[a], fam[b])
        names = (a, b)
        extra = [["tv", fmt(tv_distance(fam[a], fam[b]))]]
    else:
        rep = (minimax_disagreement if args.problem == "minimax" else min_sum_disagreement)(fam)
        names, extra = fam.names, []
    out.csv([["quantity", "value"], ["objective", fmt(rep.objective)], ["status", rep.status], *extra])
    if args.joint:
        out.csv([[*names, "weight"], *[[*tup, fmt(w)] for tup, w in rep.joint.rows()]], comment=False)


def cmd_render(args, out: Output):
    clocks = [float(v) for v in args.clocks.split(",")] if args.clocks else None
    r = render_simplex(args.coupling, args.seed, args.resolution, clocks, header=out.header)
    out.text(r.svg)


COMMANDS = {
    "sample": cmd_sample,
    "exact": cmd_exact,
    "mc": cmd_mc,
    "bounds": cmd_bounds,
    "assignments": cmd_assignments,
    "oracle": cmd_oracle,
    "render": cmd_render,
}


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tvcouple", description="Couplings with disagreement at most 2x/(1+x).")
    p.add_argument("--version", action="version", version=f"tvcouple {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--config", help="JSON file of option defaults")
        sp.add_argument("--out", help="output path (default stdout)")
        if seed:
            sp.add_argument("--seed", help="decimal or 0x-hex seed")
        return sp

    sp = common(sub.add_parser("sample", help="coupled draws as CSV"))
    sp.add_argument("--family")
    sp.add_argument("--coupling", choices=KINDS)
    sp.add_argument("--n", type=int)
    sp.add_argument("--start", type=int, help="first replicate number")

    sp = common(sub.add_parser("exact", help="exact disagreement probabilities"), seed=False)
    sp.add_argument("--family")
    sp.add_argument("--coupling", choices=("i", "ii"))
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--pairs", action="store_true", help="pairwise matrix (default)")
    g.add_argument("--tuples", type=int, metavar="K", help="every K-subset of members")

    sp = common(sub.add_parser("mc", help="Monte Carlo disagreement frequencies"))
    sp.add_argument("--family")
    sp.add_argument("--coupling", choices=KINDS)
    sp.add_argument("--n", type=int)
    sp.add_argument("--start", type=int)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--pairs", action="store_true", help="every pair (default)")
    g.add_argument("--tuples", type=int, metavar="K")
    g.add_argument("--event", action="append", metavar="A,B[,C..]", help="member tuple (repeatable)")

    sp = common(sub.add_parser("bounds", help="F and the lower envelope on a grid"), seed=False)
    sp.add_argument("--grid-step", type=float)
    sp.add_argument("--kn-points", type=int, metavar="KMAX")

    sp = common(sub.add_parser("assignments", help="(n,k)-assignment counts and searches"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--restarts", type=int)
    sp.add_argument("--iters", type=int)
    sp.add_argument("--start", choices=("random", "greedy"))
    sp.add_argument("--witness", help="write the assignment as JSON here")
    sp.add_argument("action", choices=("greedy", "mod", "search", "exhaustive", "identity", "profile", "q"))
    sp.add_argument("params", nargs="*", help="mod: M C; q: optional 'search'")

    sp = common(sub.add_parser("oracle", help="LP ground truth"), seed=False)
    sp.add_argument("--family")
    sp.add_argument("--joint", action="store_true", default=None, help="also print the optimal joint")
    sp.add_argument("problem", choices=("minimax", "minsum", "pair"))
    sp.add_argument("members", nargs="*")

    sp = common(sub.add_parser("render", help="simplex partition as SVG"))
    sp.add_argument("--coupling", choices=("i", "ii"))
    sp.add_argument("--resolution", type=int)
    sp.add_argument("--clocks", help="three comma-separated clocks (clock coupling)")
    return p


def _resolve(args) -> None:
    """Fill unset options from the config file, then the defaults."""
    config = {}
    if args.config:
        config = json.loads(Path(args.config).read_text())
        if not isinstance(config, dict):
            raise DomainError("config file must hold a JSON object")
        config = {k.replace("-", "_"): v for k, v in config.items()}
    defaults = dict(DEFAULTS[args.command])
    if hasattr(args, "seed"):
        defaults["seed"] = os.environ.get(SEED_ENV, "0")
    for key in set(defaults) | (set(config) & set(vars(args))):
        if getattr(args, key, None) in (None, False):
            setattr(args, key, config.get(key, defaults.get(key)))
    if hasattr(args, "seed"):
        args.seed = parse_seed(args.seed)


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        _resolve(args)
        out = Output(args, _header(args, argv))
        COMMANDS[args.command](args, out)
        out.close()
    except UsageError as exc:
        print(f"tvcouple {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (TvCoupleError, OSError, json.JSONDecodeError) as exc:
        print(f"tvcouple {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
