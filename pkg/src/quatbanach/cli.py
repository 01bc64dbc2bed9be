"""Command-line front end: verification suites and valuation tables."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import random
import sys

from .config import ConfigError, RunConfig, load_config
from .decomposition import FiniteDistribution, in_torus_times_Gpn, project, projection_report, round_trip
from .enveloping import LETTERS, EnvelopingAlgebra, jacobi
from .lie import LieVec, SecondKindCoords, bracket, from_second_kind, to_second_kind
from .quaternion import Quat
from .suite import CRITERIA, run_suite
from .weight import InfChar, WeightChar, WeightModule, slope_report

log = logging.getLogger("quatbanach")


# --- helpers ------------------------------------------------------------------------------

def _module(cfg: RunConfig) -> WeightModule:
    p = cfg.p
    return WeightModule(cfg.params, WeightChar.from_ints(p, cfg.lam_I, cfg.lam_h), InfChar.from_int(p, cfg.chi), cfg.M)


def _coords(cfg: RunConfig) -> SecondKindCoords:
    return SecondKindCoords.from_ints(cfg.p, cfg.c_w, cfg.c_v, cfg.c_h, cfg.c_I, prec=cfg.prec)


def _header(cfg: RunConfig, command: str) -> dict:
    h = cfg.as_dict()
    h["command"] = command
    return h


def _table(rows: list[dict], fields: list[str], cfg: RunConfig, command: str) -> str:
    if cfg.format == "json":
        return json.dumps({"header": _header(cfg, command), "rows": rows}, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        log.info("wrote %s", cfg.out)
    else:
        sys.stdout.write(text)


def _fmt(x) -> str:
    return "inf" if x == float("inf") else str(x)


def _slope(x):
    return "none" if x is None else f"{x:.4f}"


# --- subcommands ------------------------------------------------------------------------

def cmd_brackets_verify(cfg: RunConfig, args) -> int:
    params = cfg.params
    p, iota = params.p, params.iota
    h, w, v = (LieVec.basis(x, params) for x in ("h", "w", "v"))
    checks = [
        ("bracket [h,w] = 2v", bracket(h, w, params) == v.scale(2)),
        ("bracket [h,v] = 2pw", bracket(h, v, params) == w.scale(2 * p)),
        ("bracket [w,v] = -2 iota h", bracket(w, v, params) == h.scale(-2 * iota)),
    ]
    alg = EnvelopingAlgebra.for_params(params)
    for i, x in enumerate(LETTERS):
        for y in LETTERS[i + 1:]:
            for z in LETTERS:
                checks.append((f"jacobi ({x},{y},{z})", jacobi(alg, x, y, z).is_zero()))
    delta = alg.casimir()
    for x in LETTERS:
        checks.append((f"casimir central [Delta,{x}] = 0", alg.commutator(delta, alg.letter(x)).is_zero()))
    rows = [{"check": name, "passed": ok} for name, ok in checks]
    _emit(_table(rows, ["check", "passed"], cfg, "brackets-verify"), cfg)
    return 0 if all(ok for _, ok in checks) else 1


def _image(cfg: RunConfig, part: str):
    W = _module(cfg)
    c = _coords(cfg)
    if part == "w":
        return W.exp_w_image(c.c_w)
    if part == "v":
        return W.exp_v_image(c.c_v)
    return W.group_image(c)


def _profile_text(X, cfg: RunConfig, command: str) -> str:
    if cfg.format == "json":
        return X.profile_json(_header(cfg, command)) + "\n"
    return X.profile_csv()


def cmd_valuation_table(cfg: RunConfig, args) -> int:
    _emit(_profile_text(_image(cfg, args.part), cfg, "valuation-table"), cfg)
    return 0


def cmd_expand(cfg: RunConfig, args) -> int:
    X = _image(cfg, "group")
    _emit(_profile_text(X, cfg, "expand"), cfg)
    rep = slope_report(X, cfg.n, cfg.window)
    summary = (f"slope_a={_slope(rep.slope_a)} slope_b={_slope(rep.slope_b)} censored={rep.censored} "
               f"in_W{cfg.n}={rep.verdict}\n")
    # keep machine-readable stdout clean when the table itself goes there
    (sys.stdout if cfg.out else sys.stderr).write(summary)
    return 0


def cmd_membership(cfg: RunConfig, args) -> int:
    W = _module(cfg)
    params = cfg.params
    elements = [("config", from_second_kind(_coords(cfg), params))]
    rng = random.Random(cfg.seed)
    for i in range(args.samples):
        elements.append((f"random{i}", Quat.one(params) + Quat.random_order(params, rng, 1)))
    rows, ok = [], True
    for name, g in elements:
        c = to_second_kind(g)
        rep = slope_report(W.group_image(c), cfg.n, cfg.window)
        crit = in_torus_times_Gpn(g, cfg.n)
        agree = rep.verdict == crit
        ok = ok and agree
        rows.append({"element": name, "n": cfg.n, "n_w": _fmt(c.n_w), "n_v": _fmt(c.n_v),
                     "slope_a": _slope(rep.slope_a), "slope_b": _slope(rep.slope_b), "censored": rep.censored,
                     "in_Wn": rep.verdict, "coset_criterion": crit, "agree": agree})
    fields = ["element", "n", "n_w", "n_v", "slope_a", "slope_b", "censored", "in_Wn", "coset_criterion", "agree"]
    _emit(_table(rows, fields, cfg, "membership"), cfg)
    return 0 if ok else 1


def cmd_decompose(cfg: RunConfig, args) -> int:
    W = _module(cfg)
    rng = random.Random(cfg.seed)
    d = FiniteDistribution.random(cfg.params, rng, args.atoms)
    comps = project(d, cfg.n, W)
    ok = round_trip(d, cfg.n, W)
    if cfg.format == "json":
        body = json.loads(projection_report(comps, _header(cfg, "decompose")))
        body["round_trip"] = ok
        text = json.dumps(body, indent=1, sort_keys=True) + "\n"
    else:
        rows = json.loads(projection_report(comps))["components"]
        for r in rows:
            r["coset_w"], r["coset_v"] = r.pop("coset")
        fields = ["coset_w", "coset_v", "level", "atoms", "min_val_a", "val_a_at_M", "censored"]
        text = _table(rows, fields, cfg, "decompose")
    _emit(text, cfg)
    print(f"round_trip={ok}", file=sys.stderr)
    return 0 if ok else 1


def cmd_suite(cfg: RunConfig, args) -> int:
    only = None if not args.only else {int(x) for x in args.only.split(",")}
    verbose = args.verbose

    def progress(res):
        log.info("criterion %d %s: %s in %.2fs (budget %.0fs)", res.key, res.name,
                 "PASS" if res.passed else "FAIL", res.elapsed, res.budget)

    results = run_suite(cfg, only, progress)
    if cfg.format == "json":
        checks = [{"criterion": r.key, "name": r.name, "passed": r.passed,
                   **({"statement": r.label, "detail": r.detail} if verbose else {})} for r in results]
        text = json.dumps({"header": _header(cfg, "suite"), "checks": checks}, indent=1, sort_keys=True) + "\n"
    else:
        lines = []
        for r in results:
            lines.append(f"{'PASS' if r.passed else 'FAIL'} [{r.key}] {r.name}")
            if verbose:
                lines.append(f"    statement: {r.label}")
                lines.append(f"    detail: {json.dumps(r.detail, sort_keys=True)}")
        lines.append(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
        text = "\n".join(lines) + "\n"
    _emit(text, cfg)
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "brackets-verify": (cmd_brackets_verify, "bracket table, Jacobi identity and Casimir centrality"),
    "expand": (cmd_expand, "valuation table of the group image plus slope and membership verdict"),
    "valuation-table": (cmd_valuation_table, "valuation table of exp_w, exp_v or the full group image"),
    "membership": (cmd_membership, "compare the tail-slope test with the coset criterion"),
    "decompose": (cmd_decompose, "project a seeded random distribution onto the cosets of T*G^{p^n}"),
    "suite": (cmd_suite, "run the acceptance criteria"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value configuration file")
    common.add_argument("--seed", type=int, help="random seed (unsigned 64-bit)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--out", metavar="PATH", help="write the report or table here instead of stdout")
    common.add_argument("--verbose", action="store_true", help="progress on stderr; statements in suite output")

    parser = argparse.ArgumentParser(prog="quatbanach", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {name: sub.add_parser(name, parents=[common], help=text) for name, (_, text) in COMMANDS.items()}
    subs["valuation-table"].add_argument("--part", choices=("group", "w", "v"), default="group")
    subs["membership"].add_argument("--samples", type=int, default=0, help="extra seeded random elements")
    subs["decompose"].add_argument("--atoms", type=int, default=3, help="maximum number of atoms")
    subs["suite"].add_argument("--only", help="comma-separated criterion numbers, e.g. 1,2,10")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config, seed=args.seed, format=args.format, out=args.out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    print(f"seed={cfg.seed}", file=sys.stderr)
    if args.command == "suite" and args.only:
        known = {k for k, *_ in CRITERIA}
        bad = [x for x in args.only.split(",") if not x.strip().isdigit() or int(x) not in known]
        if bad:
            print(f"unknown criteria: {','.join(bad)}", file=sys.stderr)
            return 2
    func = COMMANDS[args.command][0]
    try:
        return func(cfg, args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
