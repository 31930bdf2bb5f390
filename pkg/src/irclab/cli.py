"""Command-line entry point: ``irclab <group> <command> [flags]``.

Each run writes ``<group>_<command>.jsonl`` and ``<group>_<command>.csv`` into
``--out-dir``. The first JSON line and the first CSV line (a ``#`` comment)
carry the resolved run configuration. Worker count and output directory are
execution details and are left out of it, so reruns that differ only in those
produce byte-identical files.

Exit codes: 0 ok, 2 invalid input, 3 size cap exceeded, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from ._common import (
    DEFAULT_CAPS,
    CapExceeded,
    ValidationError,
    frac_str,
    parse_fraction,
    resolved_caps,
    set_cap_overrides,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CAP = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


# ----------------------------------------------------------------------------
# value parsing


def _dyadic_text(text) -> Fraction:
    """Accept 2^-5, 2**-5 or a plain rational such as 1/32."""
    s = str(text).strip().replace("**", "^")
    if s.startswith("2^"):
        try:
            e = int(s[2:])
        except ValueError:
            raise ValidationError(f"bad dyadic threshold {text!r}") from None
        return Fraction(1, 2**-e) if e <= 0 else Fraction(2**e)
    return parse_fraction(s)


def _int_list(text) -> list[int]:
    if isinstance(text, list):
        return [int(x) for x in text]
    s = str(text).strip()
    return [int(x) for x in s.split(",") if x.strip()] if s else []


def _str_list(text) -> list[str]:
    if isinstance(text, list):
        return [str(x) for x in text]
    s = str(text).strip()
    return [x.strip() for x in s.split(",") if x.strip()] if s else []


def _jsonable(v):
    if isinstance(v, Fraction):
        return frac_str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass(frozen=True)
class Opt:
    name: str
    kind: Callable[[Any], Any] | str
    default: Any = None
    required: bool = False
    help: str = ""
    choices: tuple | None = None

    @property
    def dest(self) -> str:
        return self.name.replace("-", "_")

    def convert(self, value):
        if self.kind == "flag":
            return bool(value)
        try:
            out = self.kind(value)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"--{self.name}: {exc}") from None
        if self.choices and out not in self.choices:
            raise ValidationError(f"--{self.name} must be one of {', '.join(map(str, self.choices))}")
        return out


@dataclass(frozen=True)
class Command:
    group: str
    name: str
    help: str
    opts: tuple[Opt, ...]
    handler: Callable[[dict, "Context"], "Outcome"]
    csv_columns: tuple[str, ...]


@dataclass
class Context:
    seed: int
    workers: int


@dataclass
class Outcome:
    records: list[dict]
    rows: list[dict]
    summary: str


COMMON = (
    Opt("seed", int, 0, help="64-bit seed for every random draw"),
    Opt("workers", int, 1, help="worker threads; never changes results"),
    Opt("out-dir", str, "irclab-out", help="directory for the JSON-lines and CSV files"),
)


# ----------------------------------------------------------------------------
# handlers


def _chacon_verify_spacing(p, ctx):
    from .symbolic import chacon_length, forbidden_distance_check

    records, rows = [], []
    total_hits = 0
    all_gaps: set[int] = set()
    for N in range(1, p["max_level"] + 1):
        report = forbidden_distance_check(N, p["pattern"])
        gaps = sorted(report.gap_values())
        all_gaps.update(gaps)
        total_hits += len(report.forbidden_hits)
        rec = {"kind": "level", "N": N, "length": chacon_length(N), "occurrences": len(report.starts), "gaps": gaps}
        rec["forbidden_hits"] = [list(h) for h in report.forbidden_hits]
        records.append(rec)
        rows.append(
            {"N": N, "length": rec["length"], "occurrences": len(report.starts), "gaps": " ".join(map(str, gaps)), "forbidden_hits": len(report.forbidden_hits)}
        )
    records.append({"kind": "summary", "forbidden_hits": total_hits, "gaps": sorted(all_gaps)})
    return Outcome(records, rows, f"forbidden_hits={total_hits} gaps={sorted(all_gaps)}")


def _chacon_orbit_stats(p, ctx):
    from .actions import ChaconShiftSystem, orbit_stat
    from .symbolic import chacon_length, chacon_offsets

    stop = p["stop"] if p["stop"] is not None else chacon_length(6) - chacon_length(3) - 4
    system = ChaconShiftSystem(p["level"], two_sided_point=p["two_sided_point"])
    Y = chacon_offsets(p["l_count"], p["first_block"])
    stat = orbit_stat(system, Y, range(p["start"], stop), p["eps"], p["mode"], p["r"], workers=ctx.workers)
    rec = {"kind": "orbit_stat", "offsets": Y, **stat.to_json()}
    return Outcome([rec], [stat.csv_row()], f"{p['mode']}={frac_str(stat.fraction)}")


def _hyperspace_count_covers(p, ctx):
    from .hyperspace import FullShiftProfile, count_covering_subsets, covering_fraction_bound

    profile = FullShiftProfile(p["n"], p["two_sided"])
    kappa = profile.kappa(p["k"] + p["i"])
    count = count_covering_subsets(profile, p["k"], p["i"], p["r"])
    total = math.comb(kappa, p["r"]) if p["r"] <= kappa else 0
    bound = covering_fraction_bound(profile, p["k"], p["i"], p["r"])
    rec = {
        "kind": "covering",
        "count": str(count),
        "total": str(total),
        "fraction": frac_str(Fraction(count, total)) if total else None,
        "bound": frac_str(bound),
        "bound_float": float(bound),
    }
    row = {"n": p["n"], "k": p["k"], "i": p["i"], "r": p["r"], "count": count, "total": total, "fraction": rec["fraction"], "bound": rec["bound"]}
    return Outcome([rec], [row], f"{count}/{total}")


def _hyperspace_occupancy(p, ctx):
    from .estimator import from_law, tv_distance
    from .hyperspace import FullShiftProfile, distribution_to_json, finitary_occupancy_law, sample_occupancy

    profile = FullShiftProfile(p["n"], p["two_sided"])
    if p["samples"] == 0:
        law = finitary_occupancy_law(profile, p["k"], p["m"])
        records = [{"kind": "atom", "exact": True, **a} for a in distribution_to_json(law)]
        rows = [{"cells": " ".join(a["levelset"]["cells"]), "mass": a["mass"], "exact": 1} for a in distribution_to_json(law)]
        return Outcome(records, rows, f"exact law with {len(law)} atoms")
    E = sample_occupancy(profile, p["k"], p["m"], p["samples"], ctx.seed, ctx.workers)
    records = [{"kind": "atom", "exact": False, "levelset": A.to_json(), "mass": frac_str(w)} for A, w in E.atoms.items()]
    rows = [{"cells": " ".join(sorted(A.cells)), "mass": frac_str(w), "exact": 0} for A, w in E.atoms.items()]
    try:
        tv = tv_distance(E, from_law(finitary_occupancy_law(profile, p["k"], p["m"])))
    except CapExceeded:
        tv = None
    records.append({"kind": "summary", "samples": p["samples"], "tv_to_exact": None if tv is None else frac_str(tv)})
    return Outcome(records, rows, f"tv_to_exact={None if tv is None else float(tv):.6g}" if tv is not None else "tv_to_exact=n/a")


def _actions_transitivity(p, ctx):
    from .actions import alt_generators, cycle_generator, sym_generators, transitivity_check

    size = p["size"]
    family = p["generators"]
    if family == "sym":
        gens = sym_generators(size)
    elif family == "alt":
        gens = alt_generators(size)
    else:
        gens = [cycle_generator(size)]
    rs = [p["r"]] if p["r"] is not None else list(range(1, size + 1))
    modes = ["set", "tuple"] if p["mode"] == "both" else [p["mode"]]
    records, rows = [], []
    for r in rs:
        for mode in modes:
            ok = transitivity_check(gens, r, mode)
            records.append({"kind": "check", "generators": family, "size": size, "r": r, "mode": mode, "transitive": ok})
            rows.append({"generators": family, "size": size, "r": r, "mode": mode, "transitive": int(ok)})
    passed = sum(1 for rec in records if rec["transitive"])
    return Outcome(records, rows, f"{passed}/{len(records)} transitive")


def _actions_zk(p, ctx):
    from .actions import PrefixGroupSystem, orbit_stat, sunny_side_up

    level = p["level"] if p["level"] is not None else max(p["k"], 3)
    system = PrefixGroupSystem(p["n"], p["k"])
    Y = sunny_side_up(level)
    if p["samples"] == 0:
        stat = orbit_stat(system, Y, list(system.exhaustive()), p["eps"], "Z", workers=ctx.workers)
    else:
        stat = orbit_stat(system, Y, "sample", p["eps"], "Z", samples=p["samples"], seed=ctx.seed, workers=ctx.workers)
    rec = {"kind": "orbit_stat", "k": p["k"], "level": level, **stat.to_json()}
    row = {"k": p["k"], **stat.csv_row()}
    return Outcome([rec], [row], f"Z_{p['k']}={frac_str(stat.fraction)}")


def _actions_rblock(p, ctx):
    from .actions import rblock_containment

    res = rblock_containment(p["n"], p["m"], p["k"], p["alpha"], p["r"], p["mode"], p["samples"], ctx.seed, ctx.workers)
    rec = {"kind": "rblock", "n": p["n"], "m": p["m"], "k": p["k"], "alpha": p["alpha"], "r": p["r"], **res.to_json()}
    row = {
        key: rec.get(key)
        for key in ("n", "m", "k", "alpha", "r", "mode", "probability", "count_bound", "envelope", "gamma", "vacuous")
    }
    prob = rec["probability"]
    return Outcome([rec], [row], f"probability={prob}" if prob is not None else f"envelope={rec['envelope']}")


def _digit_set(p):
    from .torus import DigitSet

    digits = tuple(p["digits"]) if p["digits"] else None
    return DigitSet(p["base"], digits, tuple(p["forbidden"]))


def _torus_dilate_density(p, ctx):
    from .torus import dilation_density

    Y = _digit_set(p)
    res = dilation_density(Y, p["m"], p["eps"], p["margin"], ctx.workers)
    records = [{"kind": "row", **row.csv_row(), "slack": frac_str(row.slack)} for row in res.rows]
    records.append({"kind": "summary", "digit_set": Y.describe(), **res.to_json()})
    rows = [row.csv_row() for row in res.rows]
    return Outcome(records, rows, f"fraction={frac_str(res.fraction)} ambiguous={res.ambiguous}")


def _torus_extract_j(p, ctx):
    from .torus import extract_J

    Y = _digit_set(p)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = extract_J(Y, p["horizon"], p["r_max"], p["margin"], ctx.workers)
    rec = {"kind": "extraction", "digit_set": Y.describe(), **res.to_json(), "warnings": [str(w.message) for w in caught]}
    rows = []
    for m in range(1, p["horizon"] + 1):
        r = res.r_of_m[m]
        gap = res.sup_gap[m]
        rows.append(
            {
                "m": m,
                "r_m": "" if r is None else r,
                "density": frac_str(res.trace[m]),
                "density_floor": "" if r is None else frac_str(1 - Fraction(1, 2**r)),
                "sup_gap": "" if gap is None else frac_str(gap),
            }
        )
    return Outcome([rec], rows, f"|J|={len(res.J)}")


def _torus_berend_peres(p, ctx):
    from .torus import berend_peres, divisibility_fraction, folner_mult, max_folner

    cond = berend_peres(p["i_max"], p["rule"])
    t = p["t"] if p["t"] is not None else len(cond.Q)
    records = [{"kind": "construction", **cond.to_json(), "t": t}]
    rows = []
    elements = folner_mult(p["m"]).elements
    for i in range(1, len(cond.Q) + 1):
        q = cond.Q[i - 1]
        limit = max_folner(2 * cond.m_seq[i - 1])
        tested = [n for n in elements if n % q == 0 and n <= limit]
        failures = cond.implication_failures(i, p["m"], t)
        stat = cond.condensation_stat(p["m"], Fraction(1, 2**i), t)
        records.append({"kind": "implication", "i": i, "tested": len(tested), "failures": failures, "condensation": frac_str(stat)})
        rows.append({"kind": "implication", "i": i, "s": "", "tested": len(tested), "failures": len(failures), "value": frac_str(stat), "closed_form": ""})
    for s in range(p["m"] + 1):
        direct, closed = divisibility_fraction(p["m"], s)
        records.append({"kind": "divisibility", "m": p["m"], "s": s, "direct": frac_str(direct), "closed_form": frac_str(closed)})
        rows.append({"kind": "divisibility", "i": "", "s": s, "tested": "", "failures": "", "value": frac_str(direct), "closed_form": frac_str(closed)})
    bad = sum(len(r["failures"]) for r in records if r["kind"] == "implication")
    return Outcome(records, rows, f"implication_failures={bad}")


def _torus_weyl(p, ctx):
    from .torus import weyl_discrepancy

    seq = p["sequence"]
    S = seq if seq in ("naturals", "squares") else _int_list(seq)
    alphas = _str_list(p["alpha"])
    if not alphas:
        raise ValidationError("--alpha is empty")
    alpha = alphas[0] if len(alphas) == 1 else alphas
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = weyl_discrepancy(S, alpha, p["N"])
    rec = {"kind": "discrepancy", "sequence": seq, "alpha": alphas, **res.to_json(), "warnings": [str(w.message) for w in caught]}
    row = {"sequence": seq, "alpha": " ".join(alphas), "N": p["N"], "discrepancy": repr(res.discrepancy), "rational_alpha": int(res.rational_alpha)}
    return Outcome([rec], [row], f"discrepancy={res.discrepancy:.12g}")


def _estimate_accumulate(p, ctx):
    from .actions import ChaconShiftSystem, PrefixGroupSystem, sunny_side_up
    from .estimator import accumulate, mass_near_finite, mass_near_full
    from .symbolic import chacon_offsets

    if p["system"] == "chacon":
        system = ChaconShiftSystem(p["level"], two_sided_point=p["two_sided_point"])
        Y = chacon_offsets(p["l_count"], p["first_block"])
        stop = p["stop"] if p["stop"] is not None else 100
        window = range(p["start"], stop)
        prov = {"system": "chacon_shift", "window": f"[{p['start']},{stop})", "offsets": Y}
    else:
        system = PrefixGroupSystem(p["n"], p["k"])
        Y = sunny_side_up(p["level"])
        if p["samples"] == 0:
            window = list(system.exhaustive())
            prov = {"system": "prefix_group", "window": "exhaustive"}
        else:
            window = [system.sample(ctx.seed, i) for i in range(p["samples"])]
            prov = {"system": "prefix_group", "window": f"sample:{p['samples']}", "seed": ctx.seed}
    E = accumulate(system, Y, window, ctx.workers, prov)
    near_full = mass_near_full(E, p["eps"])
    finite_eps = p["finite_eps"] if p["finite_eps"] is not None else p["eps"]
    near_finite = {r: mass_near_finite(E, r, finite_eps) for r in p["r"]}
    records = [
        {"kind": "measure", **E.to_json()},
        {
            "kind": "diagnostics",
            "eps": frac_str(p["eps"]),
            "mass_near_full": frac_str(near_full),
            "finite_eps": frac_str(finite_eps),
            "mass_near_finite": {str(r): frac_str(v) for r, v in near_finite.items()},
        },
    ]
    rows = [{"statistic": "mass_near_full", "r": "", "eps": frac_str(p["eps"]), "value": frac_str(near_full)}]
    rows += [{"statistic": "mass_near_finite", "r": r, "eps": frac_str(finite_eps), "value": frac_str(v)} for r, v in near_finite.items()]
    return Outcome(records, rows, f"atoms={len(E.atoms)} mass_near_full={frac_str(near_full)}")


DIGIT_OPTS = (
    Opt("base", int, 3, help="digit base p"),
    Opt("digits", _int_list, "0,2", help="allowed digits, comma separated (empty: all)"),
    Opt("forbidden", _str_list, "", help="forbidden digit words, comma separated"),
    Opt("margin", int, 6, help="extra resolution levels beyond ceil(log_p n)"),
)

COMMANDS = (
    Command(
        "chacon", "verify-spacing", "scan b_1..b_N for forbidden 0010 spacings",
        (Opt("max-level", int, required=True, help="largest block index N"), Opt("pattern", str, "0010")),
        _chacon_verify_spacing, ("N", "length", "occurrences", "gaps", "forbidden_hits"),
    ),
    Command(
        "chacon", "orbit-stats", "D/E/Z statistic of Chacon translates over a shift window",
        (
            Opt("level", int, 4),
            Opt("l-count", int, 3, help="how many elements of L to use"),
            Opt("first-block", int, 2, help="block index of the first element of L used"),
            Opt("start", int, 4),
            Opt("stop", int, None, help="default |b_6| - |b_3| - 4"),
            Opt("eps", _dyadic_text, "2^-5"),
            Opt("mode", str, "D", choices=("D", "E", "Z")),
            Opt("r", int, None),
            Opt("two-sided-point", "flag", False, help="use the nested two-sided Chacon point"),
        ),
        _chacon_orbit_stats, ("window", "mode", "eps", "r", "fraction", "ci_lo", "ci_hi", "samples", "seed"),
    ),
    Command(
        "hyperspace", "count-covers", "count r-subsets of level k+i cells meeting every level-k cell",
        (
            Opt("n", int, required=True), Opt("k", int, required=True), Opt("i", int, required=True), Opt("r", int, required=True),
            Opt("two-sided", "flag", False),
        ),
        _hyperspace_count_covers, ("n", "k", "i", "r", "count", "total", "fraction", "bound"),
    ),
    Command(
        "hyperspace", "occupancy", "law of the level-m image of k i.i.d. points",
        (Opt("n", int, 2), Opt("k", int, required=True), Opt("m", int, required=True), Opt("samples", int, 0, help="0 for the exact law"), Opt("two-sided", "flag", False)),
        _hyperspace_occupancy, ("cells", "mass", "exact"),
    ),
    Command(
        "actions", "transitivity", "orbit search on r-sets or r-tuples of cells",
        (
            Opt("generators", str, "sym", choices=("sym", "alt", "cycle")),
            Opt("size", int, required=True, help="number of cells"),
            Opt("r", int, None, help="default: every r from 1 to size"),
            Opt("mode", str, "both", choices=("set", "tuple", "both")),
        ),
        _actions_transitivity, ("generators", "size", "r", "mode", "transitive"),
    ),
    Command(
        "actions", "zk", "fraction of prefix permutations moving Y close to the whole space",
        (
            Opt("k", int, required=True), Opt("n", int, 2), Opt("level", int, None, help="default max(k, 3)"),
            Opt("eps", _dyadic_text, "2^-3"), Opt("samples", int, 0, help="0 for the exhaustive group"),
        ),
        _actions_zk, ("k", "window", "mode", "eps", "r", "fraction", "ci_lo", "ci_hi", "samples", "seed"),
    ),
    Command(
        "actions", "rblock", "probability that a random alpha-subset fits in r blocks",
        (
            Opt("n", int, required=True), Opt("m", int, required=True), Opt("k", int, required=True),
            Opt("alpha", int, required=True), Opt("r", int, required=True),
            Opt("mode", str, "exact", choices=("exact", "mc", "bound")), Opt("samples", int, 10_000),
        ),
        _actions_rblock, ("n", "m", "k", "alpha", "r", "mode", "probability", "count_bound", "envelope", "gamma", "vacuous"),
    ),
    Command(
        "torus", "dilate-density", "fraction of n in F_m with nY eps-dense",
        (Opt("m", int, required=True), Opt("eps", parse_fraction, "1/20")) + DIGIT_OPTS,
        _torus_dilate_density, ("n", "reduced_n", "m'", "max_gap", "verdict", "ambiguous"),
    ),
    Command(
        "torus", "extract-j", "build the set J from certified gaps over F_1..F_horizon",
        (Opt("horizon", int, required=True), Opt("r-max", int, 64)) + DIGIT_OPTS,
        _torus_extract_j, ("m", "r_m", "density", "density_floor", "sup_gap"),
    ),
    Command(
        "torus", "berend-peres", "condensing set construction and divisibility counts",
        (
            Opt("i-max", int, 3), Opt("rule", str, "true", choices=("true", "scaled")),
            Opt("m", int, 4, help="Folner index used for the statistics"), Opt("t", int, None, help="truncation, default i-max"),
        ),
        _torus_berend_peres, ("kind", "i", "s", "tested", "failures", "value", "closed_form"),
    ),
    Command(
        "torus", "weyl", "star discrepancy of s_i alpha mod 1",
        (
            Opt("sequence", str, "squares", help="naturals, squares or a comma-separated list"),
            Opt("alpha", str, "sqrt(2)", help="rational, sqrt(x), golden, phi, pi, e; comma separated for a vector"),
            Opt("N", int, required=True),
        ),
        _torus_weyl, ("sequence", "alpha", "N", "discrepancy", "rational_alpha"),
    ),
    Command(
        "estimate", "accumulate", "empirical measure of g.Y over a window, with distance diagnostics",
        (
            Opt("system", str, "chacon", choices=("chacon", "prefix")),
            Opt("level", int, 4), Opt("l-count", int, 3), Opt("first-block", int, 2),
            Opt("start", int, 0), Opt("stop", int, None, help="default 100"),
            Opt("two-sided-point", "flag", False),
            Opt("n", int, 2), Opt("k", int, 1), Opt("samples", int, 0, help="prefix system: 0 for exhaustive"),
            Opt("eps", _dyadic_text, "2^-5"), Opt("finite-eps", _dyadic_text, None), Opt("r", _int_list, "1,2,3"),
        ),
        _estimate_accumulate, ("statistic", "r", "eps", "value"),
    ),
)


# ----------------------------------------------------------------------------
# parsing and output


def build_parser() -> _Parser:
    parser = _Parser(prog="irclab", description="Finite-resolution invariant random compact set experiments.")
    groups = parser.add_subparsers(dest="group", metavar="group", parser_class=_Parser)
    groups.required = True
    subparsers = {}
    for cmd in COMMANDS:
        if cmd.group not in subparsers:
            gp = groups.add_parser(cmd.group, help=f"{cmd.group} experiments")
            subparsers[cmd.group] = gp.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
            subparsers[cmd.group].required = True
        sp = subparsers[cmd.group].add_parser(cmd.name, help=cmd.help, description=cmd.help)
        for opt in cmd.opts + COMMON:
            if opt.kind == "flag":
                sp.add_argument(f"--{opt.name}", dest=opt.dest, action="store_true", default=None, help=opt.help)
            else:
                extra = f" (default {opt.default})" if opt.default is not None else ""
                req = " [required]" if opt.required else ""
                sp.add_argument(f"--{opt.name}", dest=opt.dest, default=None, metavar=opt.dest.upper(), help=opt.help + extra + req)
        sp.add_argument("--config", default=None, help="JSON file of option values (flags take precedence)")
        sp.add_argument("--cap", action="append", default=None, metavar="NAME=VALUE", help=f"size cap override; caps: {', '.join(DEFAULT_CAPS)}")
        sp.set_defaults(_command=cmd, _parser=sp)
    return parser


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _parse_caps(items) -> dict[str, int]:
    out = {}
    for item in items or []:
        name, sep, value = str(item).partition("=")
        if not sep:
            raise ValidationError(f"--cap expects NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = int(float(value))
        except ValueError:
            raise ValidationError(f"--cap {name}: not a number") from None
    return out


def resolve(cmd: Command, ns: argparse.Namespace, parser: _Parser) -> tuple[dict, dict, int, int, str]:
    """Merge defaults < config file < flags; returns (params, caps, seed, workers, out_dir)."""
    config = _load_config(ns.config)
    known = {o.dest for o in cmd.opts + COMMON} | {"caps"}
    unknown = sorted(set(config) - known)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
    values = {}
    for opt in cmd.opts + COMMON:
        raw = getattr(ns, opt.dest)
        if raw is None:
            raw = config.get(opt.dest, opt.default)
        if raw is None:
            if opt.required:
                parser.error(f"the following arguments are required: --{opt.name}")
            values[opt.dest] = False if opt.kind == "flag" else None
            continue
        values[opt.dest] = opt.convert(raw)
    caps = dict(config.get("caps") or {})
    caps.update(_parse_caps(ns.cap))
    seed = values.pop("seed")
    if not 0 <= seed < 2**64:
        raise ValidationError("seed must be a 64-bit unsigned integer")
    workers = values.pop("workers")
    if workers < 1:
        raise ValidationError("workers must be >= 1")
    out_dir = values.pop("out_dir")
    return values, caps, seed, workers, out_dir


def _csv_text(columns, rows, run_config_line: str) -> str:
    buf = io.StringIO()
    buf.write(f"# run_config: {run_config_line}\n")
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        cmd: Command = ns._command
        params, caps, seed, workers, out_dir = resolve(cmd, ns, ns._parser)
    except UsageError:
        return EXIT_USAGE
    except ValidationError as exc:
        sys.stderr.write(f"irclab: invalid input: {exc}\n")
        return EXIT_INVALID
    stem = f"{cmd.group}_{cmd.name.replace('-', '_')}"
    try:
        set_cap_overrides(caps)
        run_config = {
            "command": f"{cmd.group} {cmd.name}",
            "params": {k: _jsonable(v) for k, v in sorted(params.items())},
            "seed": seed,
            "caps": resolved_caps(),
            "outputs": {"jsonl": f"{stem}.jsonl", "csv": f"{stem}.csv"},
        }
        outcome = cmd.handler(params, Context(seed, workers))
    except ValidationError as exc:
        sys.stderr.write(f"irclab: invalid input: {exc}\n")
        return EXIT_INVALID
    except CapExceeded as exc:
        sys.stderr.write(f"irclab: {exc}\n")
        return EXIT_CAP
    finally:
        set_cap_overrides({})
    config_line = json.dumps(run_config, sort_keys=True, separators=(",", ":"))
    lines = [json.dumps({"kind": "run_config", "run_config": run_config}, sort_keys=True, separators=(",", ":"))]
    lines += [json.dumps(rec, sort_keys=True, separators=(",", ":")) for rec in outcome.records]
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, f"{stem}.jsonl"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(os.path.join(out_dir, f"{stem}.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_csv_text(cmd.csv_columns, outcome.rows, config_line))
    print(outcome.summary)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
