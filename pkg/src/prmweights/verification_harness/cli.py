"""Command-line entry point: ``prmweights <subcommand> [flags]``.

Exit status is 0 when every assertion passes, 1 when some check fails and 2
for invalid input (bad parameters, hypothesis violations, caps exceeded).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .. import __version__
from ..conjecture_formulas import (
    irreducible_count_interval,
    no_linear_factor_bound,
    hyperplane_product_bound,
    low_dim_point_bound,
    nonirreducible_bound,
    predicted_deg_bound,
    predicted_dim_bound,
    q_threshold_l1,
    q_threshold_lc,
)
from ..finite_field import FieldError, field_new, field_of_order
from ..point_geometry import AFFINE, PROJECTIVE, standard_table
from ..search_oracle import EXHAUSTIVE, SAMPLE, CapExceeded, ghw_search, max_common_zeros
from ..weight_combinatorics import omega_size, pi
from .cache import ResultCache
from .compare import compare_formula_oracle, formula_row
from .lemmas import LEMMA_IDS, HypothesisError, expand_grid, run_lemma_suite
from .report import SweepReport, emit_table

COMPARE = "compare"
COMPARISONS = {COMPARE: None, "compare-projective": PROJECTIVE, "compare-affine": AFFINE}


class UsageError(ValueError):
    pass


# -- argument handling -------------------------------------------------------------------

def read_config(path: str) -> dict:
    """key=value lines; blank lines and '#' comments ignored; keys use flag names without dashes."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        k, v = (x.strip() for x in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def _common(p: argparse.ArgumentParser, r_required: bool = False) -> None:
    g = p.add_argument_group("parameters")
    g.add_argument("--q", type=int, help="field size (a prime power)")
    g.add_argument("--p", type=int, help="characteristic; use with --e")
    g.add_argument("--e", type=int, default=1, help="extension degree (default 1)")
    g.add_argument("--d", type=int, help="degree")
    g.add_argument("--m", type=int, help="projective / affine dimension")
    g.add_argument("--r", type=int, help="number of forms")
    g.add_argument("--r-range", help="inclusive range a..b, or 'all'")
    g.add_argument("--kind", choices=(PROJECTIVE, AFFINE), default=PROJECTIVE)
    s = p.add_argument_group("search")
    s.add_argument("--mode", choices=(EXHAUSTIVE, SAMPLE), default=EXHAUSTIVE)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--max-subspaces", type=int, default=None)
    s.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $PRMWEIGHTS_WORKERS or 1)")
    s.add_argument("--cache", help="append-only JSONL results cache")
    o = p.add_argument_group("output")
    o.add_argument("--out", help="write output here instead of stdout")
    o.add_argument("--format", choices=("json", "csv"), default="json")
    o.add_argument("--timing", action="store_true", help="include wall time in reports")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prmweights", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--config", help="key=value file supplying flag defaults")
    sub = ap.add_subparsers(dest="command", required=True)

    f = sub.add_parser("formula", help="evaluate the closed forms and thresholds")
    _common(f)
    f.add_argument("--l", type=int, help="threshold for an explicit (l, c) cell")
    f.add_argument("--c", type=int)
    f.add_argument("--l1-e", type=int, help="exponent e for the l=1 threshold")
    f.add_argument("--k", type=int, help="dimension for the point-count bounds")
    f.add_argument("--delta", type=int, help="degree for the point-count bounds")
    f.add_argument("--a", type=int, help="hyperplane section size for a q + 1")

    o = sub.add_parser("oracle", help="exhaustive or sampled search for e_r")
    _common(o)

    g = sub.add_parser("ghw", help="generalized Hamming weights, directly and via pi_m - e_r")
    _common(g)

    v = sub.add_parser("verify", help="run a lemma suite or a formula/oracle comparison")
    v.add_argument("target", help=f"one of: {', '.join(LEMMA_IDS + tuple(COMPARISONS))}")
    v.add_argument("--grid", help="grid as JSON text or a path to a JSON file")
    v.add_argument("--explore", action="store_true", help="compare outside q >= d+1 without asserting")
    _common(v)

    w = sub.add_parser("sweep", help="run the sweeps described in a JSON spec file")
    w.add_argument("specfile")
    _common(w)
    return ap


def parse_args(argv):
    ap = build_parser()
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        conf = read_config(known.config)
        for action in ap._subparsers._group_actions[0].choices.values():
            types = {a.dest: a.type for a in action._actions}
            action.set_defaults(**{k: (types.get(k) or str)(v) for k, v in conf.items() if k in types})
    return ap.parse_args(argv)


def _field(args):
    if args.q is not None and args.p is not None:
        raise UsageError("give either --q or --p/--e, not both")
    if args.q is not None:
        return field_of_order(args.q)
    if args.p is not None:
        return field_new(args.p, args.e)
    raise UsageError("a field is required: --q or --p/--e")


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _r_values(args):
    top = omega_size(args.d, args.m)
    if args.r is not None and args.r_range is not None:
        raise UsageError("give either --r or --r-range")
    if args.r is not None:
        return [args.r]
    if args.r_range is None or args.r_range == "all":
        return list(range(1, top + 1))
    try:
        a, b = args.r_range.split("..")
        return list(range(int(a), int(b) + 1))
    except ValueError as exc:
        raise UsageError(f"cannot read --r-range {args.r_range!r}") from exc


def _emit(text: str, args) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _cache(args):
    return ResultCache(args.cache) if args.cache else None


# -- subcommands -------------------------------------------------------------------------------

def cmd_formula(args) -> int:
    out = {}
    if args.l is not None or args.c is not None:
        _require(args, "d", "m", "l", "c")
        out["threshold_lc"] = q_threshold_lc(args.d, args.m, args.l, args.c)
    if args.l1_e is not None:
        _require(args, "d")
        t = q_threshold_l1(args.d, args.l1_e)
        out["threshold_l1"] = str(t)
    has_field = args.q is not None or args.p is not None
    if args.k is not None and has_field:
        q = _field(args).q
        if args.delta is not None:
            lo, hi, ok = irreducible_count_interval(args.k, args.delta, q)
            out["irreducible_count_interval"] = {"lower": lo, "upper": hi, "hypothesis": ok}
            b = nonirreducible_bound(args.k, args.delta, q)
            out["nonirreducible_bound"] = {"value": b.value, "hypothesis": b.hypothesis, "exclusive": True}
        if args.d is not None and args.m is not None:
            b = low_dim_point_bound(args.d, args.m, args.k, q)
            out["low_dim_point_bound"] = {"value": b.value, "hypothesis": b.hypothesis}
    if args.a is not None and has_field:
        out["hyperplane_product_bound"] = hyperplane_product_bound(args.a, _field(args).q)
    if args.d is not None and args.m is not None and has_field and args.l is None and args.l1_e is None \
            and args.k is None and args.a is None:
        q = _field(args).q
        rows = []
        for r in _r_values(args):
            row = formula_row(args.d, args.m, r, q)
            row["dim_bound"] = predicted_dim_bound(args.d, args.m, r)
            row["deg_bound"] = predicted_deg_bound(args.d, args.m, r) if row["c"] is not None else None
            rows.append(row)
        hk = no_linear_factor_bound(args.d, args.m, q)
        if args.format == "csv":
            _emit(emit_table(SweepReport("formula", rows=rows), "csv"), args)
            return 0
        out["rows"] = rows
        out["no_linear_factor_bound"] = {"value": hk.value, "hypothesis": hk.hypothesis}
    if not out:
        raise UsageError("nothing to evaluate: give --d/--m/--q, or --l/--c, --l1-e, --k/--delta, --a")
    _emit(_dump(out), args)
    return 0


def cmd_oracle(args) -> int:
    _require(args, "d", "m")
    F = _field(args)
    table = standard_table(args.d, args.m, F, args.kind)
    cache = _cache(args)
    results = []
    for r in _r_values(args):
        params = {"d": args.d, "m": args.m, "r": r, "p": F.p, "e": F.e, "kind": args.kind, "mode": args.mode}
        if args.mode == SAMPLE:
            params.update(seed=args.seed, samples=args.samples)

        def compute(r=r):
            return max_common_zeros(args.d, args.m, r, F, kind=args.kind, mode=args.mode, seed=args.seed,
                                    samples=args.samples, max_subspaces=args.max_subspaces,
                                    workers=args.workers).to_json(F, table.basis, timing=args.timing)

        data = cache.fetch("max_common_zeros", params, compute) if cache is not None else compute()
        results.append({"r": r, **data})
    if args.format == "csv":
        rows = []
        for res in results:
            row = formula_row(args.d, args.m, res["r"], F.q)
            row.update(oracle=res["value"], exhaustive=res["exhaustive"])
            rows.append(row)
        _emit(emit_table(SweepReport("oracle", rows=rows), "csv"), args)
    else:
        _emit(_dump({"q": F.q, "d": args.d, "m": args.m, "kind": args.kind, "results": results}), args)
    return 0


def cmd_ghw(args) -> int:
    _require(args, "d", "m")
    F = _field(args)
    out = []
    ok = True
    for r in _r_values(args):
        direct = ghw_search(args.d, args.m, r, F, mode=args.mode, seed=args.seed, samples=args.samples,
                            max_subspaces=args.max_subspaces, workers=args.workers)
        zeros = max_common_zeros(args.d, args.m, r, F, mode=args.mode, seed=args.seed, samples=args.samples,
                                 max_subspaces=args.max_subspaces, workers=args.workers)
        via = pi(args.m, F.q) - zeros.value
        agree = direct.value == via
        asserted = direct.exhaustive and zeros.exhaustive and F.q >= args.d + 1
        if asserted and not agree:
            ok = False
        out.append({"r": r, "ghw": direct.value, "pi_minus_e_r": via, "agree": agree, "asserted": asserted,
                    "exhaustive": direct.exhaustive and zeros.exhaustive})
    _emit(_dump({"q": F.q, "d": args.d, "m": args.m, "results": out}), args)
    return 0 if ok else 1


def _load_grid(text):
    if text is None:
        return None
    p = Path(text)
    return json.loads(p.read_text() if p.exists() else text)


def _finish(reports: list[SweepReport], args) -> int:
    if args.format == "csv":
        rows = [row for rep in reports for row in rep.rows]
        text = emit_table(SweepReport("combined", rows=rows), "csv")
    elif len(reports) == 1:
        text = reports[0].dumps(args.timing)
    else:
        text = _dump([rep.to_json(args.timing) for rep in reports])
    _emit(text, args)
    bad = [rep for rep in reports if not rep.ok]
    for rep in bad:
        total = rep.notes.get("failures_total", len(rep.failures))
        print(f"FAIL {rep.target}: {total} failing tuple(s); minimal: "
              f"{json.dumps(rep.minimal_failure(), sort_keys=True)}", file=sys.stderr)
    return 1 if bad else 0


def _compare(args, d, m, F, r_values, kind, explore=False):
    return compare_formula_oracle(d, m, F, r_values, kind=kind, mode=args.mode, seed=args.seed,
                                  samples=args.samples, max_subspaces=args.max_subspaces,
                                  workers=args.workers, cache=_cache(args), explore=explore)


def cmd_verify(args) -> int:
    if args.target in COMPARISONS:
        _require(args, "d", "m")
        kind = COMPARISONS[args.target] or args.kind
        rep = _compare(args, args.d, args.m, _field(args), _r_values(args), kind, args.explore)
        return _finish([rep], args)
    if args.target not in LEMMA_IDS:
        raise UsageError(f"unknown target {args.target!r}; known: {', '.join(LEMMA_IDS + tuple(COMPARISONS))}")
    return _finish([run_lemma_suite(args.target, _load_grid(args.grid))], args)


def cmd_sweep(args) -> int:
    """Spec file: one object or a list of objects with ``target`` and ``grid``.

    For ``compare`` the grid sets q (or p and e), d, m and optionally r and kind.
    """
    spec = json.loads(Path(args.specfile).read_text())
    entries = spec if isinstance(spec, list) else spec.get("sweeps", [spec])
    reports = []
    for entry in entries:
        target = entry["target"]
        if target in COMPARISONS:
            for pt in expand_grid(entry["grid"]):
                F = field_new(pt["p"], pt.get("e", 1)) if "p" in pt else field_of_order(pt["q"])
                r_values = pt.get("r")
                r_values = [r_values] if isinstance(r_values, int) else r_values
                kind = COMPARISONS[target] or pt.get("kind", PROJECTIVE)
                reports.append(_compare(args, pt["d"], pt["m"], F, r_values, kind, entry.get("explore", False)))
        elif target in LEMMA_IDS:
            reports.append(run_lemma_suite(target, entry.get("grid")))
        else:
            raise UsageError(f"unknown sweep target {target!r}")
    return _finish(reports, args)


COMMANDS = {"formula": cmd_formula, "oracle": cmd_oracle, "ghw": cmd_ghw, "verify": cmd_verify,
            "sweep": cmd_sweep}


def main(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        return COMMANDS[args.command](args)
    except (UsageError, HypothesisError, CapExceeded, FieldError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
