"""Formula versus oracle comparison tables.

For each r the row carries the range parameters, every formula value, the
thresholds and the oracle's answer.  What gets asserted depends on what is
known for the parameters:

* affine, q >= d+1: oracle == H_r(d, m);
* projective, q >= d+1, a regime where the closed form for e_r is a theorem
  (see :func:`proven_regime`): oracle == e_bdg;
* projective, q >= d+1, otherwise: oracle >= e_bdg (the lower bound always holds).

Every witness is re-evaluated point by point, independently of the search
masks, and must reproduce the reported value.  Sample-mode oracle values are
lower bounds only, so in proven regimes they are checked with <= instead.
"""

from __future__ import annotations

import time
from fractions import Fraction

from ..conjecture_formulas import (
    RangeError,
    bdg_terms,
    e_affine,
    e_bdg,
    e_bt,
    l1_exponent,
    l1_threshold_holds,
    q_threshold_l1,
    q_threshold_main,
    range_lc,
)
from ..finite_field import FieldSpec
from ..point_geometry import AFFINE, PROJECTIVE, standard_table, subspace_from_json, zero_count
from ..search_oracle import EXHAUSTIVE, OracleResult, max_common_zeros
from ..weight_combinatorics import binom, omega_size
from .lemmas import HypothesisError
from .report import SweepReport


def _fraction_text(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def proven_regime(d: int, m: int, r: int, q: int) -> str | None:
    """Name of a known result giving e_r(d, m) = e_bdg at these parameters, or None.

    Every entry assumes q >= d+1.
    """
    if q < d + 1:
        return None
    top = omega_size(d, m)
    p = range_lc(d, m, r)
    if d == 1:
        return "d=1"
    if m == 1:
        return "m=1"
    if r <= m + 1:
        return "r<=m+1"
    if r >= top - d:
        return "l in {m, m+1}"
    if d == 2:
        return "d=2"
    if p.l == 1:
        if r <= binom(m + 2, 2):
            return "l=1, r<=C(m+2,2)"
        if q >= (d - 1) ** 2:
            return "l=1, q>=(d-1)^2"
        e = l1_exponent(m, r, d)
        if m >= 2 and e is not None and l1_threshold_holds(q, d, e):
            return "l=1 threshold with e"
    if p.c is not None and q >= q_threshold_main(d, m, r):
        return "large q"
    return None


def formula_row(d: int, m: int, r: int, q: int) -> dict:
    """All closed-form quantities for one (q, d, m, r)."""
    p = range_lc(d, m, r)
    h, pterm = bdg_terms(d, m, r, q)
    row = {
        "q": q, "d": d, "m": m, "r": r, "l": p.l, "c": p.c, "j": p.j,
        "H_j": h, "pi_term": pterm,
        "e_bdg": e_bdg(d, m, r, q), "e_bt": e_bt(d, m, r, q), "e_affine": e_affine(d, m, r, q),
        "threshold_main": q_threshold_main(d, m, r) if p.c is not None else None,
        "threshold_l1": None,
    }
    e = l1_exponent(m, r, d) if p.l == 1 and m >= 2 and d >= 2 else None
    if e is not None:
        row["threshold_l1"] = _fraction_text(q_threshold_l1(d, e))
    return row


def compare_formula_oracle(d: int, m: int, field: FieldSpec, r_values=None, kind: str = PROJECTIVE,
                           mode: str = EXHAUSTIVE, seed: int = 0, samples: int = 1000,
                           max_subspaces: int | None = None, workers: int | None = None,
                           cache=None, explore: bool = False) -> SweepReport:
    """Per-r comparison of the oracle against the closed forms.

    Outside q >= d+1 nothing is known in general; such grids raise
    :class:`HypothesisError` unless ``explore`` is set, in which case the rows
    are recorded and no assertion is made.
    """
    q = field.q
    top = omega_size(d, m)
    r_values = list(range(1, top + 1)) if r_values is None else list(r_values)
    for r in r_values:
        if not 1 <= r <= top:
            raise RangeError(f"r={r} outside 1..{top}")
    if q < d + 1 and not explore:
        raise HypothesisError(f"comparison needs q >= d+1 (got q={q}, d={d}); pass explore to record only")
    if kind not in (PROJECTIVE, AFFINE):
        raise ValueError(f"unknown kind {kind!r}")

    start = time.perf_counter()
    table = standard_table(d, m, field, kind)
    report = SweepReport(
        target=f"compare-{kind}",
        params={"q": q, "p": field.p, "e": field.e, "d": d, "m": m, "r": r_values, "kind": kind,
                "mode": mode, "seed": seed if mode != EXHAUSTIVE else None,
                "samples": samples if mode != EXHAUSTIVE else None},
        exhaustive=mode == EXHAUSTIVE,
    )
    for r in r_values:
        res = _oracle(d, m, r, field, kind, mode, seed, samples, max_subspaces, workers, cache)
        row = formula_row(d, m, r, q)
        row["oracle"] = res.value
        row["exhaustive"] = res.exhaustive
        witness_zeros = zero_count(res.witness, table)
        row["witness_digest"] = res.witness.digest()
        row["witness_zeros"] = witness_zeros

        if kind == AFFINE:
            regime = "affine, q>=d+1" if q >= d + 1 else None
            target = row["e_affine"]
        else:
            regime = proven_regime(d, m, r, q)
            target = row["e_bdg"]
        if q < d + 1:
            relation = "none"
            ok = witness_zeros == res.value
        elif regime is not None:
            relation = "equal" if res.exhaustive else "at_most"
            ok = (res.value == target) if res.exhaustive else (res.value <= target)
            ok = ok and witness_zeros == res.value
        else:
            relation = "at_least" if res.exhaustive else "none"
            ok = (res.value >= target or not res.exhaustive) and witness_zeros == res.value
        if kind == PROJECTIVE and res.exhaustive and q >= d + 1:
            # the lower bound holds for every r and is witnessed by the search
            ok = ok and witness_zeros >= row["e_bdg"]
        row["regime"] = regime
        row["relation"] = relation
        row["ok"] = ok
        report.rows.append(row)
        report.witnesses.append({"r": r, "value": res.value,
                                 "witness": res.witness.to_json(field, table.basis)})
        report.record(ok, {"q": q, "d": d, "m": m, "r": r, "kind": kind},
                      oracle=res.value, formula=target, relation=relation, witness_zeros=witness_zeros)
    report.wall_time = time.perf_counter() - start
    return report


def _oracle(d, m, r, field, kind, mode, seed, samples, max_subspaces, workers, cache) -> OracleResult:
    params = {"d": d, "m": m, "r": r, "p": field.p, "e": field.e, "kind": kind, "mode": mode}
    if mode != EXHAUSTIVE:
        params.update(seed=seed, samples=samples)

    def compute():
        res = max_common_zeros(d, m, r, field, kind=kind, mode=mode, seed=seed, samples=samples,
                               max_subspaces=max_subspaces, workers=workers)
        return res.to_json()

    if cache is None:
        data = compute()
    else:
        data = cache.fetch("max_common_zeros", params, compute)
    return OracleResult(data["value"], subspace_from_json(data["witness"]), data["exhaustive"],
                        data["subspaces_visited"], 0.0)
