"""Stage driver growing an orthonormal family of sign-valued unitaries.

Enumerates (dense element index, precision level) pairs along Cantor
anti-diagonals; at each stage, pursuit pushes the distance from the dense
element to the current span below 2^-k.  The dense family is the dyadic
interval indicators in level order, whose closed real span is everything
the model can approximate.  All certificates are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Set, Tuple

from .stepfn import (
    OrthoFamily,
    StepFn,
    format_fraction,
    inner,
    norm2_sq,
    project_residual,
)
from .pursuit import DEFAULT_CELL_CEILING, pursue


def dense_element(j: int) -> StepFn:
    """j-th dyadic interval indicator in level order.

    j=0 is the constant 1; then level l >= 1 contributes the 2^l
    indicators of [i/2^l, (i+1)/2^l) for i = 0..2^l-1.
    """
    if j < 0:
        raise ValueError("index must be nonnegative")
    if j == 0:
        return StepFn.constant(1)
    level = (j + 1).bit_length() - 1
    offset = j - (2 ** level - 1)
    width = Fraction(1, 2 ** level)
    return StepFn.indicator(offset * width, (offset + 1) * width)


def pair_index(m: int) -> Tuple[int, int]:
    """m-th pair (j, k) of positive integers, anti-diagonal order:
    (1,1), (1,2), (2,1), (1,3), (2,2), (3,1), ...
    """
    if m < 1:
        raise ValueError("stage index must be >= 1")
    s = 2
    rest = m - 1
    while rest >= s - 1:
        rest -= s - 1
        s += 1
    j = rest + 1
    return j, s - j


@dataclass
class StageRecord:
    m: int
    j: int
    k: int
    units_added: int
    residual_norm2_sq: Fraction

    def to_json(self):
        return {
            "m": self.m,
            "j": self.j,
            "k": self.k,
            "units_added": self.units_added,
            "residual_norm2_sq": format_fraction(self.residual_norm2_sq),
        }


@dataclass
class BasisState:
    """Orthonormal family plus the log of which (j,k) pairs it certifies."""

    family: OrthoFamily = field(default_factory=OrthoFamily)
    stage_log: List[StageRecord] = field(default_factory=list)
    processed_pairs: Set[Tuple[int, int]] = field(default_factory=set)

    def to_json(self):
        return {
            "model": "abelian",
            "family": [f.to_json() for f in self.family],
            "stage_log": [rec.to_json() for rec in self.stage_log],
            "processed": sorted(self.processed_pairs),
        }

    @staticmethod
    def from_json(obj: dict) -> "BasisState":
        fam = OrthoFamily([StepFn.from_json(f) for f in obj["family"]])
        state = BasisState(family=fam)
        for rec in obj.get("stage_log", []):
            state.stage_log.append(
                StageRecord(
                    m=rec["m"],
                    j=rec["j"],
                    k=rec["k"],
                    units_added=rec["units_added"],
                    residual_norm2_sq=Fraction(rec["residual_norm2_sq"]),
                )
            )
        state.processed_pairs = {(j, k) for j, k in obj.get("processed", [])}
        return state


def run_stages(
    stages: int,
    cell_ceiling: int = DEFAULT_CELL_CEILING,
    state: BasisState | None = None,
) -> BasisState:
    """Run the given number of stages, growing the family by pursuit.

    Stage m handles pair (j, k) = pair_index(m): the dense element with
    0-based index j-1 is pushed within 2^-k of the span.
    """
    if stages < 0:
        raise ValueError("stage count must be nonnegative")
    state = state or BasisState()
    start = len(state.stage_log)
    for m in range(start + 1, start + stages + 1):
        j, k = pair_index(m)
        target = dense_element(j - 1)
        eps = Fraction(1, 2 ** k)
        units, _, residual = pursue(target, state.family, eps, cell_ceiling=cell_ceiling)
        for u in units:
            state.family = state.family.extended(u)
        state.stage_log.append(
            StageRecord(
                m=m,
                j=j,
                k=k,
                units_added=len(units),
                residual_norm2_sq=norm2_sq(residual),
            )
        )
        state.processed_pairs.add((j, k))
    return state


def verify_basis(state: BasisState, j_max: int | None = None, k_max: int | None = None) -> dict:
    """Exact verification report for a basis state.

    Checks: (i) Gram matrix of the family is exactly the identity;
    (ii) every non-constant member is +-1-valued; (iii) for each processed
    (j,k) within the requested window, the exact squared distance of the
    dense element to the span is below 2^-2k.  Failures carry witnesses;
    unprocessed pairs in the window are listed as not certified.
    """
    report = {"passed": True, "checks": [], "not_certified": []}

    members = list(state.family)
    for i, e in enumerate(members):
        for l in range(i + 1):
            g = inner(members[l], e)
            want = Fraction(1) if l == i else Fraction(0)
            if g != want:
                report["passed"] = False
                report["checks"].append(
                    {
                        "check": "gram",
                        "ok": False,
                        "witness": {"i": l, "j": i, "value": format_fraction(g)},
                    }
                )
    if not any(c["check"] == "gram" for c in report["checks"]):
        report["checks"].append({"check": "gram", "ok": True})

    sign_ok = True
    if members and members[0] != StepFn.constant(1):
        sign_ok = False
        report["passed"] = False
        report["checks"].append(
            {"check": "sign_valued", "ok": False, "witness": {"member": 0, "reason": "member 0 is not the constant 1"}}
        )
    for i, e in enumerate(members[1:], start=1):
        for cell, v in enumerate(e.values):
            if v != 1 and v != -1:
                sign_ok = False
                report["passed"] = False
                report["checks"].append(
                    {
                        "check": "sign_valued",
                        "ok": False,
                        "witness": {"member": i, "cell": cell, "value": format_fraction(v)},
                    }
                )
    if sign_ok:
        report["checks"].append({"check": "sign_valued", "ok": True})

    if j_max is not None and k_max is not None:
        window = [(j, k) for j in range(1, j_max + 1) for k in range(1, k_max + 1)]
    else:
        window = sorted(state.processed_pairs)
    for j, k in window:
        if (j, k) not in state.processed_pairs:
            report["not_certified"].append([j, k])
            continue
        target = dense_element(j - 1)
        _, residual = project_residual(target, state.family)
        d2 = norm2_sq(residual)
        bound = Fraction(1, 4 ** k)
        ok = d2 < bound
        entry = {"check": "distance", "j": j, "k": k, "ok": ok}
        if not ok:
            report["passed"] = False
            entry["witness"] = {
                "dist_sq": format_fraction(d2),
                "bound": format_fraction(bound),
            }
        report["checks"].append(entry)
    return report


def trace_vector_certificate(u: StepFn, xs: List[StepFn]) -> dict:
    """Certify tau(u x u) = tau(x) for each x; u must be +-1-valued.

    Pointwise trivial in the abelian model, but certified by computation
    rather than assumed.
    """
    from .stepfn import pointwise_mul, trace

    if not u.is_sign_valued():
        raise ValueError("u must be +-1-valued")
    results = []
    passed = True
    for i, x in enumerate(xs):
        lhs = trace(pointwise_mul(pointwise_mul(u, x), u))
        rhs = trace(x)
        ok = lhs == rhs
        passed = passed and ok
        results.append(
            {"index": i, "ok": ok, "lhs": format_fraction(lhs), "rhs": format_fraction(rhs)}
        )
    return {"passed": passed, "results": results}
