"""Projection extraction with prescribed trace pairings, abelian model.

Given a step function q with 0 <= q <= 1, produce a 0/1-valued step function
p with tau(p*g) = tau(q*g) exactly for every g in a finite constraint list.
Inside each cell of the common grid the unit mass fraction q_j is placed on
the LEFT sub-interval; this matches the pairings for every g constant on the
grid, which covers all requested constraints at once.

From this we get the norming unitary: for a != 0 orthogonal to a finite
orthonormal family F, a self-adjoint unitary u = 2p - 1 with u orthogonal to
F and <a,u> = ||a||_2^2 / ||a||_inf, exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .stepfn import (
    DomainError,
    OrthoFamily,
    StepFn,
    common_refinement,
    inner,
    norm2_sq,
    norm_inf,
)


def extract_projection(q: StepFn, constraints: Sequence[StepFn] = ()) -> StepFn:
    """0/1-valued p with tau(p*g) = tau(q*g) for each constraint g.

    The constraints only contribute their breakpoints: once the grid refines
    them all, left-placement matches every pairing on that grid exactly.
    """
    if any(v < 0 or v > 1 for v in q.values):
        raise DomainError("q must satisfy 0 <= q <= 1 pointwise")
    grid, vecs = common_refinement([q] + list(constraints))
    qvals = vecs[0]
    bps = [Fraction(0)]
    vals = []
    for qv, t0, t1 in zip(qvals, grid, grid[1:]):
        if qv == 1:
            vals.append(Fraction(1))
            bps.append(t1)
        elif qv == 0:
            vals.append(Fraction(0))
            bps.append(t1)
        else:
            split = t0 + qv * (t1 - t0)
            vals.extend([Fraction(1), Fraction(0)])
            bps.extend([split, t1])
    return StepFn.make(bps, vals)


def norming_unitary(a: StepFn, fam: OrthoFamily):
    """The greedy atom: (u, alpha) with u a +-1-valued step function,
    u orthogonal to every family member, and
    alpha = <a,u> = ||a||_2^2 / ||a||_inf exactly.
    """
    if a.is_zero():
        raise DomainError("a must be nonzero")
    for j, e in enumerate(fam):
        if inner(a, e) != 0:
            raise DomainError("a is not orthogonal to family member %d" % j)
    m = norm_inf(a)
    q = (a.scale(Fraction(1, 1) / m) + StepFn.constant(1)).scale(Fraction(1, 2))
    p = extract_projection(q, list(fam) + [a])
    u = p.scale(2) - StepFn.constant(1)
    alpha = inner(a, u)
    assert u.is_sign_valued()
    assert alpha * m == norm2_sq(a)
    return u, alpha
