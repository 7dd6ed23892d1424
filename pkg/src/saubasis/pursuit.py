"""Greedy pursuit over norming unitaries.

Repeatedly peel the norming unitary off the residual until its squared
2-norm drops below epsilon^2.  Each step removes exactly alpha_k^2 of
energy, so termination is guaranteed; the iteration_bound function gives the
pessimistic worst-case count implied by the divergence of
sum eps^4 / (||a0||_inf + sqrt(k-1) ||a0||_2)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

from .stepfn import (
    DomainError,
    OrthoFamily,
    StepFn,
    as_fraction,
    format_fraction,
    norm2_sq,
    norm_inf,
    project_residual,
)
from .lyapunov import norming_unitary

DEFAULT_CELL_CEILING = 200_000


class CellCeilingError(RuntimeError):
    """Partition grew past the configured ceiling; carries diagnostics."""

    def __init__(self, cells: int, ceiling: int, iteration: int):
        self.cells = cells
        self.ceiling = ceiling
        self.iteration = iteration
        super().__init__(
            "residual partition has %d cells (ceiling %d) at iteration %d"
            % (cells, ceiling, iteration)
        )


@dataclass
class IterationRecord:
    k: int
    alpha: Fraction
    unit: StepFn
    norm2_sq_after: Fraction
    norm_inf_after: Fraction

    def to_json(self):
        return {
            "k": self.k,
            "alpha": format_fraction(self.alpha),
            "unit": self.unit.to_json(),
            "norm2_sq_after": format_fraction(self.norm2_sq_after),
            "norm_inf_after": format_fraction(self.norm_inf_after),
        }


@dataclass
class PursuitTrace:
    """Per-iteration certificate of the energy identity and norm growth."""

    norm2_sq_initial: Fraction
    norm_inf_initial: Fraction
    epsilon: Fraction
    iterations: List[IterationRecord] = field(default_factory=list)

    def alphas(self):
        return [rec.alpha for rec in self.iterations]

    def to_json(self):
        return {
            "norm2_sq_initial": format_fraction(self.norm2_sq_initial),
            "norm_inf_initial": format_fraction(self.norm_inf_initial),
            "epsilon": format_fraction(self.epsilon),
            "iterations": [rec.to_json() for rec in self.iterations],
        }


def pursue(
    a: StepFn,
    fam: OrthoFamily,
    epsilon,
    cell_ceiling: int = DEFAULT_CELL_CEILING,
):
    """Peel pairwise-orthogonal +-1-valued unitaries off a until the
    residual satisfies ||residual||_2 < epsilon.

    Returns (units, trace, residual).  Exact guarantees:
    a = P_fam a + sum alpha_k u_k + residual, all u_k mutually orthogonal
    and orthogonal to fam, norm2_sq(residual) < epsilon^2.
    """
    epsilon = as_fraction(epsilon)
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    eps_sq = epsilon * epsilon

    _, residual = project_residual(a, fam)
    trace = PursuitTrace(
        norm2_sq_initial=norm2_sq(residual),
        norm_inf_initial=norm_inf(residual) if not residual.is_zero() else Fraction(0),
        epsilon=epsilon,
    )
    units: List[StepFn] = []
    extended = fam
    k = 0
    while norm2_sq(residual) >= eps_sq:
        k += 1
        u, alpha = norming_unitary(residual, extended)
        residual = residual - alpha * u
        cells = len(residual.values)
        if cells > cell_ceiling:
            raise CellCeilingError(cells, cell_ceiling, k)
        units.append(u)
        extended = extended.extended(u)
        trace.iterations.append(
            IterationRecord(
                k=k,
                alpha=alpha,
                unit=u,
                norm2_sq_after=norm2_sq(residual),
                norm_inf_after=norm_inf(residual) if not residual.is_zero() else Fraction(0),
            )
        )
    return units, trace, residual


def iteration_bound(norm2_sq_a0, norm_inf_a0, epsilon) -> int:
    """Worst-case iteration count from the divergent minorant series.

    Minimal N with sum_{k=1..N} eps^4/(||a0||_inf + sqrt(k-1)||a0||_2)^2
    exceeding ||a0||_2^2, times a 1.1 safety factor.  Monitoring value only;
    pursue terminates by exact energy accounting regardless.  Computed in
    floating point; for tiny epsilon the minimal N is found by inverting the
    integral minorant of the partial sums instead of direct summation.
    """
    l2sq = float(norm2_sq_a0)
    c = float(norm_inf_a0)
    eps = float(epsilon)
    if l2sq <= 0 or c <= 0 or eps <= 0:
        raise DomainError("all arguments must be positive")
    if eps * eps > l2sq:
        return 0
    d = math.sqrt(l2sq)
    e4 = eps ** 4
    limit = 100_000_000

    # The exponent in the integral minorant tells us the scale of N up
    # front; only sum directly when the answer is within reach.
    y = l2sq * d * d / (2 * e4) + 1
    if y < math.log(1 + d * math.sqrt(limit) / c):
        import numpy as np

        total = 0.0
        start = 0
        chunk = 1 << 16
        while True:
            ks = np.arange(start, start + chunk, dtype=np.float64)
            cum = total + np.cumsum(e4 / (c + np.sqrt(ks) * d) ** 2)
            hit = int(np.searchsorted(cum, l2sq, side="right"))
            if hit < len(ks):
                return int(math.ceil(1.1 * (start + hit + 1)))
            total = float(cum[-1])
            start += len(ks)
            chunk = min(chunk * 4, 1 << 24)

    # integral minorant: sum_{k<=N} >= int_0^N e4/(c + d sqrt(t))^2 dt
    #                  = (2 e4/d^2) [ln(1 + d sqrt(N)/c) - 1 + c/(c + d sqrt(N))]
    # Solve ln(1 + d sqrt(N)/c) - 1 = l2sq d^2 / (2 e4); the dropped term is
    # positive, so the resulting N still makes the true sum exceed l2sq.
    # Rounding up to a power of ten keeps the overestimate cheap to build
    # even when N has millions of digits.
    log10_n = 2 * (math.log10(c / d) + y / math.log(10))
    if log10_n < 15:
        return int(math.ceil(1.1 * ((math.exp(y) - 1) * c / d) ** 2))
    # saturate: beyond 10^9000 the exact power is unrepresentable in any
    # useful sense and still dominates every physically completable run
    return 10 ** min(int(math.ceil(log10_n)), 9000)
