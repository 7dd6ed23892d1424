"""Exact algebra of real step functions on [0, 1).

A step function is constant on half-open cells [t_i, t_{i+1}) with rational
breakpoints and rational values.  The trace is the Lebesgue integral, which
induces the inner product and the 2-norm used everywhere else in the package.
All arithmetic is exact; two step functions are equal iff their canonical
forms are structurally equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


class StructuralError(ValueError):
    """Malformed breakpoint/value data."""


class DomainError(ValueError):
    """Input outside an operation's domain (e.g. zero element, bad range)."""


class OrthonormalityError(ValueError):
    """A family presented as orthonormal fails the exact check."""


def as_fraction(x) -> Fraction:
    """Coerce ints, strings like '2/3', and Fractions; floats are rejected
    to keep the abelian model exact."""
    if isinstance(x, float):
        raise StructuralError("floats are not allowed in the exact model: %r" % x)
    return Fraction(x)


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)


@dataclass(frozen=True)
class StepFn:
    """Real-valued step function on [0,1), canonical form.

    breakpoints: 0 = t_0 < t_1 < ... < t_m = 1, all Fractions.
    values: value on [t_i, t_{i+1}); adjacent values always distinct.
    """

    breakpoints: tuple
    values: tuple

    @staticmethod
    def make(breakpoints: Sequence, values: Sequence) -> "StepFn":
        bps = [as_fraction(b) for b in breakpoints]
        vals = [as_fraction(v) for v in values]
        if len(bps) < 2:
            raise StructuralError("need at least two breakpoints")
        if bps[0] != 0 or bps[-1] != 1:
            raise StructuralError("breakpoints must start at 0 and end at 1")
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise StructuralError("breakpoints must be strictly increasing")
        if len(vals) != len(bps) - 1:
            raise StructuralError("values/breakpoints length mismatch")
        # merge adjacent equal values
        out_b = [bps[0]]
        out_v = []
        for b, v in zip(bps[1:], vals):
            if out_v and v == out_v[-1]:
                out_b[-1] = b
            else:
                out_v.append(v)
                out_b.append(b)
        return StepFn(tuple(out_b), tuple(out_v))

    @staticmethod
    def constant(c) -> "StepFn":
        return StepFn.make([0, 1], [c])

    @staticmethod
    def indicator(lo, hi) -> "StepFn":
        """Indicator of [lo, hi) inside [0, 1)."""
        lo, hi = as_fraction(lo), as_fraction(hi)
        if not (0 <= lo < hi <= 1):
            raise DomainError("need 0 <= lo < hi <= 1")
        bps, vals = [ZERO], []
        if lo > 0:
            bps.append(lo)
            vals.append(ZERO)
        vals.append(ONE)
        if hi < 1:
            bps.append(hi)
            vals.append(ZERO)
        bps.append(ONE)
        return StepFn.make(bps, vals)

    def is_zero(self) -> bool:
        return self.values == (ZERO,)

    def is_sign_valued(self) -> bool:
        """True iff every value is exactly +1 or -1 (self-adjoint unitary)."""
        return all(v == 1 or v == -1 for v in self.values)

    def is_indicator_valued(self) -> bool:
        """True iff every value is exactly 0 or 1 (projection)."""
        return all(v == 0 or v == 1 for v in self.values)

    def value_at(self, t) -> Fraction:
        t = as_fraction(t)
        if not (0 <= t < 1):
            raise DomainError("point outside [0,1)")
        # cells are half-open, so the value at t is the one on the cell
        # whose left endpoint is the largest breakpoint <= t
        import bisect

        i = bisect.bisect_right(self.breakpoints, t) - 1
        return self.values[min(i, len(self.values) - 1)]

    def __add__(self, other: "StepFn") -> "StepFn":
        return lin_comb([(ONE, self), (ONE, other)])

    def __sub__(self, other: "StepFn") -> "StepFn":
        return lin_comb([(ONE, self), (-ONE, other)])

    def __neg__(self) -> "StepFn":
        return StepFn(self.breakpoints, tuple(-v for v in self.values))

    def __mul__(self, other):
        if isinstance(other, StepFn):
            return pointwise_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c) -> "StepFn":
        c = as_fraction(c)
        if c == 0:
            return StepFn.constant(0)
        return StepFn(self.breakpoints, tuple(c * v for v in self.values))

    def abs(self) -> "StepFn":
        return StepFn.make(self.breakpoints, [abs(v) for v in self.values])

    def to_json(self) -> dict:
        return {
            "breakpoints": [format_fraction(b) for b in self.breakpoints],
            "values": [format_fraction(v) for v in self.values],
        }

    @staticmethod
    def from_json(obj: dict) -> "StepFn":
        try:
            return StepFn.make(obj["breakpoints"], obj["values"])
        except (KeyError, TypeError) as exc:
            raise StructuralError("bad step function record: %s" % exc) from exc

    def __repr__(self):
        cells = ", ".join(
            "%s on [%s,%s)" % (format_fraction(v), format_fraction(a), format_fraction(b))
            for v, a, b in zip(self.values, self.breakpoints, self.breakpoints[1:])
        )
        return "StepFn(%s)" % cells


def canonicalize(f: StepFn) -> StepFn:
    """Re-canonicalize (merge equal neighbours).  Idempotent; StepFn.make
    already canonicalizes, so this is mostly a re-entry point for data
    read from files."""
    return StepFn.make(f.breakpoints, f.values)


def common_refinement(fs: Sequence[StepFn]):
    """Union grid of all inputs, plus each function's values on that grid.

    Returns (breakpoints, [value vectors]); each function is pointwise
    unchanged on the refined grid.
    """
    if not fs:
        raise StructuralError("need at least one function")
    grid = sorted(set().union(*[set(f.breakpoints) for f in fs]))
    vecs = []
    for f in fs:
        vals = []
        j = 0
        for t in grid[:-1]:
            while f.breakpoints[j + 1] <= t:
                j += 1
            vals.append(f.values[j])
        vecs.append(vals)
    return grid, vecs


def lin_comb(pairs: Iterable) -> StepFn:
    """Exact linear combination sum c_i * f_i."""
    pairs = [(as_fraction(c), f) for c, f in pairs]
    if not pairs:
        return StepFn.constant(0)
    grid, vecs = common_refinement([f for _, f in pairs])
    out = [sum(c * vec[i] for (c, _), vec in zip(pairs, vecs)) for i in range(len(grid) - 1)]
    return StepFn.make(grid, out)


def pointwise_mul(f: StepFn, g: StepFn) -> StepFn:
    grid, (vf, vg) = common_refinement([f, g])
    return StepFn.make(grid, [a * b for a, b in zip(vf, vg)])


def trace(f: StepFn) -> Fraction:
    """tau(f) = integral of f over [0,1), exact."""
    return sum(
        (v * (b - a) for v, a, b in zip(f.values, f.breakpoints, f.breakpoints[1:])),
        ZERO,
    )


def inner(f: StepFn, g: StepFn) -> Fraction:
    """<f,g> = tau(fg)."""
    grid, (vf, vg) = common_refinement([f, g])
    return sum(
        (a * b * (t1 - t0) for a, b, t0, t1 in zip(vf, vg, grid, grid[1:])),
        ZERO,
    )


def norm2_sq(f: StepFn) -> Fraction:
    return inner(f, f)


def norm_inf(f: StepFn) -> Fraction:
    return max(abs(v) for v in f.values)


class OrthoFamily:
    """Ordered exactly-orthonormal family of step functions.

    Member 0 is always the constant 1 (itself a self-adjoint unitary).
    Extension verifies only the new member against the existing ones, so
    growing a family during pursuit stays quadratic overall.
    """

    def __init__(self, members: Sequence[StepFn] = (), *, _verified: bool = False):
        members = list(members) if members else [StepFn.constant(1)]
        if not _verified:
            if members[0] != StepFn.constant(1):
                raise OrthonormalityError("member 0 must be the constant 1")
            for i, e in enumerate(members):
                if norm2_sq(e) != 1:
                    raise OrthonormalityError("member %d is not a unit vector" % i)
                for j in range(i):
                    if inner(members[j], e) != 0:
                        raise OrthonormalityError(
                            "members %d and %d are not orthogonal" % (j, i)
                        )
        self.members = members

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def extended(self, new_member: StepFn) -> "OrthoFamily":
        """Family with one more member; checks the new member only."""
        if norm2_sq(new_member) != 1:
            raise OrthonormalityError("new member is not a unit vector")
        for j, e in enumerate(self.members):
            if inner(e, new_member) != 0:
                raise OrthonormalityError("new member not orthogonal to member %d" % j)
        return OrthoFamily(self.members + [new_member], _verified=True)

    def gram(self):
        """Full Gram matrix as a list of lists of Fractions."""
        n = len(self.members)
        return [[inner(self.members[i], self.members[j]) for j in range(n)] for i in range(n)]


def project_residual(a: StepFn, fam: OrthoFamily):
    """Orthogonal decomposition of a against the family.

    Returns (coeffs, residual) with a = sum coeffs[i]*e_i + residual and the
    residual exactly orthogonal to every member.
    """
    coeffs = [inner(a, e) for e in fam]
    residual = lin_comb([(ONE, a)] + [(-c, e) for c, e in zip(coeffs, fam)])
    return coeffs, residual
