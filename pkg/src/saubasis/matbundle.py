"""Hermitian matrix bundles over [0,1): the noncommutative desk model.

Elements are n x n Hermitian-matrix-valued step functions with the
normalized trace tau(x) = integral of tr(X(t))/n.  Projection extraction
diagonalizes per cell and splits the cell so each eigendirection carries
an indicator of the left fraction given by its eigenvalue; this transports
the abelian construction through the eigenbasis.  Floating point replaces
exactness; every identity is certified against an explicit tolerance set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Set, Tuple

import numpy as np


class ToleranceError(RuntimeError):
    """A certified inequality failed; message names it with magnitudes."""


@dataclass(frozen=True)
class TolSet:
    tol_herm: float = 1e-10
    tol_eig: float = 1e-9
    tol_alg: float = 1e-10
    tol_match: float = 1e-8
    tol_energy: float = 1e-8
    tol_orth: float = 1e-8


DEFAULT_TOLS = TolSet()


@dataclass(frozen=True)
class MatStepFn:
    """Matrix-valued step function: exact rational grid, float cells."""

    breakpoints: tuple          # Fractions, 0 = t_0 < ... < t_m = 1
    cells: tuple                # one (n, n) complex ndarray per cell
    n: int

    @staticmethod
    def make(breakpoints: Sequence, cells: Sequence[np.ndarray], *, tol_herm=DEFAULT_TOLS.tol_herm) -> "MatStepFn":
        bps = tuple(Fraction(b) for b in breakpoints)
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must run from 0 to 1")
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(cells) != len(bps) - 1:
            raise ValueError("cells/breakpoints length mismatch")
        mats = tuple(np.asarray(c, dtype=complex) for c in cells)
        n = mats[0].shape[0]
        for m in mats:
            if m.shape != (n, n):
                raise ValueError("inconsistent matrix dimension")
            if np.max(np.abs(m - m.conj().T)) > tol_herm:
                raise ValueError("cell matrix is not Hermitian within tolerance")
        return MatStepFn(bps, mats, n)

    @staticmethod
    def constant(mat) -> "MatStepFn":
        return MatStepFn.make([0, 1], [mat])

    @staticmethod
    def identity(n: int) -> "MatStepFn":
        return MatStepFn.constant(np.eye(n))

    @staticmethod
    def from_scalar(f, n: int = 1) -> "MatStepFn":
        """Embed an abelian step function as f * I_n."""
        return MatStepFn.make(
            f.breakpoints, [float(v) * np.eye(n) for v in f.values]
        )

    def scale(self, c: float) -> "MatStepFn":
        return MatStepFn(self.breakpoints, tuple(c * m for m in self.cells), self.n)

    def __add__(self, other: "MatStepFn") -> "MatStepFn":
        grid, (va, vb) = mat_refine([self, other])
        return MatStepFn(tuple(grid), tuple(a + b for a, b in zip(va, vb)), self.n)

    def __sub__(self, other: "MatStepFn") -> "MatStepFn":
        return self + other.scale(-1.0)

    def __mul__(self, other):
        if isinstance(other, MatStepFn):
            grid, (va, vb) = mat_refine([self, other])
            return MatStepFn(tuple(grid), tuple(a @ b for a, b in zip(va, vb)), self.n)
        return self.scale(other)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "breakpoints": [
                str(b.numerator) if b.denominator == 1 else "%d/%d" % (b.numerator, b.denominator)
                for b in self.breakpoints
            ],
            "cells": [
                [[z.real.hex(), z.imag.hex()] for z in m.ravel()] for m in self.cells
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "MatStepFn":
        n = obj["n"]
        cells = [
            np.array(
                [complex(float.fromhex(re), float.fromhex(im)) for re, im in flat],
                dtype=complex,
            ).reshape(n, n)
            for flat in obj["cells"]
        ]
        return MatStepFn.make(obj["breakpoints"], cells)


def mat_refine(fs: Sequence[MatStepFn]):
    """Common grid and per-function cell lists (exact grid union)."""
    n = fs[0].n
    if any(f.n != n for f in fs):
        raise ValueError("dimension mismatch")
    grid = sorted(set().union(*[set(f.breakpoints) for f in fs]))
    out = []
    for f in fs:
        cells = []
        j = 0
        for t in grid[:-1]:
            while f.breakpoints[j + 1] <= t:
                j += 1
            cells.append(f.cells[j])
        out.append(cells)
    return grid, out


def nc_trace(x: MatStepFn) -> float:
    return float(
        sum(
            float(b - a) * np.trace(m).real / x.n
            for m, a, b in zip(x.cells, x.breakpoints, x.breakpoints[1:])
        )
    )


def nc_inner(x: MatStepFn, y: MatStepFn) -> float:
    grid, (vx, vy) = mat_refine([x, y])
    return float(
        sum(
            float(b - a) * np.trace(mx @ my).real / x.n
            for mx, my, a, b in zip(vx, vy, grid, grid[1:])
        )
    )


def nc_norm2_sq(x: MatStepFn) -> float:
    return nc_inner(x, x)


def nc_norm_inf(x: MatStepFn) -> float:
    return max(float(np.linalg.norm(m, 2)) for m in x.cells)


def _ordered_eigh(mat: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition with descending eigenvalues and a fixed phase
    convention (first component of significant modulus made real positive)."""
    vals, vecs = np.linalg.eigh(mat)
    vals = vals[::-1]
    vecs = vecs[:, ::-1]
    for i in range(vecs.shape[1]):
        col = vecs[:, i]
        idx = int(np.argmax(np.abs(col) > 1e-12))
        pivot = col[idx]
        if abs(pivot) > 0:
            vecs[:, i] = col * (pivot.conjugate() / abs(pivot))
    return vals, vecs


def nc_extract_projection(
    q: MatStepFn, constraints: Sequence[MatStepFn] = (), tols: TolSet = DEFAULT_TOLS
) -> MatStepFn:
    """Per-cell spectral split: a projection bundle p with
    tau(p g) = tau(q g) (up to tol_match) for every g constant on the
    refined grid, hence for every requested constraint."""
    grid, vecs = mat_refine([q] + list(constraints))
    qcells = vecs[0]
    n = q.n
    bps: List[Fraction] = [Fraction(0)]
    cells: List[np.ndarray] = []
    for mat, t0, t1 in zip(qcells, grid, grid[1:]):
        d, v = _ordered_eigh(mat)
        if d.max() > 1 + tols.tol_eig or d.min() < -tols.tol_eig:
            raise ToleranceError(
                "eigenvalue outside [0,1]: range [%g, %g]" % (d.min(), d.max())
            )
        d = np.clip(d, 0.0, 1.0)
        # snap near-extreme eigenvalues so round-off noise cannot spawn
        # phantom splits (exact arithmetic would produce none)
        d[d < tols.tol_eig] = 0.0
        d[d > 1.0 - tols.tol_eig] = 1.0
        length = t1 - t0
        # descending eigenvalues give nested left indicators: walking the
        # cell left to right, directions switch off in reverse order
        splits = sorted({Fraction(x) for x in d if 0.0 < x < 1.0})
        offsets = [Fraction(0)] + splits + [Fraction(1)]
        for s0, s1 in zip(offsets, offsets[1:]):
            ind = (d > float(s0)).astype(float)
            cells.append((v * ind) @ v.conj().T)
            bps.append(t0 + s1 * length)
    return MatStepFn(tuple(bps), tuple(cells), n)


def nc_norming_unitary(
    a: MatStepFn, fam: Sequence[MatStepFn], tols: TolSet = DEFAULT_TOLS
):
    """(u, alpha): sign-spectrum unitary bundle with u orthogonal to the
    family and alpha = <a,u> = ||a||_2^2/||a||_inf, all within tols."""
    n2 = nc_norm2_sq(a)
    if n2 <= 0:
        raise ValueError("a must be nonzero")
    for i, e in enumerate(fam):
        ip = nc_inner(a, e)
        if abs(ip) > tols.tol_orth:
            raise ToleranceError(
                "a not orthogonal to family member %d: <a,e> = %g" % (i, ip)
            )
    m = nc_norm_inf(a)
    ident = MatStepFn.identity(a.n)
    qfun = (a.scale(1.0 / m) + ident).scale(0.5)
    p = nc_extract_projection(qfun, list(fam) + [a], tols)
    u = p.scale(2.0) - ident
    alpha = nc_inner(a, u)
    target = n2 / m
    if abs(alpha - target) > tols.tol_match:
        raise ToleranceError(
            "norming identity violated: alpha=%g target=%g" % (alpha, target)
        )
    for i, e in enumerate(fam):
        ip = nc_inner(u, e)
        if abs(ip) > tols.tol_match:
            raise ToleranceError("u not orthogonal to member %d: %g" % (i, ip))
    err = unitary_defect(u)
    if err > tols.tol_alg:
        raise ToleranceError("U^2 - I defect %g exceeds tol_alg" % err)
    return u, alpha


def unitary_defect(u: MatStepFn) -> float:
    """max over cells of the Frobenius norm of U^2 - I."""
    eye = np.eye(u.n)
    return max(float(np.linalg.norm(m @ m - eye)) for m in u.cells)


def projection_defect(p: MatStepFn) -> float:
    """max over cells of the Frobenius norms of P^2 - P and P - P*."""
    return max(
        max(
            float(np.linalg.norm(m @ m - m)),
            float(np.linalg.norm(m - m.conj().T)),
        )
        for m in p.cells
    )


@dataclass
class NcIterationRecord:
    k: int
    alpha: float
    norm2_sq_after: float
    norm_inf_after: float


@dataclass
class NcPursuitTrace:
    norm2_sq_initial: float
    norm_inf_initial: float
    epsilon: float
    iterations: List[NcIterationRecord] = field(default_factory=list)

    def to_json(self):
        return {
            "norm2_sq_initial": self.norm2_sq_initial,
            "norm_inf_initial": self.norm_inf_initial,
            "epsilon": self.epsilon,
            "iterations": [
                {
                    "k": r.k,
                    "alpha": r.alpha,
                    "norm2_sq_after": r.norm2_sq_after,
                    "norm_inf_after": r.norm_inf_after,
                }
                for r in self.iterations
            ],
        }


def nc_project_residual(a: MatStepFn, fam: Sequence[MatStepFn]):
    coeffs = [nc_inner(a, e) for e in fam]
    residual = a
    for c, e in zip(coeffs, fam):
        residual = residual - e.scale(c)
    return coeffs, residual


def nc_pursue(
    a: MatStepFn,
    fam: Sequence[MatStepFn],
    epsilon: float,
    tols: TolSet = DEFAULT_TOLS,
    max_iterations: int = 10_000,
):
    """Greedy pursuit in the matrix model; energy identity certified per
    step within tol_energy."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    _, residual = nc_project_residual(a, fam)
    n2 = nc_norm2_sq(residual)
    trace = NcPursuitTrace(
        norm2_sq_initial=n2,
        norm_inf_initial=nc_norm_inf(residual) if n2 > 0 else 0.0,
        epsilon=float(epsilon),
    )
    units: List[MatStepFn] = []
    extended = list(fam)
    eps_sq = float(epsilon) ** 2
    k = 0
    while n2 >= eps_sq:
        k += 1
        if k > max_iterations:
            raise ToleranceError("pursuit exceeded %d iterations" % max_iterations)
        u, alpha = nc_norming_unitary(residual, extended, tols)
        residual = residual - u.scale(alpha)
        n2_new = nc_norm2_sq(residual)
        drift = abs(n2_new - (n2 - alpha * alpha))
        if drift > tols.tol_energy:
            raise ToleranceError(
                "energy identity violated at step %d: drift %g" % (k, drift)
            )
        units.append(u)
        extended.append(u)
        n2 = n2_new
        trace.iterations.append(
            NcIterationRecord(
                k=k,
                alpha=alpha,
                norm2_sq_after=n2,
                norm_inf_after=nc_norm_inf(residual),
            )
        )
    return units, trace, residual


def nc_trace_vector_check(u: MatStepFn, xs: Sequence[MatStepFn], tols: TolSet = DEFAULT_TOLS) -> dict:
    """Certify |tau(u x u) - tau(x)| <= tol_match; genuinely noncommutative
    for n >= 2."""
    results = []
    passed = True
    for i, x in enumerate(xs):
        lhs = nc_trace(u * x * u)
        rhs = nc_trace(x)
        ok = abs(lhs - rhs) <= tols.tol_match
        passed = passed and ok
        results.append({"index": i, "ok": ok, "lhs": lhs, "rhs": rhs})
    return {"passed": passed, "results": results}


def hermitian_basis(n: int) -> List[np.ndarray]:
    """Orthonormal Hermitian basis of M_n under <X,Y> = tr(XY)/n:
    scaled E_jj, (E_jk+E_kj)/sqrt(2), i(E_jk-E_kj)/sqrt(2)."""
    out = []
    s = float(np.sqrt(n))
    for j in range(n):
        m = np.zeros((n, n), dtype=complex)
        m[j, j] = s
        out.append(m)
    r = float(np.sqrt(n / 2.0))
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = r
            m[k, j] = r
            out.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = 1j * r
            m[k, j] = -1j * r
            out.append(m)
    return out


@dataclass
class NcBasisState:
    """Matrix-model analogue of BasisState; toleranced, bounded demo."""

    n: int
    family: List[MatStepFn] = field(default_factory=list)
    stage_log: List[dict] = field(default_factory=list)
    processed_pairs: Set[Tuple[int, int]] = field(default_factory=set)

    def __post_init__(self):
        if not self.family:
            self.family = [MatStepFn.identity(self.n)]

    def to_json(self):
        return {
            "model": "matrix",
            "n": self.n,
            "family": [f.to_json() for f in self.family],
            "stage_log": self.stage_log,
            "processed": sorted(self.processed_pairs),
        }

    @staticmethod
    def from_json(obj: dict) -> "NcBasisState":
        state = NcBasisState(
            n=obj["n"], family=[MatStepFn.from_json(f) for f in obj["family"]]
        )
        state.stage_log = list(obj.get("stage_log", []))
        state.processed_pairs = {(j, k) for j, k in obj.get("processed", [])}
        return state


def nc_run_stages(stages: int, n: int, tols: TolSet = DEFAULT_TOLS) -> NcBasisState:
    """Matrix-model stage driver over the tensored dense family.  Bounded
    demo: float drift accumulates, so long runs are out of scope."""
    from .basis import pair_index

    if stages < 0:
        raise ValueError("stage count must be nonnegative")
    state = NcBasisState(n=n)
    for m in range(1, stages + 1):
        j, k = pair_index(m)
        target = nc_dense_element(j - 1, n)
        eps = 2.0 ** (-k)
        units, _, residual = nc_pursue(target, state.family, eps, tols)
        state.family.extend(units)
        state.stage_log.append(
            {
                "m": m,
                "j": j,
                "k": k,
                "units_added": len(units),
                "residual_norm2_sq": nc_norm2_sq(residual),
            }
        )
        state.processed_pairs.add((j, k))
    return state


def nc_verify_basis(
    state: NcBasisState, j_max: int | None = None, k_max: int | None = None, tols: TolSet = DEFAULT_TOLS
) -> dict:
    """Toleranced version of the abelian verification report."""
    report = {"passed": True, "checks": [], "not_certified": []}
    fam = state.family
    gram_ok = True
    for i in range(len(fam)):
        for l in range(i + 1):
            g = nc_inner(fam[l], fam[i])
            want = 1.0 if l == i else 0.0
            if abs(g - want) > tols.tol_match:
                gram_ok = False
                report["passed"] = False
                report["checks"].append(
                    {"check": "gram", "ok": False, "witness": {"i": l, "j": i, "value": g}}
                )
    if gram_ok:
        report["checks"].append({"check": "gram", "ok": True})

    defect = max((unitary_defect(u) for u in fam[1:]), default=0.0)
    ok = defect <= tols.tol_alg
    report["checks"].append({"check": "unitary_defect", "ok": ok, "max_defect": defect})
    report["passed"] = report["passed"] and ok

    if j_max is not None and k_max is not None:
        window = [(j, k) for j in range(1, j_max + 1) for k in range(1, k_max + 1)]
    else:
        window = sorted(state.processed_pairs)
    for j, k in window:
        if (j, k) not in state.processed_pairs:
            report["not_certified"].append([j, k])
            continue
        target = nc_dense_element(j - 1, state.n)
        _, residual = nc_project_residual(target, fam)
        d2 = nc_norm2_sq(residual)
        bound = 4.0 ** (-k) + tols.tol_match
        ok = d2 < bound
        entry = {"check": "distance", "j": j, "k": k, "ok": ok, "dist_sq": d2}
        if not ok:
            report["passed"] = False
        report["checks"].append(entry)
    return report


def nc_dense_element(idx: int, n: int) -> MatStepFn:
    """Dense family for the bounded matrix-model demo: dyadic indicators
    tensored with an orthonormal Hermitian matrix basis.  For n = 1 this
    reduces to the abelian dense family."""
    from .basis import dense_element

    basis = hermitian_basis(n)
    dy, h = divmod(idx, len(basis))
    scalar = dense_element(dy)
    return MatStepFn.make(
        scalar.breakpoints, [float(v) * basis[h] for v in scalar.values]
    )
