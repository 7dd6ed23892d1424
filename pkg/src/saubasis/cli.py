"""Command-line interface: build, verify, pursue, bound, show.

Artifacts are JSON files with rationals as "p/q" strings; identical
configurations produce byte-identical abelian outputs.  Logging goes to
stderr, artifacts to files or stdout.

Exit codes: 0 pass, 1 verification failure, 2 domain/ceiling error,
3 I/O error, 4 parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .basis import BasisState, run_stages, verify_basis
from .matbundle import (
    NcBasisState,
    TolSet,
    ToleranceError,
    nc_run_stages,
    nc_verify_basis,
)
from .pursuit import (
    DEFAULT_CELL_CEILING,
    CellCeilingError,
    iteration_bound,
    pursue,
)
from .stepfn import (
    DomainError,
    OrthoFamily,
    OrthonormalityError,
    StepFn,
    StructuralError,
    format_fraction,
    norm2_sq,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_PARSE = 4


def _log(msg: str):
    print(msg, file=sys.stderr)


def _dump(obj, path: str | None) -> int:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        _log("cannot write %s: %s" % (path, exc))
        return EXIT_IO
    return EXIT_OK


def _load(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        _log("cannot read %s: %s" % (path, exc))
        return None, EXIT_IO
    try:
        return json.loads(text), EXIT_OK
    except json.JSONDecodeError as exc:
        _log("cannot parse %s: %s" % (path, exc))
        return None, EXIT_PARSE


def _parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def cmd_build(args) -> int:
    if args.model == "abelian":
        try:
            state = run_stages(args.stages, cell_ceiling=args.cell_ceiling)
        except CellCeilingError as exc:
            _log("ceiling abort: %s" % exc)
            return EXIT_DOMAIN
        size = 1
        for rec in state.stage_log:
            size += rec.units_added
            _log(
                "stage %d (j=%d,k=%d): +%d units, residual norm2_sq=%s, family=%d"
                % (rec.m, rec.j, rec.k, rec.units_added,
                   format_fraction(rec.residual_norm2_sq), size)
            )
        return _dump(state.to_json(), args.out)
    try:
        state = nc_run_stages(args.stages, args.n, _tols(args))
    except ToleranceError as exc:
        _log("tolerance abort: %s" % exc)
        return EXIT_DOMAIN
    size = 1
    for rec in state.stage_log:
        size += rec["units_added"]
        _log(
            "stage %d (j=%d,k=%d): +%d units, residual norm2_sq=%.3e, family=%d"
            % (rec["m"], rec["j"], rec["k"], rec["units_added"],
               rec["residual_norm2_sq"], size)
        )
    return _dump(state.to_json(), args.out)


def cmd_verify(args) -> int:
    obj, code = _load(args.path)
    if code != EXIT_OK:
        return code
    try:
        if obj.get("model") == "matrix":
            state = NcBasisState.from_json(obj)
            report = nc_verify_basis(state, args.j_max, args.k_max, _tols(args))
        else:
            state = BasisState.from_json(obj)
            report = verify_basis(state, args.j_max, args.k_max)
    except (StructuralError, OrthonormalityError, ValueError, KeyError) as exc:
        # a family that fails exact orthonormality on load is a failed
        # verification, not a crash
        report = {"passed": False, "checks": [{"check": "load", "ok": False, "witness": str(exc)}], "not_certified": []}
    _dump(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_VERIFY_FAIL


def cmd_pursue(args) -> int:
    if not args.target and not args.target_file:
        _log("need --target or --target-file")
        return EXIT_DOMAIN
    if args.target_file:
        obj, code = _load(args.target_file)
        if code != EXIT_OK:
            return code
    else:
        try:
            obj = json.loads(args.target)
        except json.JSONDecodeError as exc:
            _log("cannot parse target: %s" % exc)
            return EXIT_PARSE
    try:
        target = StepFn.from_json(obj)
    except StructuralError as exc:
        _log("bad target: %s" % exc)
        return EXIT_PARSE

    fam = OrthoFamily()
    if args.family:
        fobj, code = _load(args.family)
        if code != EXIT_OK:
            return code
        try:
            fam = BasisState.from_json(fobj).family
        except (StructuralError, OrthonormalityError, KeyError) as exc:
            _log("bad family file: %s" % exc)
            return EXIT_PARSE

    try:
        eps = _parse_fraction(args.epsilon)
        units, trace, residual = pursue(target, fam, eps, cell_ceiling=args.cell_ceiling)
    except (DomainError, ValueError) as exc:
        _log("domain error: %s" % exc)
        return EXIT_DOMAIN
    except CellCeilingError as exc:
        _log("ceiling abort: %s" % exc)
        return EXIT_DOMAIN

    _log("iterations: %d, final residual norm2_sq: %s"
         % (len(units), format_fraction(norm2_sq(residual))))
    if args.csv:
        out = ["k,alpha,norm2_sq_after,norm_inf_after"]
        for rec in trace.iterations:
            out.append("%d,%s,%s,%s" % (
                rec.k, format_fraction(rec.alpha),
                format_fraction(rec.norm2_sq_after),
                format_fraction(rec.norm_inf_after)))
        try:
            with open(args.csv, "w") as fh:
                fh.write("\n".join(out) + "\n")
        except OSError as exc:
            _log("cannot write %s: %s" % (args.csv, exc))
            return EXIT_IO
    payload = {
        "trace": trace.to_json(),
        "units": [u.to_json() for u in units],
        "residual": residual.to_json(),
    }
    return _dump(payload, args.out)


def cmd_bound(args) -> int:
    try:
        n = iteration_bound(
            _parse_fraction(args.norm2_sq),
            _parse_fraction(args.norm_inf),
            _parse_fraction(args.epsilon),
        )
    except (DomainError, ValueError) as exc:
        _log("domain error: %s" % exc)
        return EXIT_DOMAIN
    if n.bit_length() > 64:
        # too large to print in full; report the order of magnitude
        import math

        print("~10^%d" % int(n.bit_length() * math.log10(2)))
    else:
        print(n)
    return EXIT_OK


def cmd_show(args) -> int:
    obj, code = _load(args.path)
    if code != EXIT_OK:
        return code
    try:
        if obj.get("model") == "matrix":
            state = NcBasisState.from_json(obj)
            member = state.family[args.member]
            print("matrix bundle, n=%d, %d cells" % (state.n, len(member.cells)))
            for mat, a, b in zip(member.cells, member.breakpoints, member.breakpoints[1:]):
                print("on [%s, %s):" % (a, b))
                print(mat)
        else:
            state = BasisState.from_json(obj)
            member = state.family[args.member]
            print(member)
    except (IndexError, KeyError, StructuralError, OrthonormalityError) as exc:
        _log("cannot show member: %s" % exc)
        return EXIT_PARSE
    return EXIT_OK


def _tols(args) -> TolSet:
    kw = {}
    for name in ("tol_eig", "tol_alg", "tol_match", "tol_energy"):
        v = getattr(args, name, None)
        if v is not None:
            if v <= 0:
                raise SystemExit(EXIT_DOMAIN)
            kw[name] = v
    return TolSet(**kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saubasis",
        description="Build and verify orthonormal families of self-adjoint "
        "unitary step functions, with machine-checkable certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="run the stage driver and write a basis file")
    p.add_argument("--model", choices=["abelian", "matrix"], default="abelian")
    p.add_argument("--n", type=int, default=1, help="matrix dimension (matrix model, 1..8)")
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--cell-ceiling", type=int, default=DEFAULT_CELL_CEILING)
    p.add_argument("--out", default="-")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="verify a basis file")
    p.add_argument("path")
    p.add_argument("--j-max", type=int, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--out", default="-")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pursue", help="run greedy pursuit on a target step function")
    p.add_argument("--target", help="inline JSON {breakpoints, values}")
    p.add_argument("--target-file", help="file with the target step function")
    p.add_argument("--family", help="basis file providing the orthonormal family")
    p.add_argument("--epsilon", required=True, help='rational like "1/4"')
    p.add_argument("--cell-ceiling", type=int, default=DEFAULT_CELL_CEILING)
    p.add_argument("--csv", help="write the residual decay table as CSV")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_pursue)

    p = sub.add_parser("bound", help="worst-case iteration count for pursuit")
    p.add_argument("norm2_sq")
    p.add_argument("norm_inf")
    p.add_argument("epsilon")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("show", help="pretty-print one family member of a basis file")
    p.add_argument("path")
    p.add_argument("--member", type=int, default=0)
    p.set_defaults(func=cmd_show)
    return parser


def _add_tol_flags(parser):
    for name in ("tol-eig", "tol-alg", "tol-match", "tol-energy"):
        parser.add_argument("--" + name, type=float, default=None)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "build":
        if args.stages < 0:
            _log("stages must be nonnegative")
            return EXIT_DOMAIN
        if args.model == "matrix" and not (1 <= args.n <= 8):
            _log("matrix dimension must be in 1..8")
            return EXIT_DOMAIN
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
