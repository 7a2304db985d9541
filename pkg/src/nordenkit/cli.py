"""Command-line interface.

Exit codes: 0 when every check passes, 1 when a verification fails, 2 for
usage errors and malformed input files.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import connection as conn
from .conformal import (
    ConformalShift,
    conformal_invariants_suite,
    kahler_target_shift,
    lemma_rbar_check,
    nabla0_conformal_check,
)
from .curvature import curvature, curvature_like_check, kahler_check
from .example import build_example
from .manifold import FrameManifold, SpecError, load_spec, validate
from .norden import classify, norden_data
from .properties import operator_identities
from .report import VerificationReport
from .tensor import NordenError, Tolerance, default_tolerance, nonzero_components
from .verify import ExampleParams, perturbed_example, verify_paper

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    tol = default_tolerance()
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("manifold")
    src.add_argument("--input", help="manifold spec file (JSON); default: the example Lie group")
    src.add_argument("--lambda", dest="lam", type=float, default=1.0, help="example parameter lambda")
    src.add_argument("--mu", type=float, default=2.0, help="example parameter mu")
    out = common.add_argument_group("output")
    out.add_argument("--format", choices=("text", "json"), default="text")
    out.add_argument("--full", action="store_true", help="print every tensor component, not only nonzero ones")
    out.add_argument("--tol-abs", type=float, default=tol.absolute)
    out.add_argument("--tol-rel", type=float, default=tol.relative)
    out.add_argument("--seed", type=int, default=0)

    family = argparse.ArgumentParser(add_help=False)
    family.add_argument("--family", choices=sorted(conn.FAMILY_ARITY), default="levi-civita")
    family.add_argument("--params", type=float, nargs="*", default=[], help="family parameters")

    parser = argparse.ArgumentParser(prog="nordenkit", description="Norden manifold toolkit on Lie group frames")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check the defining invariants of the manifold")
    sub.add_parser("classify", parents=[common], help="W0..W3 and W1^0 membership")
    sub.add_parser("connection", parents=[common, family], help="coefficients of a connection family")
    sub.add_parser("curvature", parents=[common, family], help="curvature of a connection family")
    p = sub.add_parser("conformal", parents=[common], help="conformal transformation checks")
    p.add_argument("--sigma", type=float, nargs="*", help="closed 1-form sigma; default theta*/2n")
    p.add_argument("--factor", type=float, default=None, help="conformal factor c > 0")
    p.add_argument("--params", type=float, nargs="*", default=[0.0] * 8, help="lambda_1..lambda_8")
    p = sub.add_parser("verify-paper", parents=[common], help="full verification of the example")
    p.add_argument("--trials", type=int, default=20, help="number of random connection parameter vectors")
    p.add_argument("--perturb-g11", type=float, default=0.0, help="add this to g_11 before checking")
    p = sub.add_parser("properties", parents=[common], help="seeded operator identity checks")
    p.add_argument("--trials", type=int, default=100)
    return parser


def _tolerance(args) -> Tolerance:
    try:
        return Tolerance(args.tol_abs, args.tol_rel)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _manifold(args) -> tuple[FrameManifold, dict | None]:
    if args.input:
        return load_spec(args.input)
    return build_example(args.lam, args.mu), None


def _require_valid(m: FrameManifold, tol: Tolerance) -> VerificationReport:
    return validate(m, tol)


def _components(a: np.ndarray, full: bool, threshold: float) -> list:
    if full:
        return [[*(int(i) + 1 for i in idx), float(v)] for idx, v in np.ndenumerate(a)]
    return [[*idx, float(v)] for idx, v in nonzero_components(a, threshold)]


def _emit(args, rep: VerificationReport, extra: dict | None = None) -> None:
    if args.format == "json":
        doc = rep.to_dict()
        if extra:
            doc.update(extra)
        print(json.dumps(doc, indent=2, sort_keys=True))
        return
    print(rep.to_text())
    for key, rows in (extra or {}).items():
        if isinstance(rows, list) and rows and isinstance(rows[0], list):
            print(f"# {key} ({len(rows)} entries, indices one-based)")
            for row in rows:
                print("  " + " ".join(str(x) for x in row[:-1]) + f"  {row[-1]:.12g}")
        else:
            print(f"# {key}: {rows}")


def _connection(args, m, nd, lc, tol):
    params = tuple(args.params)
    arity = conn.FAMILY_ARITY[args.family]
    if len(params) != arity:
        raise UsageError(f"--params: family {args.family!r} takes {arity} values, got {len(params)}")
    c = conn.build_family(m, nd, args.family, params, lc, tol)
    return c


def _family_property(rep: VerificationReport, m, c, family: str, tol: Tolerance) -> None:
    """Re-assert the defining property of the family and record the residual."""
    checks = [("metric", conn.is_metric)] if family == "levi-civita" else [("complex", conn.is_complex)]
    if family in ("levi-civita", "symmetric", "yano"):
        checks.append(("symmetric", conn.is_symmetric))
    if family in ("natural", "zero", "canonical"):
        checks.append(("natural", conn.is_natural))
    scale = max(1.0, float(np.abs(c.gamma).max()))
    for what, fn in checks:
        res = fn(m, c, tol).residual
        rep.add(f"{family} connection is {what}", res, tol.scaled_bound(scale),
                note="; ".join(c.warnings))


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _dispatch(args)
    except (SpecError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NordenError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


def _dispatch(args) -> int:
    tol = _tolerance(args)
    cmd = args.command

    if cmd == "properties":
        rep = VerificationReport(title="operator identities", seed=args.seed)
        for n in (2, 3):
            rep.extend(operator_identities(n, args.trials, args.seed, tol))
        _emit(args, rep)
        return EXIT_OK if rep.passed else EXIT_FAIL

    if cmd == "verify-paper":
        if args.input:
            raise UsageError("--input: verify-paper always uses the example Lie group")
        p = ExampleParams(args.lam, args.mu, args.seed)
        m = perturbed_example(p, args.perturb_g11) if args.perturb_g11 else None
        rep = verify_paper(p, args.trials, tol, manifold=m)
        _emit(args, rep)
        return EXIT_OK if rep.passed else EXIT_FAIL

    m, conformal_block = _manifold(args)
    rep = _require_valid(m, tol)
    rep.title, rep.seed = f"{cmd}: {m.name or args.input}", args.seed
    if cmd == "validate" or not rep.passed:
        _emit(args, rep)
        return EXIT_OK if rep.passed else EXIT_FAIL

    lc = conn.levi_civita(m)
    nd = norden_data(m, lc, tol)

    if cmd == "classify":
        verdict = classify(m, nd, lc, tol)
        rep.extend(verdict.to_report(tol, max(1.0, float(np.abs(nd.F).max()))))
        details = {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v)) for k, v in verdict.details.items()}
        _emit(args, rep, {"details": details})
        # class membership is a result, not a verification: only validation decides the exit code
        return EXIT_OK

    if cmd == "connection":
        c = _connection(args, m, nd, lc, tol)
        _family_property(rep, m, c, args.family, tol)
        rows = _components(c.gamma, args.full, tol.absolute)
        _emit(args, rep, {"gamma[k,i,j] (nabla_{e_i} e_j = gamma e_k)": rows})
        return EXIT_OK if rep.passed else EXIT_FAIL

    if cmd == "curvature":
        c = _connection(args, m, nd, lc, tol)
        _family_property(rep, m, c, args.family, tol)
        cd = curvature(m, c)
        scale = max(1.0, float(np.abs(cd.R04).max()))
        like = curvature_like_check(cd.R04, tol)
        rep.add("antisymmetry (1,2) and first Bianchi", max(like.parts["antisymmetry (1,2)"],
                                                             like.parts["first Bianchi"]),
                tol.scaled_bound(scale))
        kc = kahler_check(m, cd.R04, tol)
        extra = {
            "R[x,y,z,u]": _components(cd.R04, args.full, tol.absolute),
            "tau": float(cd.tau),
            "tau*": float(cd.tau_star),
            "Kaehler-like residual": float(kc.residual),
        }
        _emit(args, rep, extra)
        return EXIT_OK if rep.passed else EXIT_FAIL

    if cmd == "conformal":
        if len(args.params) != 8:
            raise UsageError(f"--params: expected 8 values lambda_1..lambda_8, got {len(args.params)}")
        p = conn.ConnectionParams(tuple(args.params))
        sigma = args.sigma
        factor = args.factor
        if sigma is None and conformal_block is not None:
            sigma = conformal_block["sigma"]
            factor = conformal_block.get("factor", 1.0) if factor is None else factor
        factor = 1.0 if factor is None else factor
        if factor <= 0:
            raise UsageError("--factor: must be positive")
        if sigma is None:
            shift = kahler_target_shift(m, nd, factor)
        else:
            if len(sigma) != m.dim:
                raise UsageError(f"--sigma: expected {m.dim} values, got {len(sigma)}")
            shift = ConformalShift(np.asarray(sigma, dtype=float), factor)
        closed = shift.is_closed(m, tol)
        rep.add("sigma closed", float(np.abs(shift.d_sigma(m)).max()), tol.scaled_bound(1.0),
                expected_failure=sigma is not None and not closed)
        plh = ConformalShift(shift.sigma @ m.J, factor)
        pluriharmonic = plh.is_closed(m, tol)
        if sigma is None:
            rep.add("sigma o J closed (pluriharmonic)", float(np.abs(plh.d_sigma(m)).max()), tol.scaled_bound(1.0))
        if closed:
            rep.extend(lemma_rbar_check(m, lc, shift, tol))
        rep.extend(nabla0_conformal_check(m, nd, shift, tol, lc))
        if sigma is None:
            rep.extend(conformal_invariants_suite(m, nd, p, shift, tol, lc))
        _emit(args, rep, {"sigma": [float(v) for v in shift.sigma], "factor": float(factor),
                         "sigma closed": bool(closed), "sigma o J closed": bool(pluriharmonic)})
        return EXIT_OK if rep.passed else EXIT_FAIL

    raise UsageError(f"unknown command {cmd!r}")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
