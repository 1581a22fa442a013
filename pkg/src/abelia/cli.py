"""Command-line surface: JSON in, one JSON document out.

Exit codes: 0 success/verified, 1 verification found a violation,
2 malformed input, 3 budget or tolerance failure.  stdout carries the JSON
contract; stderr is human-oriented diagnostics only.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from mpmath import mp

from . import abelian, elliptic, fuzz, heights, serialize, siegel
from .errors import (BoundViolation, MalformedInput, NoRationalTwoTorsion,
                     NotAHomomorphism, NotAnEndomorphism, ReductionDiverged,
                     RootFindingFailure, SearchBudgetExceeded,
                     ToleranceUnreachable)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_MALFORMED = 2
EXIT_BUDGET = 3


def _read_input(args):
    if getattr(args, "infile", None):
        with open(args.infile, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    if not text.strip():
        return {}
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedInput(f"invalid JSON input: {e}") from None


def _emit(obj):
    sys.stdout.write(serialize.dumps(obj) + "\n")


def _decode_scalar(obj, prec):
    if "rational" in obj:
        return heights.AlgebraicScalar.from_rational(
            serialize.dec_fraction(obj["rational"]))
    if "minpoly" in obj:
        root = serialize.dec_complex(obj["root"], prec) if "root" in obj else 0
        return heights.AlgebraicScalar.from_minpoly(
            serialize.dec_polynomial(obj["minpoly"]), root, prec)
    raise MalformedInput("scalar needs 'rational' or 'minpoly'+'root'")


def _decode_endo(data, prec):
    av = serialize.dec_av(data["av"] if "av" in data else data, prec)
    rho = serialize.dec_int_matrix(data["rho_r"])
    return av, abelian.validate_endomorphism(av, rho)


# --- subcommand bodies ------------------------------------------------------

def cmd_heights_matrix(args, data):
    M = serialize.dec_rational_matrix(data["matrix"] if "matrix" in data else data)
    _emit({"h_aff": serialize.enc_fraction(heights.h_aff(M)),
           "h_max": serialize.enc_fraction(heights.h_max(M))})
    return EXIT_OK


def cmd_heights_hd(args, data):
    a = _decode_scalar(data["scalar"], args.prec)
    d = int(data.get("d", args.d or 1))
    val = heights.h_d(a, d, budget=args.budget)
    _emit({"h_d": "inf" if val == float("inf") else serialize.enc_int(val)})
    return EXIT_OK


def cmd_siegel_reduce(args, data):
    tau = serialize.dec_siegel_point(data["tau"] if "tau" in data else data,
                                     args.prec)
    Z, sigma = siegel.reduce(tau, max_steps=args.steps)
    _emit({"Z": serialize.enc_siegel_point(Z),
           "sigma": serialize.enc_symplectic(sigma)})
    return EXIT_OK


def cmd_siegel_check(args, data):
    Z = serialize.dec_siegel_point(data["Z"] if "Z" in data else data, args.prec)
    cosets = None
    if "cosets" in data:
        cosets = [serialize.dec_symplectic(c) for c in data["cosets"]]
    rep = siegel.membership(Z, cosets, tol=args.tol or 1e-12)
    ok = rep.re_bound_ok and rep.minkowski_ok and rep.boundary_ok
    _emit({"re_bound_ok": rep.re_bound_ok, "minkowski_ok": rep.minkowski_ok,
           "boundary_ok": rep.boundary_ok,
           "worst_margin": serialize.enc_real(rep.worst_margin, 53),
           "checked_cosets": rep.checked_cosets})
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_av_validate(args, data):
    av = serialize.dec_av(data["av"] if "av" in data else data, args.prec)
    rho = serialize.dec_int_matrix(data["rho_r"])
    try:
        f = abelian.validate_endomorphism(av, rho)
    except NotAnEndomorphism as e:
        _emit({"valid": False, "reason": str(e)})
        return EXIT_VIOLATION
    _emit({"valid": True,
           "rho_a": [[serialize.enc_complex(f.rho_a[i, j], av.tau.prec)
                      for j in range(av.g)] for i in range(av.g)]})
    return EXIT_OK


def cmd_av_rosati(args, data):
    _, f = _decode_endo(data, args.prec)
    dag = abelian.rosati(f)
    _emit({"dagger": [[serialize.enc_fraction(x) for x in row] for row in dag]})
    return EXIT_OK


def cmd_av_alphas(args, data):
    _, f = _decode_endo(data, args.prec)
    sc = abelian.alphas(f)
    _emit({"alpha_minus": serialize.enc_real(sc.alpha_minus, args.prec),
           "alpha_plus": serialize.enc_real(sc.alpha_plus, args.prec),
           "analytic_charpoly": serialize.enc_polynomial(sc.analytic_charpoly),
           "is_isogeny": sc.is_isogeny})
    return EXIT_OK


def cmd_av_chi(args, data):
    _, f = _decode_endo(data, args.prec)
    val = abelian.chi_combination(f, int(data["a"]), int(data["b"]))
    _emit({"chi": serialize.enc_fraction(val)})
    return EXIT_OK


def cmd_av_classify(args, data):
    _, f = _decode_endo(data, args.prec)
    side = data.get("side", abelian.SIDE_LAMBDA_MINUS_PULLBACK)
    out = abelian.classify_divisor(f, int(data["a"]), int(data["b"]), side)
    _emit({"classification": out})
    return EXIT_OK


def cmd_av_norm_bounds(args, data):
    av = serialize.dec_av(data["av"] if "av" in data else data, args.prec)
    Z, sig = siegel.reduce(av.tau, max_steps=args.steps)
    cosets = [siegel.SymplecticMatrix.identity(av.g)]
    if not sig.is_identity():
        cosets.append(sig)
    deltas = siegel.delta_constants(av.g, cosets)
    nbc = abelian.norm_bound_constants(av, Z, deltas,
                                       identity_cosets=sig.is_identity())
    reports = []
    for rho in data.get("endos", []):
        f = abelian.validate_endomorphism(av, serialize.dec_int_matrix(rho))
        rep = abelian.verify_norm_bounds(f, nbc.c1, nbc.c2)
        reports.append({"norm": rep.norm,
                        "trace": serialize.enc_fraction(rep.trace),
                        "lower_slack": serialize.enc_real(rep.lower_slack, 53),
                        "upper_slack": serialize.enc_real(rep.upper_slack, 53)})
    out = {"c1": serialize.enc_real(nbc.c1, args.prec),
           "c2": serialize.enc_real(nbc.c2, args.prec),
           "deltas": [serialize.enc_real(d, args.prec) for d in deltas],
           "reports": reports}
    if nbc.c2_sharper is not None:
        out["c2_sharper"] = serialize.enc_real(nbc.c2_sharper, args.prec)
    _emit(out)
    return EXIT_OK


def cmd_ec_height(args, data):
    E = serialize.dec_curve(data["curve"])
    P = serialize.dec_point(data["point"])
    tol = float(data.get("tol", args.tol or 1e-6))
    method = data.get("method", "auto")
    h = elliptic.canonical_height(E, P, tol, method,
                                  doubling_budget=args.budget_doublings)
    _emit({"height": serialize.enc_real(h.value, args.prec),
           "error_bound": serialize.enc_real(h.error_bound, 53),
           "method": h.method})
    return EXIT_OK


def cmd_ec_isogeny(args, data):
    E = serialize.dec_curve(data["curve"])
    T = None
    if "torsion_x" in data:
        T = elliptic.ECPoint(serialize.dec_fraction(data["torsion_x"]), 0)
    E2, phi = elliptic.velu_2isogeny(E, T)
    images = [serialize.enc_point(phi(serialize.dec_point(p)))
              for p in data.get("points", [])]
    _emit({"codomain": serialize.enc_curve(E2),
           "kernel_x": serialize.enc_fraction(phi.pre_r),
           "degree": phi.degree,
           "image_points": images})
    return EXIT_OK


def cmd_verify_thm12(args, data):
    E = serialize.dec_curve(data["curve"])
    pts = [serialize.dec_point(p) for p in data["points"]]
    tol = float(data.get("tol", args.tol or 1e-3))
    rep = elliptic.verify_endo_scaling(E, pts, tol)
    _emit({"alpha_minus": serialize.enc_real(rep.alpha_minus, 53),
           "alpha_plus": serialize.enc_real(rep.alpha_plus, 53),
           "ratios": [serialize.enc_real(r, 53) for r in rep.ratios],
           "extreme_low": serialize.enc_real(rep.extreme_low, 53),
           "extreme_high": serialize.enc_real(rep.extreme_high, 53)})
    return EXIT_OK


def cmd_verify_isogeny_identity(args, data):
    E = serialize.dec_curve(data["curve"])
    T = None
    if "torsion_x" in data:
        T = elliptic.ECPoint(serialize.dec_fraction(data["torsion_x"]), 0)
    E2, phi = elliptic.velu_2isogeny(E, T)
    pts = [serialize.dec_point(p) for p in data["points"]]
    tol = float(data.get("tol", args.tol or 1e-3))
    m1 = int(data.get("m1", 1))
    m2 = int(data.get("m2", 1))
    rep = elliptic.verify_isogeny_identity(E, phi, E2, m1, m2, pts, tol)
    _emit({"factor": serialize.enc_real(rep.factor, 53),
           "worst_gap": serialize.enc_real(rep.worst, 53),
           "checked": rep.checked,
           "codomain": serialize.enc_curve(E2)})
    return EXIT_OK


def cmd_fuzz(args, data):
    config = fuzz.RunConfig(
        precision_bits=args.prec,
        seed=args.seed,
        trials=args.trials,
        tol_heights=args.tol or 1e-6,
        search_budget=args.budget,
        doubling_budget=args.budget_doublings,
        step_budget=args.steps)
    summary = fuzz.run_suite(args.suite, config)
    _emit(summary)
    return EXIT_OK


COMMANDS = {
    "heights-matrix": cmd_heights_matrix,
    "heights-hd": cmd_heights_hd,
    "siegel-reduce": cmd_siegel_reduce,
    "siegel-check": cmd_siegel_check,
    "av-validate": cmd_av_validate,
    "av-rosati": cmd_av_rosati,
    "av-alphas": cmd_av_alphas,
    "av-chi": cmd_av_chi,
    "av-classify": cmd_av_classify,
    "av-norm-bounds": cmd_av_norm_bounds,
    "ec-height": cmd_ec_height,
    "ec-isogeny": cmd_ec_isogeny,
    "verify-thm12": cmd_verify_thm12,
    "verify-isogeny-identity": cmd_verify_isogeny_identity,
    "fuzz": cmd_fuzz,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="abelia",
        description="heights, Siegel reduction, endomorphism norm/spectral "
                    "constants, and canonical-height verification")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--in", dest="infile", default=None,
                        help="JSON input file (default: stdin)")
        sp.add_argument("--prec", type=int,
                        default=int(os.environ.get("ABELIA_PREC", 128)),
                        help="working precision in bits")
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--trials", type=int, default=100)
        sp.add_argument("--budget", type=int, default=10 ** 6,
                        help="search budget for exhaustive confirmations")
        sp.add_argument("--budget-doublings", type=int, default=12)
        sp.add_argument("--steps", type=int, default=200,
                        help="reduction step budget")
        sp.add_argument("--d", type=int, default=None)
        if name == "fuzz":
            sp.add_argument("suite", choices=sorted(fuzz.SUITES))
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.prec < 64:
        print("precision must be at least 64 bits", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        data = _read_input(args)
        with mp.workprec(args.prec):
            return COMMANDS[args.command](args, data)
    except (SearchBudgetExceeded, ReductionDiverged, ToleranceUnreachable,
            RootFindingFailure) as e:
        print(f"budget/tolerance failure: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except BoundViolation as e:
        _emit({"violation": str(e), "payload": getattr(e, "payload", {})})
        print(f"violation: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    except (MalformedInput, NotAnEndomorphism, NotAHomomorphism,
            NoRationalTwoTorsion, KeyError, TypeError, ValueError) as e:
        print(f"malformed input: {e!r}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
