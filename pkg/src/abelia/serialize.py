"""JSON wire formats.

Exact rationals travel as "p/q" (or "p") strings, integers as strings,
arbitrary-precision floats as decimal strings tagged with their binary
precision.  No binary floats ever appear in JSON, so summaries are
byte-identical across platforms for identical inputs.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction

from mpmath import mp

from .abelian import Endomorphism, PolarizationType, PolarizedAV
from .elliptic import ECPoint, EllipticCurve
from .errors import MalformedInput
from .heights import RationalMatrix
from .intpoly import IntPolynomial
from .siegel import SiegelPoint, SymplecticMatrix


def enc_fraction(q):
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def dec_fraction(s):
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as e:
        raise MalformedInput(f"bad rational {s!r}: {e}") from None


def enc_int(n):
    return str(int(n))


def dec_int(s):
    try:
        return int(str(s))
    except ValueError as e:
        raise MalformedInput(f"bad integer {s!r}: {e}") from None


def enc_real(x, prec=None):
    """Tagged decimal string for an mpf/float."""
    prec = prec or mp.prec
    if x == math.inf:
        return {"dec": "inf", "prec": prec}
    dps = int(prec * 0.30103) + 3
    with mp.workprec(prec):
        return {"dec": mp.nstr(mp.mpf(x), dps, strip_zeros=True), "prec": prec}


def dec_real(obj):
    if isinstance(obj, dict):
        if obj.get("dec") == "inf":
            return mp.inf
        with mp.workprec(int(obj.get("prec", mp.prec))):
            return +mp.mpf(obj["dec"])
    return mp.mpf(str(obj))


def enc_complex(z, prec=None):
    prec = prec or mp.prec
    dps = int(prec * 0.30103) + 3
    with mp.workprec(prec):
        return {"re": mp.nstr(mp.re(z), dps, strip_zeros=True),
                "im": mp.nstr(mp.im(z), dps, strip_zeros=True)}


def dec_complex(obj, prec=None):
    with mp.workprec(prec or mp.prec):
        return mp.mpc(mp.mpf(str(obj["re"])), mp.mpf(str(obj["im"])))


# --- matrices ---------------------------------------------------------------

def enc_rational_matrix(M: RationalMatrix):
    return {"rows": M.rows, "cols": M.cols,
            "data": [enc_fraction(e) for e in M.entries]}


def dec_rational_matrix(obj):
    try:
        return RationalMatrix(int(obj["rows"]), int(obj["cols"]),
                              [dec_fraction(s) for s in obj["data"]])
    except (KeyError, TypeError) as e:
        raise MalformedInput(f"bad matrix object: {e}") from None


def enc_int_matrix(rows):
    return [[enc_int(x) for x in row] for row in rows]


def dec_int_matrix(obj):
    try:
        return [[dec_int(x) for x in row] for row in obj]
    except TypeError as e:
        raise MalformedInput(f"bad integer matrix: {e}") from None


def enc_polynomial(p: IntPolynomial):
    return [enc_int(c) for c in p.coefficients]


def dec_polynomial(obj):
    return IntPolynomial([dec_int(c) for c in obj])


# --- siegel -----------------------------------------------------------------

def enc_siegel_point(Z: SiegelPoint):
    return {"g": Z.g,
            "tau": [[enc_complex(Z.tau[i, j], Z.prec) for j in range(Z.g)]
                    for i in range(Z.g)],
            "prec": Z.prec}


def dec_siegel_point(obj, prec=None):
    try:
        prec = prec or int(obj.get("prec", mp.prec))
        g = int(obj["g"])
        rows = obj["tau"]
        with mp.workprec(prec):
            m = mp.matrix(g)
            for i in range(g):
                for j in range(g):
                    m[i, j] = dec_complex(rows[i][j], prec)
        return SiegelPoint(m, prec=prec)
    except (KeyError, TypeError, IndexError) as e:
        raise MalformedInput(f"bad Siegel point: {e}") from None


def enc_symplectic(s: SymplecticMatrix):
    return enc_int_matrix(s.rows)


def dec_symplectic(obj):
    return SymplecticMatrix(dec_int_matrix(obj))


# --- abelian ----------------------------------------------------------------

def enc_av(av: PolarizedAV):
    return {"g": av.g, "tau": enc_siegel_point(av.tau),
            "type": list(av.ptype.d)}


def dec_av(obj, prec=None):
    try:
        tau = dec_siegel_point(obj["tau"], prec)
        return PolarizedAV(tau, PolarizationType(obj["type"]))
    except (KeyError, TypeError) as e:
        raise MalformedInput(f"bad abelian variety object: {e}") from None


def enc_endomorphism(f: Endomorphism):
    return {"rho_r": enc_int_matrix(f.rho_r)}


# --- elliptic ---------------------------------------------------------------

def enc_curve(E: EllipticCurve):
    out = {"a": enc_fraction(E.a), "b": enc_fraction(E.b)}
    if E.a2:
        out["a2"] = enc_fraction(E.a2)
    return out


def dec_curve(obj):
    try:
        return EllipticCurve(dec_fraction(obj["a"]), dec_fraction(obj["b"]),
                             dec_fraction(obj.get("a2", 0)))
    except (KeyError, TypeError) as e:
        raise MalformedInput(f"bad curve object: {e}") from None


def enc_point(P: ECPoint):
    if P.is_infinity:
        return "O"
    return {"x": enc_fraction(P.x), "y": enc_fraction(P.y)}


def dec_point(obj):
    if obj == "O":
        return ECPoint.infinity()
    try:
        return ECPoint(dec_fraction(obj["x"]), dec_fraction(obj["y"]))
    except (KeyError, TypeError) as e:
        raise MalformedInput(f"bad point object: {e}") from None


def dumps(obj):
    """Deterministic JSON: sorted keys, no whitespace variance."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
