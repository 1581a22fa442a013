"""Polarized complex abelian varieties given by period matrices (tau, D):
endomorphism validation, the polarization adjoint (Rosati) and its trace
form, explicit norm-bound constants, spectral scaling constants, divisor
classification, product embeddings, and deterministic CM sampling.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv, mp

from . import intpoly, linalg, roots, siegel
from .errors import (BoundViolation, ComplexRootDetected, MalformedInput,
                     NotAHomomorphism, NotAnEndomorphism)
from .intpoly import IntPolynomial
from .siegel import SiegelPoint, SymplecticMatrix


@dataclass(frozen=True)
class PolarizationType:
    d: tuple

    def __init__(self, d):
        d = tuple(int(x) for x in d)
        if not d or any(x <= 0 for x in d):
            raise MalformedInput("polarization type must be positive integers")
        for a, b in zip(d, d[1:]):
            if b % a:
                raise MalformedInput("polarization type must be a divisibility chain")
        object.__setattr__(self, "d", d)

    @property
    def g(self):
        return len(self.d)

    @property
    def degree(self):
        out = 1
        for x in self.d:
            out *= x
        return out

    @property
    def chi(self):
        return self.degree

    def diag(self):
        return [[self.d[i] if i == j else 0 for j in range(self.g)]
                for i in range(self.g)]

    def e_matrix(self):
        g = self.g
        rows = [[0] * (2 * g) for _ in range(2 * g)]
        for i in range(g):
            rows[i][g + i] = self.d[i]
            rows[g + i][i] = -self.d[i]
        return rows

    def is_principal(self):
        return all(x == 1 for x in self.d)


@dataclass(frozen=True)
class PolarizedAV:
    g: int
    tau: SiegelPoint
    ptype: PolarizationType

    def __init__(self, tau, ptype, det_tol=1e-20):
        if isinstance(ptype, (list, tuple)):
            ptype = PolarizationType(ptype)
        if ptype.g != tau.g:
            raise MalformedInput("polarization type size must equal g")
        object.__setattr__(self, "g", tau.g)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "ptype", ptype)
        S = self.gram_matrix()
        _, pivots = linalg.cholesky_pivots(S)
        if len(pivots) < 2 * self.g:
            raise MalformedInput("Gram matrix of the polarization is not positive definite")
        d2 = mp.mpf(ptype.degree) ** 2
        if abs(mp.det(S) - d2) >= mp.mpf(det_tol) * d2:
            raise MalformedInput("det(S) deviates from deg^2: inconsistent period data")

    def gram_matrix(self):
        """Real Gram matrix S of the polarization in the symplectic basis."""
        with mp.workprec(self.tau.prec):
            X, Y = self.tau.real(), self.tau.imag()
            D = linalg.to_mp(self.ptype.diag())
            Yi = Y ** -1
            S = mp.matrix(2 * self.g)
            XYX = X * Yi * X + Y
            XYD = X * Yi * D
            DYX = D * Yi * X
            DYD = D * Yi * D
            g = self.g
            for i in range(g):
                for j in range(g):
                    S[i, j] = XYX[i, j]
                    S[i, g + j] = XYD[i, j]
                    S[g + i, j] = DYX[i, j]
                    S[g + i, g + j] = DYD[i, j]
            return S

    def period_matrix(self):
        """g x 2g complex period matrix (tau, D)."""
        g = self.g
        P = mp.matrix(g, 2 * g)
        for i in range(g):
            for j in range(g):
                P[i, j] = self.tau.tau[i, j]
            P[i, g + i] = self.ptype.d[i]
        return P


def _blocks(M, g):
    M1 = [row[:g] for row in M[:g]]
    M2 = [row[g:] for row in M[:g]]
    M3 = [row[:g] for row in M[g:]]
    M4 = [row[g:] for row in M[g:]]
    return M1, M2, M3, M4


def _analytic_rep(av, M):
    """rho_a = (tau M2 + D M4) D^{-1} for a rational/integer block matrix M,
    plus the consistency residual of rho_a tau = tau M1 + D M3."""
    g = av.g
    M1, M2, M3, M4 = _blocks(M, g)
    with mp.workprec(av.tau.prec):
        t = av.tau.tau
        D = linalg.to_mp(av.ptype.diag())
        Dinv = linalg.to_mp(
            [[Fraction(1, av.ptype.d[i]) if i == j else 0 for j in range(g)]
             for i in range(g)])
        rho_a = (t * linalg.to_mp(M2) + D * linalg.to_mp(M4)) * Dinv
        lhs = rho_a * t
        rhs = t * linalg.to_mp(M1) + D * linalg.to_mp(M3)
        resid = linalg.minf(lhs - rhs)
        scale = max(mp.mpf(1), linalg.minf(t)) * max(1, linalg.max_abs(M))
    return rho_a, resid / scale


@dataclass(frozen=True)
class Endomorphism:
    owner: PolarizedAV
    rho_r: tuple   # 2g x 2g integers
    rho_a: object  # mp.matrix

    def max_norm(self):
        return max(abs(x) for row in self.rho_r for x in row)

    def is_zero(self):
        return all(x == 0 for row in self.rho_r for x in row)

    def compose(self, other):
        return validate_endomorphism(
            self.owner, linalg.mat_mul(self.rho_r, other.rho_r))

    def add(self, other):
        return validate_endomorphism(
            self.owner, linalg.mat_add(self.rho_r, other.rho_r))

    def scale(self, n):
        return validate_endomorphism(
            self.owner, [[n * x for x in row] for row in self.rho_r])


def validate_endomorphism(av: PolarizedAV, M, tol=1e-9) -> Endomorphism:
    """Check that the integer matrix M preserves the complex structure and
    return the endomorphism with its derived analytic representation."""
    M = linalg.int_matrix(M)
    if len(M) != 2 * av.g:
        raise MalformedInput(f"matrix must be {2 * av.g} x {2 * av.g}")
    rho_a, resid = _analytic_rep(av, M)
    if not resid < tol:
        raise NotAnEndomorphism(
            f"complex-structure residual {mp.nstr(resid, 8)} exceeds {tol}")
    f = Endomorphism(owner=av, rho_r=tuple(tuple(r) for r in M), rho_a=rho_a)
    if not f.is_zero() and trace_form(f) <= 0:
        raise NotAnEndomorphism("trace form is not positive on a nonzero matrix")
    return f


def rosati(f: Endomorphism):
    """Adjoint with respect to the polarization: E^{-1} rho_r^t E, exact.

    Entries are Fractions (integers when the polarization is principal); the
    result is cross-checked against the Gram-matrix conjugation S^{-1} rho^t S
    at working precision.
    """
    av = f.owner
    E = av.ptype.e_matrix()
    Einv = linalg.inverse_exact(E)
    dag = linalg.mat_mul(linalg.mat_mul(Einv, linalg.transpose(f.rho_r)), E)
    with mp.workprec(av.tau.prec):
        S = av.gram_matrix()
        Smp = S ** -1 * linalg.to_mp(linalg.transpose(f.rho_r)) * S
        resid = linalg.minf(Smp - linalg.to_mp(dag))
        cut = mp.mpf(2) ** (-av.tau.prec + 24) * max(1, f.max_norm()) * 16 ** av.g
        if not resid < max(cut, mp.mpf(1e-12) * max(1, f.max_norm())):
            raise BoundViolation(
                "Rosati cross-check failed: E- and S-conjugations disagree",
                payload={"residual": float(resid)})
    return dag


def trace_form(f: Endomorphism) -> Fraction:
    """tr(rho_r(f^dagger f)), exactly, via the closed bilinear formula; the
    Rosati-matrix product is recomputed as a consistency assertion."""
    g = f.owner.g
    d = f.owner.ptype.d
    m = f.rho_r
    total = Fraction(0)
    for i in range(g):
        for j in range(g):
            total += Fraction(d[i], d[j]) * (
                m[i][j] * m[i + g][j + g] - m[i][j + g] * m[i + g][j])
    total *= 2
    dag = rosati(f)
    prod = linalg.mat_mul(dag, f.rho_r)
    alt = sum(Fraction(prod[i][i]) for i in range(2 * g))
    if alt != total:
        raise BoundViolation("trace formula and Rosati product disagree",
                             payload={"formula": str(total), "product": str(alt)})
    return total


# ---------------------------------------------------------------------------
# norm bounds

@dataclass(frozen=True)
class NormBoundConstants:
    c1: object            # mpf; exactly representable as sqrt(d1/dg)/(2g)
    c2: object            # mpf, outward-rounded general-coset bound
    c2_sharper: object    # mpf or None; full-group bound when cosets = {1}


def norm_bound_constants(av: PolarizedAV, Z: SiegelPoint, deltas,
                         identity_cosets=False) -> NormBoundConstants:
    """Effective constants with c1 sqrt(tr) <= ||rho_r||_inf <= c2 sqrt(tr).

    `Z` is the reduced representative of av.tau and `deltas` the four domain
    constants for the coset list in use.  c2 is rounded up (interval
    arithmetic) so the certified inequality survives the float representation.
    """
    g = av.g
    d1, d2, d3, d4 = deltas
    dlist = av.ptype.d
    with mp.workprec(av.tau.prec + 32):
        imz = linalg.minf(Z.imag())
        old = iv.prec
        iv.prec = av.tau.prec
        try:
            c1 = mp.sqrt(mp.mpf(dlist[0]) / dlist[-1]) / (2 * g)
            m = iv.mpf(max(1, imz))
            dd = iv.mpf(max(dlist))
            deg = iv.mpf(av.ptype.degree)
            delta = (iv.mpf(2) ** (2 * g + 4) * iv.mpf(g) ** (2 * g + 5)
                     * iv.mpf(d2) ** 2 * iv.mpf(d4))
            c2 = delta * dd ** (2 * g + 2) / deg \
                * m ** (2 * g ** 3 + 3 * g ** 2 + 2 * g + 1)
            sharper = None
            if identity_cosets:
                imt = linalg.minf(av.tau.imag())
                ms = iv.mpf(max(1, imt))
                root = iv.mpf(2) * iv.sqrt(iv.mpf(3)) / 3
                sh = (iv.mpf(2) ** (4 * g + 5)
                      * iv.mpf(g) ** (g * g + 3 * g + 3)
                      * root ** (g * g * (g + 1))
                      * dd ** (2 * g + 2) / deg
                      * ms ** (g * (g + 1)))
                sharper = mp.mpf(sh.b)
            out = NormBoundConstants(c1=mp.mpf(c1), c2=mp.mpf(c2.b),
                                     c2_sharper=sharper)
        finally:
            iv.prec = old
    return out


@dataclass
class NormBoundReport:
    norm: int
    trace: Fraction
    lower_slack: float
    upper_slack: float


def verify_norm_bounds(f: Endomorphism, c1=None, c2=None) -> NormBoundReport:
    """Assert c1 sqrt(tr(f^dag f)) <= ||rho_r(f)||_inf <= c2 sqrt(tr).

    The lower comparison is exact rational arithmetic (c1^2 = d1/(4 g^2 dg));
    the upper comparison uses the lower interval endpoint of c2 sqrt(tr).
    c2 must be supplied; c1 defaults to the owner's exact constant.
    """
    av = f.owner
    g = av.g
    tr = trace_form(f)
    if tr <= 0:
        raise MalformedInput("verify_norm_bounds requires a nonzero endomorphism")
    norm = f.max_norm()
    c1sq = Fraction(av.ptype.d[0], 4 * g * g * av.ptype.d[-1])
    if c1sq * tr > Fraction(norm) ** 2:
        raise BoundViolation("lower norm bound failed", payload={
            "rho_r": [list(r) for r in f.rho_r], "trace": str(tr),
            "c1_sq": str(c1sq)})
    if c2 is None:
        raise MalformedInput("c2 must be supplied (from norm_bound_constants)")
    with mp.workprec(av.tau.prec + 32):
        old = iv.prec
        iv.prec = av.tau.prec
        try:
            rhs = iv.mpf(c2) * iv.sqrt(iv.mpf(tr.numerator) / tr.denominator)
            ok = mp.mpf(norm) <= mp.mpf(rhs.a)
            upper_slack = float(mp.mpf(rhs.a) - norm)
        finally:
            iv.prec = old
    if not ok:
        raise BoundViolation("upper norm bound failed", payload={
            "rho_r": [list(r) for r in f.rho_r], "trace": str(tr),
            "c2": float(c2)})
    with mp.workprec(av.tau.prec):
        lower_slack = float(norm - mp.sqrt(mp.mpf(c1sq.numerator)
                                           / c1sq.denominator
                                           * tr.numerator / tr.denominator))
    return NormBoundReport(norm=norm, trace=tr,
                           lower_slack=lower_slack, upper_slack=upper_slack)


# ---------------------------------------------------------------------------
# spectral constants

@dataclass(frozen=True)
class SpectralConstants:
    analytic_charpoly: IntPolynomial
    alpha_minus: object
    alpha_plus: object
    is_isogeny: bool


def _dagger_product(f: Endomorphism):
    """rho_r(f^dagger f) as exact Fractions."""
    return linalg.mat_mul(rosati(f), f.rho_r)


def analytic_charpoly(f: Endomorphism) -> IntPolynomial:
    """Exact square root P^a of the rational characteristic polynomial of
    rho_r(f^dagger f), returned as a primitive integer polynomial.

    Verifies numerically that eigenvalues of rho_a(f^dagger f) match the
    roots of P^a.
    """
    ff = _dagger_product(f)
    pr = linalg.charpoly_exact(ff)
    pr_int = intpoly.from_fractions(pr)
    pa = intpoly.poly_square_root(pr_int)
    # numeric cross-check against the analytic representation
    av = f.owner
    with mp.workprec(av.tau.prec):
        dag_a, resid = _analytic_rep(av, rosati(f))
        target = dag_a * f.rho_a
        eigs, _ = mp.eig(target)
        if f.is_zero():
            return pa
        poly_roots = [r for r, mult in roots.all_roots(pa, av.tau.prec)
                      for _ in range(mult)]
        ev = sorted([mp.re(e) for e in eigs])
        pv = sorted([mp.re(r) for r in poly_roots])
        scale = max(1, max(abs(e) for e in ev), max(abs(p) for p in pv))
        worst = max(abs(a - b) for a, b in zip(ev, pv))
        if not worst < 1e-9 * scale:
            raise BoundViolation(
                "charpoly roots and analytic eigenvalues disagree",
                payload={"worst": float(worst)})
    return pa


def alphas(f: Endomorphism, tol=1e-12) -> SpectralConstants:
    """Spectral scaling window: min/max eigenvalue of rho_a(f^dagger f)."""
    pa = analytic_charpoly(f)
    prec = f.owner.tau.prec
    rts = roots.all_roots(pa, prec)
    reals = []
    for r, mult in rts:
        scale = max(1, abs(r))
        if abs(mp.im(r)) > tol * scale:
            raise ComplexRootDetected(
                f"non-real spectral root {mp.nstr(r, 10)}")
        x = mp.re(r)
        if x < -tol:
            raise ComplexRootDetected(
                f"negative spectral root {mp.nstr(x, 10)}")
        reals.extend([max(x, mp.mpf(0))] * mult)
    is_isogeny = pa.coefficients[0] != 0
    return SpectralConstants(
        analytic_charpoly=pa,
        alpha_minus=min(reals), alpha_plus=max(reals),
        is_isogeny=is_isogeny)


def chi_combination(f: Endomorphism, a, b) -> Fraction:
    """chi(L) * b^g * P^a(a/b), exactly."""
    a, b = int(a), int(b)
    if b <= 0:
        raise MalformedInput("b must be a positive integer")
    pa = analytic_charpoly(f)
    g = f.owner.g
    lam = Fraction(a, b)
    val = Fraction(pa(lam), pa.leading)  # monic normalization
    return Fraction(f.owner.ptype.chi) * b ** g * val


SIDE_LAMBDA_MINUS_PULLBACK = "lambda_minus_pullback"
SIDE_PULLBACK_MINUS_LAMBDA = "pullback_minus_lambda"


def classify_divisor(f: Endomorphism, a, b, side) -> str:
    """Ampleness of lambda*D - f*D (or f*D - lambda*D) for lambda = a/b.

    Decided exactly: boundary iff a/b is a spectral root; otherwise a Sturm
    count of roots beyond lambda.
    """
    a, b = int(a), int(b)
    if b <= 0:
        raise MalformedInput("b must be a positive integer")
    lam = Fraction(a, b)
    pa = analytic_charpoly(f)
    if pa(lam) == 0:
        return "not_ample_boundary"
    if side == SIDE_LAMBDA_MINUS_PULLBACK:
        above = intpoly.count_roots(pa, lam, None)
        return "ample" if above == 0 else "not_ample"
    if side == SIDE_PULLBACK_MINUS_LAMBDA:
        below = intpoly.count_roots(pa, None, lam)
        return "ample" if below == 0 else "not_ample"
    raise MalformedInput(f"unknown side {side!r}")


# ---------------------------------------------------------------------------
# products and homomorphisms

def product_embedding(avA: PolarizedAV, avB: PolarizedAV, hom, tol=1e-9):
    """Build A x B with the block endomorphism (P, Q) -> (O, hom(P)).

    `hom` is an integer 2g_B x 2g_A matrix acting on lattice coordinates;
    it must intertwine the complex structures.  Returns (product, F).
    """
    gA, gB = avA.g, avB.g
    hom = [[int(x) for x in row] for row in hom]
    if len(hom) != 2 * gB or any(len(r) != 2 * gA for r in hom):
        raise MalformedInput("hom must be 2g_B x 2g_A")
    # validate the intertwining property (rectangular analogue of endo check)
    N1 = [row[:gA] for row in hom[:gB]]
    N2 = [row[gA:] for row in hom[:gB]]
    N3 = [row[:gA] for row in hom[gB:]]
    N4 = [row[gA:] for row in hom[gB:]]
    prec = min(avA.tau.prec, avB.tau.prec)
    with mp.workprec(prec):
        tA, tB = avA.tau.tau, avB.tau.tau
        DA = linalg.to_mp(avA.ptype.diag())
        DB = linalg.to_mp(avB.ptype.diag())
        DAinv = linalg.to_mp([[Fraction(1, avA.ptype.d[i]) if i == j else 0
                               for j in range(gA)] for i in range(gA)])
        phi_a = (tB * linalg.to_mp(N2) + DB * linalg.to_mp(N4)) * DAinv
        resid = linalg.minf(phi_a * tA - (tB * linalg.to_mp(N1)
                                          + DB * linalg.to_mp(N3)))
        scale = max(mp.mpf(1), linalg.minf(tA), linalg.minf(tB)) \
            * max(1, linalg.max_abs(hom))
        if not resid / scale < tol:
            raise NotAHomomorphism(
                f"intertwining residual {mp.nstr(resid / scale, 8)} exceeds {tol}")
    gP = gA + gB
    dcat = list(avA.ptype.d) + list(avB.ptype.d)
    perm = sorted(range(gP), key=lambda i: dcat[i])
    dsorted = [dcat[i] for i in perm]
    ptypeP = PolarizationType(dsorted)  # raises if not a chain

    # positions before sorting: factor A occupies 0..gA-1, B occupies gA..gP-1
    inv = [0] * gP
    for new, old in enumerate(perm):
        inv[old] = new

    def lat_A(j):
        return inv[j] if j < gA else gP + inv[j - gA]

    def lat_B(j):
        return inv[gA + j] if j < gB else gP + inv[gA + j - gB]

    tauP = mp.matrix(gP)
    with mp.workprec(prec):
        for i in range(gA):
            for j in range(gA):
                tauP[inv[i], inv[j]] = avA.tau.tau[i, j]
        for i in range(gB):
            for j in range(gB):
                tauP[inv[gA + i], inv[gA + j]] = avB.tau.tau[i, j]
    avP = PolarizedAV(SiegelPoint(tauP, prec=prec), ptypeP)

    rho = [[0] * (2 * gP) for _ in range(2 * gP)]
    for i in range(2 * gB):
        for j in range(2 * gA):
            if hom[i][j]:
                rho[lat_B(i)][lat_A(j)] = hom[i][j]
    F = validate_endomorphism(avP, rho, tol=tol)
    return avP, F


# ---------------------------------------------------------------------------
# CM sampling

# generator omega of the order, with omega^2 = t*omega + n
CM_POINTS = (
    ("i", (0, 1), (0, -1)),              # Z[i]
    ("zeta6", ("1/2", "sqrt3/2"), (1, -1)),  # Z[(1+sqrt(-3))/2]
    ("sqrt-2", (0, "sqrt2"), (0, -2)),   # Z[sqrt(-2)]
    ("sqrt-5", (0, "sqrt5"), (0, -5)),   # Z[sqrt(-5)]
)


def _cm_value(spec_re, spec_im):
    def ev(s):
        if isinstance(s, str):
            num, den = (s.split("/") + ["1"])[:2]
            base = {"sqrt3": mp.sqrt(3), "sqrt2": mp.sqrt(2),
                    "sqrt5": mp.sqrt(5), "1": mp.mpf(1)}[num]
            return base / int(den)
        return mp.mpf(s)
    return mp.mpc(ev(spec_re), ev(spec_im))


def _unit_block(g, k, j, scale=1):
    M = [[0] * g for _ in range(g)]
    M[k][j] = scale
    return M


def _basis_matrices(g, picks):
    """Integer rational representations of the standard endomorphism basis of
    a product of CM elliptic factors: for each factor pair (j, k) with the
    same CM point, the unit map and the order generator."""
    out = []
    for k in range(g):
        for j in range(g):
            if picks[k] != picks[j]:
                continue
            t, n = CM_POINTS[picks[k]][2]
            E = _unit_block(g, k, j)
            Z = [[0] * g for _ in range(g)]
            unit = [r1 + r2 for r1, r2 in zip(E, Z)] + \
                   [r1 + r2 for r1, r2 in zip(Z, E)]
            tE = _unit_block(g, k, j, t)
            nE = _unit_block(g, k, j, n)
            omega = [r1 + r2 for r1, r2 in zip(tE, E)] + \
                    [r1 + r2 for r1, r2 in zip(nE, Z)]
            out.append(unit)
            out.append(omega)
    return out


def random_symplectic(g, rng, max_entry=3, words=4):
    """Deterministic small random symplectic matrix from an rng."""
    J = SymplecticMatrix(siegel._j_rows(g))
    for _ in range(64):
        M = SymplecticMatrix.identity(g)
        for _ in range(rng.randint(1, words)):
            kind = rng.choice(("J", "T", "U"))
            if kind == "J":
                M = J * M
            elif kind == "T":
                B = [[0] * g for _ in range(g)]
                i = rng.randrange(g)
                j = rng.randrange(g)
                v = rng.choice((-1, 1))
                B[i][j] = v
                B[j][i] = v
                M = siegel._translation(g, B) * M
            else:
                U = linalg.identity(g)
                if g > 1:
                    i, j = rng.sample(range(g), 2)
                    U[i][j] = rng.choice((-1, 1))
                else:
                    U[0][0] = rng.choice((-1, 1))
                M = siegel._gl_embedding(U) * M
        if M.max_norm() <= max_entry and not M.is_identity():
            return M
    return J


def sample_cm_variety(g, seed, prec=None, conjugate=None):
    """Deterministic CM product sample: principally polarized diag(tau_1..g)
    with tau_j imaginary quadratic, plus an integer basis of End.

    With `conjugate` truthy (or on a seeded coin flip when None), the period
    basis is changed by a small random symplectic matrix; the returned basis
    matrices are transformed accordingly and still validate.
    """
    if g not in (1, 2, 3):
        raise MalformedInput("sampling implemented for g in {1, 2, 3}")
    prec = prec or mp.prec
    rng = random.Random(seed)
    picks = [rng.randrange(len(CM_POINTS)) for _ in range(g)]
    with mp.workprec(prec):
        taus = [_cm_value(*CM_POINTS[p][1]) for p in picks]
        tau = SiegelPoint.diag(taus, prec=prec)
    mats = _basis_matrices(g, picks)
    if conjugate is None:
        conjugate = rng.random() < 0.5
    if conjugate:
        M = random_symplectic(g, rng)
        Minv = M.inverse()
        with mp.workprec(prec):
            tau = siegel.act(M.transpose(), tau)
        mats = [linalg.mat_mul(linalg.mat_mul(Minv.rows, A), M.rows)
                for A in mats]
    av = PolarizedAV(tau, PolarizationType([1] * g))
    basis = [validate_endomorphism(av, A, tol=1e-9) for A in mats]
    return av, basis
