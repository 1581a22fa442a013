"""Siegel upper half space: symplectic action, fundamental-domain membership
and reduction, and the four explicit domain constants.

Symplectic matrices are exact integer objects; points carry mpmath complex
matrices at a stated binary precision.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv, mp

from . import linalg
from .errors import MalformedInput, ReductionDiverged, SingularCocycle

DEFAULT_PREC = 128


# ---------------------------------------------------------------------------
# exact symplectic matrices

def _j_rows(g):
    n = 2 * g
    rows = [[0] * n for _ in range(n)]
    for i in range(g):
        rows[i][g + i] = 1
        rows[g + i][i] = -1
    return rows


@dataclass(frozen=True)
class SymplecticMatrix:
    g: int
    rows: tuple  # 2g x 2g integers

    def __init__(self, rows):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        n = len(rows)
        if n % 2 or any(len(r) != n for r in rows):
            raise MalformedInput("symplectic matrix must be square of even size")
        g = n // 2
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "rows", rows)
        J = _j_rows(g)
        MtJM = linalg.mat_mul(linalg.mat_mul(linalg.transpose(rows), J), rows)
        if MtJM != [list(r) for r in J]:
            raise MalformedInput("matrix is not symplectic: M^t J M != J")

    @staticmethod
    def identity(g):
        return SymplecticMatrix(linalg.identity(2 * g))

    @staticmethod
    def from_blocks(A, B, C, D):
        g = len(A)
        rows = [list(A[i]) + list(B[i]) for i in range(g)]
        rows += [list(C[i]) + list(D[i]) for i in range(g)]
        return SymplecticMatrix(rows)

    def block(self, name):
        g = self.g
        r0 = 0 if name in "AB" else g
        c0 = 0 if name in "AC" else g
        return [list(self.rows[r0 + i][c0:c0 + g]) for i in range(g)]

    @property
    def A(self):
        return self.block("A")

    @property
    def B(self):
        return self.block("B")

    @property
    def C(self):
        return self.block("C")

    @property
    def D(self):
        return self.block("D")

    def __mul__(self, other):
        return SymplecticMatrix(linalg.mat_mul(self.rows, other.rows))

    def inverse(self):
        J = _j_rows(self.g)
        negJ = [[-x for x in r] for r in J]
        Mt = linalg.transpose(self.rows)
        return SymplecticMatrix(linalg.mat_mul(linalg.mat_mul(negJ, Mt), J))

    def transpose(self):
        return SymplecticMatrix(linalg.transpose(self.rows))

    def is_identity(self):
        return self.rows == SymplecticMatrix.identity(self.g).rows

    def max_norm(self):
        return max(abs(x) for r in self.rows for x in r)

    def cd_norm(self):
        return max(linalg.max_abs(self.C), linalg.max_abs(self.D))


# ---------------------------------------------------------------------------
# points

@dataclass(frozen=True)
class SiegelPoint:
    g: int
    tau: object  # mp.matrix, complex entries
    prec: int

    def __init__(self, tau, prec=None, _validate=True):
        prec = prec or mp.prec
        m = tau if isinstance(tau, mp.matrix) else linalg.to_mp(tau)
        g = m.rows
        if m.cols != g:
            raise MalformedInput("tau must be square")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "tau", m)
        object.__setattr__(self, "prec", prec)
        if _validate:
            self._validate()

    def _validate(self):
        cut = mp.mpf(2) ** (-self.prec + 8)
        asym = max(abs(self.tau[i, j] - self.tau[j, i])
                   for i in range(self.g) for j in range(self.g))
        if asym >= cut:
            raise MalformedInput(f"tau not symmetric: asymmetry {mp.nstr(asym, 8)}")
        _, pivots = linalg.cholesky_pivots(self.imag())
        if len(pivots) < self.g or any(p <= cut for p in pivots):
            raise MalformedInput("Im(tau) is not positive definite at working precision")

    def real(self):
        X = mp.matrix(self.g)
        for i in range(self.g):
            for j in range(self.g):
                X[i, j] = mp.re(self.tau[i, j])
        return X

    def imag(self):
        Y = mp.matrix(self.g)
        for i in range(self.g):
            for j in range(self.g):
                Y[i, j] = mp.im(self.tau[i, j])
        return Y

    @staticmethod
    def diag(entries, prec=None):
        g = len(entries)
        m = mp.matrix(g)
        for i, e in enumerate(entries):
            m[i, i] = mp.mpc(e)
        return SiegelPoint(m, prec=prec)


# ---------------------------------------------------------------------------
# action

def _cocycle(sigma, tau_m):
    g = sigma.g
    C = linalg.to_mp(sigma.C)
    D = linalg.to_mp(sigma.D)
    return C * tau_m + D


def act(sigma: SymplecticMatrix, tau: SiegelPoint) -> SiegelPoint:
    """(A tau + B)(C tau + D)^{-1} at the point's working precision."""
    if sigma.g != tau.g:
        raise MalformedInput("dimension mismatch")
    with mp.workprec(tau.prec):
        CD = _cocycle(sigma, tau.tau)
        det = mp.det(CD)
        if abs(det) < mp.mpf(2) ** (-tau.prec + 8):
            raise SingularCocycle(f"|det(C tau + D)| = {mp.nstr(abs(det), 8)}")
        A = linalg.to_mp(sigma.A)
        B = linalg.to_mp(sigma.B)
        N = (A * tau.tau + B) * CD ** -1
        # the exact image is symmetric; fold roundoff asymmetry away
        S = (N + N.T) / 2
    return SiegelPoint(S, prec=tau.prec)


def cocycle_det(sigma: SymplecticMatrix, tau: SiegelPoint):
    with mp.workprec(tau.prec):
        return mp.det(_cocycle(sigma, tau.tau))


# ---------------------------------------------------------------------------
# boundary candidate sets

_S1 = ((0, -1), (1, 0))

# Genus-2 boundary set: the nineteen matrices whose cocycle determinants cut
# out the boundary |det(C Z + D)| = 1 of the genus-2 fundamental domain
# (two partial inversions, nine det-translates, six rank-one conditions on
# z1 + z3 +- 2 z2, two off-diagonal det-translates).  Completions to Sp_4(Z)
# were found by bounded search and verified exactly.
_GOTTSCHLING_19 = (
    [[-1, 0, -1, -1], [-1, 1, 0, -1], [1, 0, 0, 0], [0, 0, 0, 1]],
    [[1, -1, -1, 0], [0, -1, -1, -1], [0, 0, 1, 0], [0, 1, 0, 0]],
    [[-1, -1, -1, 0], [-1, -1, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]],
    [[-1, -1, -1, -1], [-1, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 1]],
    [[-1, -1, -1, 1], [-1, -1, 0, 0], [1, 0, 0, 0], [0, 1, 0, -1]],
    [[0, -1, -1, 0], [-1, -1, -1, -1], [1, 0, 1, 0], [0, 1, 0, 0]],
    [[0, -1, -1, -1], [-1, 0, -1, -1], [1, 0, 1, 0], [0, 1, 0, 1]],
    [[0, -1, -1, 1], [-1, -1, -1, 0], [1, 0, 1, 0], [0, 1, 0, -1]],
    [[-1, -1, 0, 0], [-1, -1, 1, -1], [1, 0, -1, 0], [0, 1, 0, 0]],
    [[-1, -1, 0, -1], [-1, 0, 1, -1], [1, 0, -1, 0], [0, 1, 0, 1]],
    [[-1, -1, 0, 1], [-1, -1, 1, 0], [1, 0, -1, 0], [0, 1, 0, -1]],
    [[0, 1, -1, 0], [0, 1, 0, 0], [1, -1, 1, 0], [-1, 1, 0, 1]],
    [[0, 1, -1, -1], [0, 1, 0, -1], [1, -1, 0, 1], [-1, 1, 1, 0]],
    [[0, 1, -1, -1], [0, 1, 0, -1], [1, -1, 1, 1], [-1, 1, 0, 0]],
    [[0, -1, -1, 0], [-1, 0, 0, -1], [1, 1, 1, 0], [1, 1, 0, 1]],
    [[0, -1, -1, 1], [-1, 0, 1, -1], [1, 1, 0, -1], [1, 1, -1, 0]],
    [[0, -1, -1, 1], [-1, 0, 0, -1], [1, 1, 1, -1], [1, 1, 0, 0]],
    [[-1, 0, -1, -1], [0, -1, -1, -1], [1, 0, 0, 1], [0, 1, 1, 0]],
    [[-1, -1, 0, 1], [-1, -1, 1, 0], [1, 0, 0, -1], [0, 1, -1, 0]],
)


def _partial_inversion(g, j):
    A = linalg.identity(g)
    D = linalg.identity(g)
    B = [[0] * g for _ in range(g)]
    C = [[0] * g for _ in range(g)]
    A[j][j] = 0
    D[j][j] = 0
    B[j][j] = -1
    C[j][j] = 1
    return SymplecticMatrix.from_blocks(A, B, C, D)


def boundary_matrices(g):
    """Candidate boundary cosets used by membership/reduce.

    g=1: the inversion.  g=2: the full nineteen-matrix set.  g=3: a heuristic
    set (partial inversions plus the full inversion); the genus-3 domain has
    no exact finite description here, so genus-3 reduction is approximate.
    """
    if g == 1:
        return [SymplecticMatrix(_S1)]
    if g == 2:
        return [SymplecticMatrix(m) for m in _GOTTSCHLING_19]
    if g == 3:
        out = [_partial_inversion(3, j) for j in range(3)]
        out.append(SymplecticMatrix(_j_rows(3)))
        return out
    raise MalformedInput("boundary sets implemented for g in {1, 2, 3}")


# ---------------------------------------------------------------------------
# Minkowski reduction of positive definite Y (g <= 3), exact unimodular V

def _apply_rowop(V, i, j, r):
    # row_i <- row_i - r * row_j
    V[i] = [a - r * b for a, b in zip(V[i], V[j])]


def _gram(Y, V):
    Vm = linalg.to_mp(V)
    return Vm * Y * Vm.T


def minkowski_transform(Y, max_rounds=256):
    """Exact unimodular V (list of int rows) with V*Y*V^t Minkowski reduced,
    for g <= 3.  Y is a symmetric positive definite mp.matrix."""
    g = Y.rows
    V = linalg.identity(g)
    if g == 1:
        return V
    eps = mp.mpf(2) ** (-mp.prec // 2)
    cands = [x for x in itertools.product((-1, 0, 1), repeat=g)
             if any(x) and max(x) >= 0]
    for _ in range(max_rounds):
        G = _gram(Y, V)
        changed = False
        # sort by diagonal
        order = sorted(range(g), key=lambda i: G[i, i])
        if order != list(range(g)):
            V = [V[i] for i in order]
            G = _gram(Y, V)
            changed = True
        # pairwise size reduction
        for i in range(g):
            for j in range(i):
                r = int(mp.nint(G[i, j] / G[j, j]))
                if r:
                    _apply_rowop(V, i, j, r)
                    G = _gram(Y, V)
                    changed = True
        # short-vector replacement: b_k <- sum x_i b_i with |x_i| <= 1, x_k != 0
        for k in range(g):
            for x in cands:
                if x[k] not in (1, -1):
                    continue
                q = sum(x[i] * x[j] * G[i, j] for i in range(g) for j in range(g))
                if q < G[k, k] * (1 - eps):
                    V[k] = [sum(x[i] * V[i][c] for i in range(g)) for c in range(g)]
                    changed = True
                    G = _gram(Y, V)
        if not changed:
            break
    else:
        raise ReductionDiverged("Minkowski reduction did not stabilize")
    # sign normalization: make G[k, k+1] >= 0 via diagonal flips
    G = _gram(Y, V)
    signs = [1] * g
    for k in range(g - 1):
        if G[k, k + 1] * signs[k] * signs[k + 1] < 0:
            signs[k + 1] = -signs[k + 1]
    if any(s < 0 for s in signs):
        V = [[s * x for x in row] for s, row in zip(signs, V)]
    return V


def _minkowski_margins(Y, tol):
    """Signed slacks of the finite Minkowski inequality set for g <= 3."""
    g = Y.rows
    margins = []
    for k in range(g - 1):
        margins.append(Y[k + 1, k + 1] - Y[k, k])
        margins.append(Y[k, k + 1])  # sign normalization
    for k in range(g):
        ek = tuple(int(i == k) for i in range(g))
        nek = tuple(-int(i == k) for i in range(g))
        for x in itertools.product((-1, 0, 1), repeat=g):
            if not any(x[k:]) or x == ek or x == nek:
                continue
            q = sum(x[i] * x[j] * Y[i, j] for i in range(g) for j in range(g))
            margins.append(q - Y[k, k])
    return margins


@dataclass
class DomainReport:
    re_bound_ok: bool
    minkowski_ok: bool
    boundary_ok: bool
    worst_margin: float
    checked_cosets: int


def membership(Z: SiegelPoint, cosets=None, tol=1e-12) -> DomainReport:
    """Fundamental-domain membership checks with explicit slack reporting.

    All comparisons are one-sided with tolerance `tol`; `worst_margin` is the
    minimum signed slack over every checked inequality.
    """
    if cosets is None:
        cosets = boundary_matrices(Z.g)
    g = Z.g
    with mp.workprec(Z.prec):
        X, Y = Z.real(), Z.imag()
        re_margin = mp.mpf(1) / 2 - linalg.minf(X)
        mink = _minkowski_margins(Y, tol)
        det_margin = mp.det(Y) - mp.mpf(3) ** (mp.mpf(g * g) / 2) / 2 ** (g * g)
        mink.append(det_margin)
        bound = [abs(cocycle_det(s, Z)) - 1 for s in cosets]
        margins = [re_margin] + mink + bound
        worst = min(margins)
    return DomainReport(
        re_bound_ok=bool(re_margin >= -tol),
        minkowski_ok=bool(min(mink) >= -tol),
        boundary_ok=bool(not bound or min(bound) >= -tol),
        worst_margin=float(worst),
        checked_cosets=len(cosets),
    )


# ---------------------------------------------------------------------------
# reduction

def _translation(g, Bint):
    return SymplecticMatrix.from_blocks(
        linalg.identity(g), Bint, [[0] * g for _ in range(g)], linalg.identity(g))


def _gl_embedding(V):
    g = len(V)
    Vt_inv = linalg.inverse_exact(linalg.transpose(V))
    Vi = [[int(x) for x in row] for row in Vt_inv]
    zero = [[0] * g for _ in range(g)]
    return SymplecticMatrix.from_blocks(V, zero, zero, Vi)


def reduce(tau: SiegelPoint, max_steps=200):
    """Reduce into the fundamental domain: returns (Z, sigma) with
    sigma * Z = tau, sigma exactly symplectic, Z passing membership.

    Alternates Minkowski reduction of Im, integer translation of Re, and the
    boundary flip minimizing |det(CZ+D)|, until no flip improves det(Im) by
    the working-precision factor.
    """
    g = tau.g
    if g not in (1, 2, 3):
        raise MalformedInput("reduction implemented for g in {1, 2, 3}")
    cands = boundary_matrices(g)
    with mp.workprec(tau.prec):
        flip_cut = 1 - mp.mpf(2) ** (-tau.prec // 2)
        U = SymplecticMatrix.identity(g)
        Z = tau
        for _ in range(max_steps):
            V = minkowski_transform(Z.imag())
            if V != linalg.identity(g):
                M = _gl_embedding(V)
                U = M * U
                Z = act(M, Z)
            X = Z.real()
            Bint = [[-int(mp.nint(X[i, j])) for j in range(g)] for i in range(g)]
            # symmetrize rounding of a symmetric matrix
            for i in range(g):
                for j in range(i):
                    Bint[i][j] = Bint[j][i]
            if any(any(r) for r in Bint):
                T = _translation(g, Bint)
                U = T * U
                Z = act(T, Z)
            dets = [abs(cocycle_det(s, Z)) for s in cands]
            best = min(range(len(cands)), key=lambda i: dets[i])
            if dets[best] < flip_cut:
                U = cands[best] * U
                Z = act(cands[best], Z)
                continue
            break
        else:
            raise ReductionDiverged(f"no fixed point after {max_steps} steps")
        sigma = U.inverse()
        Zfinal = act(U, tau)
    return Zfinal, sigma


# ---------------------------------------------------------------------------
# explicit domain constants

def delta_constants(g, cosets):
    """The four effective constants attached to a coset-representative list.

    delta1, delta2, delta4 are rounded up and delta3 down (interval
    arithmetic), so the bounds they certify stay valid.
    """
    if not cosets:
        raise MalformedInput("coset list must be nonempty")
    mx = max(s.cd_norm() for s in cosets)
    msig = max(s.max_norm() for s in cosets)
    for s in cosets:
        if s.g != g:
            raise MalformedInput("coset dimension mismatch")
    with mp.workprec(mp.prec + 32):
        old = iv.prec
        iv.prec = mp.prec
        try:
            gi = iv.mpf(g)
            five_half = iv.mpf(5) / 2
            d1 = five_half ** (2 * g - 2) * gi ** (3 * g) * iv.mpf(mx) ** (2 * g - 2)
            # g^(3g/2 + 1) = sqrt(g^(3g + 2)); g^(g/2) = sqrt(g^g)
            d2 = five_half ** g * iv.sqrt(gi ** (3 * g + 2)) * iv.mpf(msig) ** g
            d3 = (iv.sqrt(iv.mpf(3)) / 2) ** (g * g) * (iv.mpf(2) / 5) ** (2 * g) \
                / gi ** (3 * g) / iv.mpf(mx) ** (2 * g)
            d4 = iv.sqrt(gi ** g) * d1 ** (g - 1) / d3
            out = (mp.mpf(d1.b), mp.mpf(d2.b), mp.mpf(d3.a), mp.mpf(d4.b))
        finally:
            iv.prec = old
    return out
