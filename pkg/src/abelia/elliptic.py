"""Exact elliptic curve arithmetic over Q and certified canonical heights.

Two independent height algorithms share nothing but the duplication law:

* doubling_limit -- exact big-integer x-coordinates of 2^n P, with the error
  after n steps certified by per-curve constants derived from resultant
  cofactor identities;
* local_decomposition -- an archimedean term from renormalized projective
  dynamics at working precision, plus finite-place terms from truncated
  p-adic orbits at the finitely many primes where reduced fractions can drop
  a common factor.

Normalization: hhat(P) = (1/2) * lim 4^-n h(x(2^n P)) relative to the
degree-one divisor (O), so hhat([n]P) = n^2 hhat(P).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .errors import (IdentityViolation, MalformedInput, NoRationalTwoTorsion,
                     ScalingViolation, ToleranceUnreachable)
from .intpoly import IntPolynomial, _qdivmod, has_rational_root

DOUBLING_BUDGET = 12
# refuse exact orbits whose final numerator would exceed ~8e6 bits
_ORBIT_BIT_CAP = 8 * 10 ** 6


@dataclass(frozen=True)
class EllipticCurve:
    """y^2 = x^3 + a2 x^2 + a x + b; a2 = 0 is the short Weierstrass case
    and nonzero a2 appears in isogeny intermediates."""

    a: Fraction
    b: Fraction
    a2: Fraction = Fraction(0)

    def __init__(self, a, b, a2=0):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "a2", Fraction(a2))
        if self.discriminant() == 0:
            raise MalformedInput("singular curve: discriminant vanishes")

    def discriminant(self):
        b2 = 4 * self.a2
        b4 = 2 * self.a
        b6 = 4 * self.b
        b8 = 4 * self.a2 * self.b - self.a ** 2
        return -b2 ** 2 * b8 - 8 * b4 ** 3 - 27 * b6 ** 2 + 9 * b2 * b4 * b6

    def rhs(self, x):
        x = Fraction(x)
        return x ** 3 + self.a2 * x ** 2 + self.a * x + self.b


@dataclass(frozen=True)
class ECPoint:
    x: Fraction | None = None
    y: Fraction | None = None

    def __init__(self, x=None, y=None):
        if (x is None) != (y is None):
            raise MalformedInput("point needs both coordinates or neither")
        object.__setattr__(self, "x", None if x is None else Fraction(x))
        object.__setattr__(self, "y", None if y is None else Fraction(y))

    @property
    def is_infinity(self):
        return self.x is None

    @staticmethod
    def infinity():
        return ECPoint()


O = ECPoint.infinity()


def on_curve(E: EllipticCurve, P: ECPoint) -> bool:
    if P.is_infinity:
        return True
    return P.y ** 2 == E.rhs(P.x)


def _require_on_curve(E, P):
    if not on_curve(E, P):
        raise MalformedInput("point is not on the curve")


def neg(E, P):
    if P.is_infinity:
        return P
    return ECPoint(P.x, -P.y)


def add(E: EllipticCurve, P: ECPoint, Q: ECPoint) -> ECPoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.x == Q.x:
        if P.y == -Q.y:
            return O
        lam = (3 * P.x ** 2 + 2 * E.a2 * P.x + E.a) / (2 * P.y)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam ** 2 - E.a2 - P.x - Q.x
    y3 = lam * (P.x - x3) - P.y
    return ECPoint(x3, y3)


def mul(E: EllipticCurve, P: ECPoint, n: int) -> ECPoint:
    """Exact [n]P by a binary chain; [0]P = O, [-n]P = -[n]P."""
    _require_on_curve(E, P)
    n = int(n)
    if n < 0:
        return mul(E, neg(E, P), -n)
    acc = O
    base = P
    while n:
        if n & 1:
            acc = add(E, acc, base)
        base = add(E, base, base)
        n >>= 1
    return acc


def is_torsion(E, P, max_order=12):
    """Exact torsion check by multiplication up to the engineering cutoff."""
    Q = P
    for _ in range(max_order):
        if Q.is_infinity:
            return True
        Q = add(E, Q, P)
    return Q.is_infinity


# ---------------------------------------------------------------------------
# model normalization

def _integral_model(E: EllipticCurve, P: ECPoint = None):
    """Scale (x, y) -> (u^2 x, u^3 y) so all coefficients are integers."""
    den = math.lcm(E.a2.denominator, E.a.denominator, E.b.denominator)
    u = 1
    while (E.a2 * u ** 2).denominator != 1 or (E.a * u ** 4).denominator != 1 \
            or (E.b * u ** 6).denominator != 1:
        u *= den if den > 1 else 2
    Ei = EllipticCurve(E.a * u ** 4, E.b * u ** 6, E.a2 * u ** 2)
    if P is None or P.is_infinity:
        return Ei, (O if P is not None else None)
    return Ei, ECPoint(P.x * u ** 2, P.y * u ** 3)


# ---------------------------------------------------------------------------
# duplication data and certified constants

def _ext_bezout(a, b):
    """Extended Euclid over Q[x] for coprime a, b (Fraction coefficient
    lists, constant first): returns (s, t, c) with s*a + t*b = c, c a
    nonzero Fraction."""
    r0, r1 = list(a), list(b)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]

    def sub(u, v, q):
        # u - q*v
        prod = [Fraction(0)] * (len(q) + len(v) - 1) if q and v else []
        for i, qi in enumerate(q):
            for j, vj in enumerate(v):
                prod[i + j] += qi * vj
        out = [Fraction(0)] * max(len(u), len(prod))
        for i, ui in enumerate(u):
            out[i] += ui
        for i, pi in enumerate(prod):
            out[i] -= pi
        while out and out[-1] == 0:
            out.pop()
        return out

    while True:
        q, r = _qdivmod(r0, r1)
        if not r:
            raise MalformedInput("polynomials are not coprime")
        s0, s1 = s1, sub(s0, s1, q)
        t0, t1 = t1, sub(t0, t1, q)
        r0, r1 = r1, r
        if len(r1) == 1:  # constant remainder
            return s1, t1, r1[0]


def _abs_sum_cleared(polys, const):
    """Clear denominators across cofactor polynomials; returns
    (sum of |integer coefficients|, |integer constant|)."""
    den = math.lcm(*[c.denominator for p in polys for c in p] + [const.denominator])
    total = sum(abs(int(c * den)) for p in polys for c in p)
    return total, abs(int(const * den))


@functools.lru_cache(maxsize=128)
def _dup_data(a2, a4, a6):
    """Per-curve constants for the duplication dynamics (integral model).

    Returns a dict with the homogeneous quartics F, G, the universal
    gcd-drop modulus Gamma, and the one-step height distortion bound C.
    """
    A, B, C = int(a2), int(a4), int(a6)
    # x(2P) = N(x)/D(x)
    N = [B * B - 4 * A * C, -8 * C, -2 * B, 0, 1]          # constant first
    D = [4 * C, 4 * B, 4 * A, 4]
    Nf = [Fraction(c) for c in N]
    Df = [Fraction(c) for c in D]
    # q-side: s*N + t*D = cq  ->  u F + v G = cq * q^7
    s, t, cq = _ext_bezout(Nf, Df)
    Mq, cq_int = _abs_sum_cleared((s, t), cq)
    # p-side: reversed polynomials (roles of p and q swapped)
    Nr = [Fraction(c) for c in reversed(N)]
    Gr = [Fraction(0)] + Df[::-1]          # G(1, q) = 4q + 4A q^2 + ...
    while len(Gr) > 1 and Gr[-1] == 0:
        Gr.pop()
    sp, tp, cp = _ext_bezout(Nr, Gr)
    Mp, cp_int = _abs_sum_cleared((sp, tp), cp)
    gamma = abs(cq_int * cp_int) or 1
    sumF = sum(abs(c) for c in N)
    sumG = sum(abs(c) for c in D)
    c_up = math.log(max(sumF, sumG))
    drop_floor = min(Fraction(cq_int, Mq), Fraction(cp_int, Mp))
    c_low = math.log(gamma) - math.log(drop_floor)
    return {
        "N": tuple(N), "D": tuple(D),
        "gamma": gamma,
        "C": max(c_up, c_low),
        "C_up": c_up,
        "C_inf": max(c_up, -math.log(drop_floor)),
    }


def _F_G(data, p, q):
    c0, c1, c2, c3, c4 = data["N"]
    d0, d1, d2, d3 = data["D"]
    q2 = q * q
    q3 = q2 * q
    Fv = ((p * p) * (p * p + c2 * q2)) + q3 * (c1 * p + c0 * q)
    Gv = q * (d3 * p * p * p + d2 * p * p * q + d1 * p * q2 + d0 * q3)
    return Fv, Gv


# ---------------------------------------------------------------------------
# canonical heights

@dataclass(frozen=True)
class HeightValue:
    value: object        # mpf >= 0 (clamped)
    error_bound: float
    method: str

    def __float__(self):
        return float(self.value)


def _doubling_steps_needed(Ccurve, tol):
    # error after n steps: Ccurve / (6 * 4^n)
    n = 0
    while Ccurve / (6 * 4.0 ** n) >= tol:
        n += 1
    return n


def _height_doubling(Ei, Pi, tol, budget):
    data = _dup_data(int(Ei.a2), int(Ei.a), int(Ei.b))
    n_needed = _doubling_steps_needed(data["C"], tol)
    if n_needed > budget:
        raise ToleranceUnreachable(
            f"{n_needed} doublings needed for tol {tol}, budget {budget}")
    p = Pi.x.numerator
    q = Pi.x.denominator
    gamma = data["gamma"]
    for _ in range(n_needed):
        if max(abs(p).bit_length(), q.bit_length()) > _ORBIT_BIT_CAP:
            raise ToleranceUnreachable(
                "exact orbit exceeded the big-integer size cap")
        p, q = _F_G(data, p, q)
        if gamma > 1:
            # any common factor of the image pair divides gamma
            g = math.gcd(math.gcd(p % gamma, gamma), math.gcd(q % gamma, gamma))
            if g > 1:
                p //= g
                q //= g
    m = max(abs(p), abs(q))
    with mp.workprec(64):
        h = mp.log(mp.mpf(m)) if m > 1 else mp.mpf(0)
        val = h / mp.mpf(4) ** n_needed / 2
    err = data["C"] / (6 * 4.0 ** n_needed)
    return HeightValue(value=max(val, mp.mpf(0)), error_bound=err,
                       method="doubling_limit")


def _height_local(Ei, Pi, tol):
    data = _dup_data(int(Ei.a2), int(Ei.a), int(Ei.b))
    x = Pi.x
    # three certified pieces; give each a third of the tolerance (factor 1/2
    # of the normalization absorbs another factor 2 of slack)
    share = 2 * tol / 3
    with mp.workprec(max(mp.prec, 128)):
        # archimedean: renormalized projective dynamics
        c_inf = max(data["C_inf"], 1e-9)
        n_inf = max(1, math.ceil(math.log(c_inf / (3 * share), 4)) + 1)
        v = (mp.mpf(x.numerator) / x.denominator, mp.mpf(1))
        lam = mp.log(max(abs(v[0]), 1))
        nrm = max(abs(v[0]), 1)
        v = (v[0] / nrm, v[1] / nrm)
        for n in range(n_inf):
            w = _F_G(data, v[0], v[1])
            nw = max(abs(w[0]), abs(w[1]))
            lam += mp.log(nw) / mp.mpf(4) ** (n + 1)
            v = (w[0] / nw, w[1] / nw)
        err_inf = c_inf / (3 * 4.0 ** n_inf)

        # finite places: truncated p-adic orbits at primes dividing gamma
        fin = mp.mpf(0)
        err_fin = 0.0
        gamma = data["gamma"]
        primes = _prime_factors(gamma)
        fin += mp.log(x.denominator) if x.denominator > 1 else mp.mpf(0)
        for pr in primes:
            emax = _ord(gamma, pr)
            if emax == 0:
                continue
            share_p = share / max(1, len(primes))
            n_p = max(1, math.ceil(math.log(
                max(emax * math.log(pr), 1e-9) / (3 * share_p), 4)) + 1)
            K = n_p * emax + 8
            mod = pr ** K
            a = Pi.x.numerator % mod
            b = Pi.x.denominator % mod
            drop = mp.mpf(0)
            kleft = K
            for n in range(n_p):
                w1, w2 = _F_G(data, a, b)
                w1 %= pr ** kleft
                w2 %= pr ** kleft
                e1 = _ord(w1, pr) if w1 else kleft
                e2 = _ord(w2, pr) if w2 else kleft
                e = min(e1, e2)
                if e > emax:
                    raise ToleranceUnreachable(
                        "p-adic drop exceeded its proved bound (precision bug)")
                if e:
                    w1 //= pr ** e
                    w2 //= pr ** e
                    kleft -= e
                    drop += mp.mpf(e) / mp.mpf(4) ** (n + 1)
                a, b = w1 % pr ** kleft, w2 % pr ** kleft
                if kleft < emax + 2:
                    raise ToleranceUnreachable("p-adic precision exhausted")
            fin -= drop * mp.log(pr)
            err_fin += emax * math.log(pr) / (3 * 4.0 ** n_p)
        val = (lam + fin) / 2
        err = (err_inf + err_fin) / 2 + 1e-25
    return HeightValue(value=max(val, mp.mpf(0)), error_bound=err,
                       method="local_decomposition")


def _ord(n, p):
    n = abs(n)
    e = 0
    while n and n % p == 0:
        n //= p
        e += 1
    return e


def _pollard_rho(n):
    if n % 2 == 0:
        return 2
    x, c = 2, 1
    while True:
        y, d = x, 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
        x, c = c + 2, c + 1


def _is_probable_prime(n):
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_factors(n):
    n = abs(n)
    out = set()
    stack = []
    d = 2
    while d < 10 ** 4 and d * d <= n:
        if n % d == 0:
            out.add(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        stack.append(n)
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_probable_prime(m):
            out.add(m)
            continue
        f = _pollard_rho(m)
        stack.append(f)
        stack.append(m // f)
    return sorted(out)


def canonical_height(E: EllipticCurve, P: ECPoint, tol=1e-6, method="auto",
                     doubling_budget=DOUBLING_BUDGET) -> HeightValue:
    """Neron-Tate height of P relative to the divisor (O), certified to tol.

    method: 'doubling_limit', 'local_decomposition', or 'auto' (doubling when
    its certified step count fits the budget and the exact orbit stays a
    manageable size, local decomposition otherwise).
    """
    _require_on_curve(E, P)
    if tol <= 0:
        raise MalformedInput("tolerance must be positive")
    if P.is_infinity:
        return HeightValue(value=mp.mpf(0), error_bound=0.0, method=method)
    Ei, Pi = _integral_model(E, P)
    if method == "doubling_limit":
        return _height_doubling(Ei, Pi, tol, doubling_budget)
    if method == "local_decomposition":
        return _height_local(Ei, Pi, tol)
    if method != "auto":
        raise MalformedInput(f"unknown method {method!r}")
    data = _dup_data(int(Ei.a2), int(Ei.a), int(Ei.b))
    n_needed = _doubling_steps_needed(data["C"], tol)
    if n_needed <= doubling_budget:
        # probe a few exact steps to project the final orbit size
        probe = min(4, n_needed)
        p, q = Pi.x.numerator, Pi.x.denominator
        gamma = data["gamma"]
        for _ in range(probe):
            p, q = _F_G(data, p, q)
            if gamma > 1:
                g = math.gcd(math.gcd(p % gamma, gamma), math.gcd(q % gamma, gamma))
                if g > 1:
                    p //= g
                    q //= g
        bits = max(abs(p).bit_length(), q.bit_length())
        projected = (bits + data["C_up"] / math.log(2) / 3) * 4 ** (n_needed - probe)
        if projected <= _ORBIT_BIT_CAP:
            return _height_doubling(Ei, Pi, tol, doubling_budget)
    return _height_local(Ei, Pi, tol)


def product_height(E1, E2, m1, m2, P1, P2, tol=1e-6, method="auto"):
    """m1*hhat(P1) + m2*hhat(P2): canonical height on E1 x E2 for the divisor
    m1 pi1*(O) + m2 pi2*(O).  Weights must be positive (ample)."""
    m1, m2 = int(m1), int(m2)
    if m1 <= 0 or m2 <= 0:
        raise MalformedInput("divisor weights must be positive integers")
    inner = tol / (2 * max(m1, m2))
    h1 = canonical_height(E1, P1, inner, method)
    h2 = canonical_height(E2, P2, inner, method)
    return HeightValue(value=m1 * h1.value + m2 * h2.value,
                       error_bound=m1 * h1.error_bound + m2 * h2.error_bound,
                       method=h1.method)


# ---------------------------------------------------------------------------
# 2-isogenies

@dataclass(frozen=True)
class TwoIsogeny:
    """Degree-2 isogeny with kernel {O, (pre_r, 0)}, exact on rational points.

    The core map acts on the shifted model y^2 = x^3 + alpha x^2 + beta x;
    (post_u, post_r) compose a final isomorphism x -> x/u^2 + r, y -> y/u^3.
    """
    domain: EllipticCurve
    codomain: EllipticCurve
    alpha: Fraction
    beta: Fraction
    pre_r: Fraction = Fraction(0)
    post_u: Fraction = Fraction(1)
    post_r: Fraction = Fraction(0)

    @property
    def degree(self):
        return 2

    def __call__(self, P: ECPoint) -> ECPoint:
        _require_on_curve(self.domain, P)
        if P.is_infinity:
            return O
        xs = P.x - self.pre_r
        if xs == 0 and P.y == 0:
            return O
        X = xs + self.alpha + self.beta / xs
        Y = P.y * (xs * xs - self.beta) / (xs * xs)
        u, r = self.post_u, self.post_r
        out = ECPoint(X / u ** 2 + r, Y / u ** 3)
        _require_on_curve(self.codomain, out)
        return out


def two_torsion_abscissas(E: EllipticCurve):
    """Rational roots of the right-hand cubic, exactly."""
    poly = [E.b, E.a, E.a2, Fraction(1)]
    den = math.lcm(*(c.denominator for c in poly))
    coeffs = [int(c * den) for c in poly]
    roots = []
    if coeffs[0] == 0:
        roots.append(Fraction(0))
        while coeffs[0] == 0:
            coeffs = coeffs[1:]
    from .intpoly import _divisors
    for p in _divisors(coeffs[0]):
        for q in _divisors(coeffs[-1]):
            for s in (1, -1):
                cand = Fraction(s * p, q)
                if E.rhs(cand) == 0 and cand not in roots:
                    roots.append(cand)
    return sorted(roots)


def velu_2isogeny(E: EllipticCurve, T: ECPoint = None) -> tuple:
    """Degree-2 isogeny with kernel {O, T}; T defaults to the least rational
    2-torsion abscissa.  Returns (codomain, phi)."""
    if T is None:
        xs = two_torsion_abscissas(E)
        if not xs:
            raise NoRationalTwoTorsion("curve has no rational 2-torsion")
        T = ECPoint(xs[0], 0)
    _require_on_curve(E, T)
    if T.is_infinity or T.y != 0:
        raise NoRationalTwoTorsion("kernel generator must be a 2-torsion point")
    x0 = T.x
    alpha = E.a2 + 3 * x0
    beta = E.a + 2 * E.a2 * x0 + 3 * x0 ** 2
    E2 = EllipticCurve(a=alpha ** 2 - 4 * beta, b=0, a2=-2 * alpha)
    phi = TwoIsogeny(domain=E, codomain=E2, alpha=alpha, beta=beta, pre_r=x0)
    return E2, phi


def velu_dual(phi: TwoIsogeny) -> TwoIsogeny:
    """Dual of a forward Vélu 2-isogeny, mapping back to phi.domain so that
    velu_dual(phi)(phi(P)) == mul(domain, P, 2) exactly."""
    a2, a4 = phi.codomain.a2, phi.codomain.a
    alpha, beta = a2, a4  # codomain is y^2 = x^3 + a2 x^2 + a4 x, kernel (0,0)
    return TwoIsogeny(domain=phi.codomain, codomain=phi.domain,
                      alpha=alpha, beta=beta, pre_r=Fraction(0),
                      post_u=Fraction(2), post_r=phi.pre_r)


# ---------------------------------------------------------------------------
# verification harnesses

@dataclass
class ScalingReport:
    alpha_minus: float
    alpha_plus: float
    ratios: list
    extreme_low: float
    extreme_high: float


def _spectral_window():
    """(alpha-, alpha+) = (1, 4) for (P1, P2) -> (P1, 2 P2) on E x E with the
    product divisor, computed by the period-matrix machinery."""
    from . import abelian, siegel as _siegel
    tau = _siegel.SiegelPoint.diag([mp.mpc(0, 1), mp.mpc(0, 1)])
    av = abelian.PolarizedAV(tau, [1, 1])
    f = abelian.validate_endomorphism(
        av, [[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 2]])
    sc = abelian.alphas(f)
    return sc.alpha_minus, sc.alpha_plus


def verify_endo_scaling(E: EllipticCurve, points, tol=1e-3) -> ScalingReport:
    """On E x E with D = pi1*(O) + pi2*(O) and f(P1, P2) = (P1, 2 P2), check
    the scaling window and that both extremes are attained.

    `points` must be non-torsion points of E; pairs are formed from them and
    the extremes are witnessed at (P, O) and (O, P).
    """
    am, ap = _spectral_window()
    am, ap = float(am), float(ap)
    inner = tol * 1e-3
    heights = {}
    for P in points:
        _require_on_curve(E, P)
        if is_torsion(E, P):
            raise MalformedInput("scaling harness needs non-torsion points")
        heights[P] = canonical_height(E, P, inner).value
        heights[mul(E, P, 2)] = canonical_height(E, mul(E, P, 2), inner).value
    ratios = []
    for P1 in points:
        for P2 in points:
            num = heights[P1] + heights[mul(E, P2, 2)]
            den = heights[P1] + heights[P2]
            ratios.append(float(num / den))
    # extremes at (P, O) and (O, P)
    P = points[0]
    lo = float(heights[P] / heights[P])
    hi = float(heights[mul(E, P, 2)] / heights[P])
    for r in ratios + [lo, hi]:
        if not (am - tol <= r <= ap + tol):
            raise ScalingViolation(
                f"ratio {r} outside [{am} - {tol}, {ap} + {tol}]",
                payload={"curve": (str(E.a), str(E.b)), "ratio": r})
    if abs(lo - am) > tol or abs(hi - ap) > tol:
        raise ScalingViolation(
            "extreme ratios do not witness the window endpoints",
            payload={"low": lo, "high": hi})
    return ScalingReport(alpha_minus=am, alpha_plus=ap, ratios=ratios,
                         extreme_low=lo, extreme_high=hi)


@dataclass
class IsogenyReport:
    factor: float
    worst: float
    checked: int


def verify_isogeny_identity(E1, phi, E2, m1, m2, points, tol=1e-3) -> IsogenyReport:
    """|hhat_{E2, m2(O)}(phi P) - (m2/m1) * deg(phi) * hhat_{E1, m1(O)}(P)| < tol."""
    m1, m2 = int(m1), int(m2)
    if m1 <= 0 or m2 <= 0:
        raise MalformedInput("divisor degrees must be positive")
    factor = Fraction(m2, m1) * phi.degree
    inner = tol / (8 * max(m1, m2) * phi.degree)
    worst = 0.0
    for P in points:
        h1 = canonical_height(E1, P, inner)
        h2 = canonical_height(E2, phi(P), inner)
        lhs = m2 * h2.value
        rhs = float(factor) * m1 * h1.value
        gap = abs(lhs - rhs)
        worst = max(worst, float(gap))
        if not gap < tol:
            raise IdentityViolation(
                f"isogeny identity off by {float(gap)}",
                payload={"point": (str(P.x), str(P.y)), "gap": float(gap)})
    return IsogenyReport(factor=float(factor), worst=worst, checked=len(points))


def nonample_ratio_search(E, P, bound, tol=1e-4, max_k=24):
    """Witness that for D = pi1*(O) - pi2*(O) and g(P1,P2) = (2 P1, P2) the
    height ratio is unbounded: find a pair with ratio > bound.

    Uses pairs ([k]P, [k-1]P); the ratio (4 hk - hk1)/(hk - hk1) grows
    linearly in k.  Returns (k, ratio).
    """
    _require_on_curve(E, P)
    if is_torsion(E, P):
        raise MalformedInput("need a non-torsion point")
    for k in range(2, max_k + 1):
        hk = canonical_height(E, mul(E, P, k), tol).value
        hk1 = canonical_height(E, mul(E, P, k - 1), tol).value
        den = hk - hk1
        if den <= 0:
            continue
        ratio = float((4 * hk - hk1) / den)
        if ratio > bound:
            return k, ratio
    raise MalformedInput(f"bound {bound} not exceeded up to k = {max_k}")
