"""Exact univariate polynomials over Z and Q.

Coefficients are stored constant term first.  Everything here is exact
arithmetic on Python ints / fractions; the numeric layer lives in roots.py.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import MalformedInput, NotAPerfectSquare


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients[i] multiplying x**i."""

    coefficients: tuple

    def __init__(self, coefficients):
        coeffs = [int(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self):
        return len(self.coefficients) - 1  # -1 for the zero polynomial

    @property
    def is_zero(self):
        return not self.coefficients

    @property
    def leading(self):
        if self.is_zero:
            raise MalformedInput("zero polynomial has no leading coefficient")
        return self.coefficients[-1]

    def __call__(self, x):
        acc = 0 * x if not isinstance(x, (int, Fraction)) else 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self):
        return IntPolynomial([i * c for i, c in enumerate(self.coefficients)][1:])

    def content(self):
        return math.gcd(*(abs(c) for c in self.coefficients)) if self.coefficients else 0

    def primitive(self):
        """Primitive part with positive leading coefficient."""
        if self.is_zero:
            return self
        g = self.content()
        if self.leading < 0:
            g = -g
        return IntPolynomial([c // g for c in self.coefficients])

    def max_norm(self):
        return max(abs(c) for c in self.coefficients) if self.coefficients else 0

    def __mul__(self, other):
        if self.is_zero or other.is_zero:
            return IntPolynomial([])
        out = [0] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return IntPolynomial(out)

    def __eq__(self, other):
        return isinstance(other, IntPolynomial) and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"IntPolynomial({list(self.coefficients)})"


def from_fractions(coeffs):
    """Clear denominators of rational coefficients; primitive, positive leading."""
    fracs = [Fraction(c) for c in coeffs]
    while fracs and fracs[-1] == 0:
        fracs.pop()
    if not fracs:
        return IntPolynomial([])
    den = math.lcm(*(f.denominator for f in fracs))
    return IntPolynomial([int(f * den) for f in fracs]).primitive()


# ---------------------------------------------------------------------------
# exact arithmetic over Q (coefficient lists of Fractions, constant first)

def _q(poly):
    return [Fraction(c) for c in poly.coefficients]


def _qtrim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _qdivmod(num, den):
    num = list(num)
    q = [Fraction(0)] * max(0, len(num) - len(den) + 1)
    while len(num) >= len(den) and any(num):
        if num[-1] == 0:
            num.pop()
            continue
        shift = len(num) - len(den)
        factor = num[-1] / den[-1]
        q[shift] = factor
        for i, d in enumerate(den):
            num[shift + i] -= factor * d
        num.pop()
    return _qtrim(q), _qtrim(num)


def poly_divmod(f, g):
    """Exact (quotient, remainder) over Q, both primitive IntPolynomials scaled
    apart: returns the pair as Fraction lists."""
    return _qdivmod(_q(f), _q(g))


def poly_gcd(f, g):
    """Monic gcd over Q, returned as primitive IntPolynomial."""
    a, b = _q(f), _q(g)
    while b:
        _, r = _qdivmod(a, b)
        a, b = b, r
    if not a:
        return IntPolynomial([])
    return from_fractions(a)


def squarefree_decomposition(f):
    """Yun's algorithm.  Returns [(g1, 1), (g2, 2), ...] with f ~ prod gi^i up
    to a rational constant; parts are primitive with positive leading coeff."""
    if f.is_zero or f.degree == 0:
        return []
    out = []
    fp = f.derivative()
    a = poly_gcd(f, fp)
    b, _ = _qdivmod(_q(f), _q(a))
    c, _ = _qdivmod(_q(fp), _q(a))
    d = _qtrim([ci - di for ci, di in itertools.zip_longest(
        c, _qderiv(b), fillvalue=Fraction(0))])
    i = 1
    while True:
        bpoly = from_fractions(b)
        if bpoly.degree < 1:
            break
        g = poly_gcd(bpoly, from_fractions(d) if d else IntPolynomial([]))
        if g.is_zero:
            g = bpoly
        if g.degree >= 1:
            out.append((g, i))
        b, _ = _qdivmod(b, _q(g))
        quot, _ = _qdivmod(d, _q(g)) if d else ([], [])
        d = _qtrim([ci - di for ci, di in itertools.zip_longest(
            quot, _qderiv(b), fillvalue=Fraction(0))])
        i += 1
    return out


def _qderiv(c):
    return [i * ci for i, ci in enumerate(c)][1:]


def squarefree_part(f):
    parts = squarefree_decomposition(f)
    acc = IntPolynomial([1])
    for g, _ in parts:
        acc = acc * g
    return acc.primitive()


def poly_square_root(f):
    """Exact square root of a rational-coefficient polynomial given as an
    IntPolynomial times a positive rational square; raises NotAPerfectSquare.

    Input must have even degree and positive leading coefficient that is a
    rational square times content.  Returns the primitive integer polynomial
    proportional to the monic square root.
    """
    if f.is_zero:
        return IntPolynomial([])
    if f.degree % 2 != 0 or f.leading < 0:
        raise NotAPerfectSquare(f"degree {f.degree} / sign does not admit a square root")
    n = f.degree // 2
    fq = _q(f)
    lead = fq[-1]
    # monic normalization: sqrt(f/lead) computed top-down, then re-scaled
    fq = [c / lead for c in fq]
    q = [Fraction(0)] * (n + 1)
    q[n] = Fraction(1)
    for k in range(n - 1, -1, -1):
        # coefficient of x^(n+k) in q^2 must match fq[n+k]
        s = sum(q[i] * q[n + k - i] for i in range(k + 1, n) if 0 <= n + k - i <= n)
        q[k] = (fq[n + k] - s) / 2
    sq = _qtrim([sum(q[i] * q[j - i] for i in range(max(0, j - n), min(j, n) + 1))
                 for j in range(2 * n + 1)])
    if sq != fq:
        raise NotAPerfectSquare("polynomial is not a perfect square")
    return from_fractions(q)


# ---------------------------------------------------------------------------
# Sturm sequences and exact real root location

def sturm_sequence(f):
    seq = [_q(f), _q(f.derivative())]
    while seq[-1]:
        _, r = _qdivmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_at(coeffs, x):
    v = Fraction(0)
    for c in reversed(coeffs):
        v = v * x + c
    return (v > 0) - (v < 0)


def _sign_at_inf(coeffs, positive):
    lead = coeffs[-1]
    s = (lead > 0) - (lead < 0)
    if not positive and (len(coeffs) - 1) % 2 == 1:
        s = -s
    return s


def _variations(signs):
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(f, lo=None, hi=None):
    """Number of distinct real roots in (lo, hi]; None means -/+ infinity.

    Endpoints must not be roots of f when finite and open/closed subtleties
    matter; callers here always check f(endpoint) separately.
    """
    f = squarefree_part(f)
    if f.degree < 1:
        return 0
    seq = sturm_sequence(f)
    lo_signs = [_sign_at_inf(s, False) if lo is None else _sign_at(s, Fraction(lo))
                for s in seq]
    hi_signs = [_sign_at_inf(s, True) if hi is None else _sign_at(s, Fraction(hi))
                for s in seq]
    return _variations(lo_signs) - _variations(hi_signs)


def root_bound(f):
    """Cauchy bound: all complex roots have |z| <= bound (a Fraction)."""
    lead = abs(f.leading)
    return 1 + max(Fraction(abs(c), lead) for c in f.coefficients)


def isolate_real_roots(f, precision=Fraction(1, 10**12)):
    """Disjoint rational intervals (a, b], one per distinct real root, each of
    width <= precision.  Exact bisection on the Sturm count."""
    f = squarefree_part(f)
    total = count_roots(f)
    if total == 0:
        return []
    bound = root_bound(f)
    lo, hi = -bound - 1, bound
    work = [(lo, hi, count_roots(f, lo, hi))]
    done = []
    while work:
        a, b, n = work.pop()
        if n == 0:
            continue
        if n == 1 and b - a <= precision:
            done.append((a, b))
            continue
        mid = (a + b) / 2
        if f(mid) == 0:
            # nudge the split point off the root
            mid += min(precision, b - a) / 7
        nl = count_roots(f, a, mid)
        work.append((a, mid, nl))
        work.append((mid, b, n - nl))
    done.sort()
    assert len(done) == total
    return done


# ---------------------------------------------------------------------------
# irreducibility over Q for degree <= 4

def _divisors(n):
    n = abs(n)
    out = set()
    for i in range(1, math.isqrt(n) + 1):
        if n % i == 0:
            out.add(i)
            out.add(n // i)
    return sorted(out)


def has_rational_root(f):
    if f.coefficients[0] == 0:
        return True
    for p in _divisors(f.coefficients[0]):
        for q in _divisors(f.leading):
            for s in (1, -1):
                if f(Fraction(s * p, q)) == 0:
                    return True
    return False


def is_irreducible(f):
    """Irreducibility over Q for primitive f with deg(f) <= 4 and positive
    leading coefficient.  Raises MalformedInput on higher degree."""
    if f.is_zero or f.degree == 0:
        return False
    if f.degree == 1:
        return True
    if f.degree > 4:
        raise MalformedInput("irreducibility test implemented for degree <= 4 only")
    if has_rational_root(f):
        return False
    if f.degree <= 3:
        return True
    # degree 4, no linear factor: search integer quadratic factorizations
    c0, c1, c2, c3, c4 = f.coefficients
    # Mignotte-style bound on factor coefficients, used in the degenerate branch
    l2 = math.isqrt(sum(c * c for c in f.coefficients)) + 1
    ebound = 16 * l2
    for a in _divisors(c4):
        d = c4 // a
        for cc in _divisors(c0):
            for cs in (cc, -cc):
                if c0 % cs != 0:
                    continue
                g = c0 // cs
                # (a x^2 + b x + cs)(d x^2 + e x + g)
                det = d * cs - a * g
                if det != 0:
                    bnum = c3 * cs - a * c1
                    enum = d * c1 - c3 * g
                    if bnum % det or enum % det:
                        continue
                    b, e = bnum // det, enum // det
                    if a * g + b * e + cs * d == c2:
                        return False
                else:
                    for e in range(-ebound, ebound + 1):
                        rem = c3 - a * e
                        if rem % d:
                            continue
                        b = rem // d
                        if (a * g + b * e + cs * d == c2
                                and b * g + cs * e == c1):
                            return False
    return True
