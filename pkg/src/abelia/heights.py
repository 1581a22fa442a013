"""Multiplicative Weil heights of rationals, low-degree algebraic numbers and
rational matrices; Mahler measure; minimal-vector heights of bounded degree.

Everything that can be exact is exact (ints / Fractions); only d-th roots and
the Mahler measure return arbitrary-precision floats.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from . import intpoly, roots
from .errors import MalformedInput, SearchBudgetExceeded
from .intpoly import IntPolynomial

DEFAULT_SEARCH_BUDGET = 10 ** 6


@dataclass(frozen=True)
class AlgebraicScalar:
    """Exact rational, or an algebraic number of degree 2..4 given by its
    primitive integer minimal polynomial plus a root-selecting approximation."""

    kind: str                      # "rational" | "algebraic"
    value: Fraction | None = None
    minpoly: IntPolynomial | None = None
    root: object | None = None     # mpmath.mpc
    prec: int = 0

    @staticmethod
    def from_rational(q):
        return AlgebraicScalar(kind="rational", value=Fraction(q))

    @staticmethod
    def from_minpoly(minpoly, approx_root, prec=None):
        prec = prec or mp.prec
        poly = IntPolynomial(minpoly.coefficients if isinstance(minpoly, IntPolynomial)
                             else minpoly)
        if poly.is_zero or poly.degree < 1:
            raise MalformedInput("minimal polynomial must be non-constant")
        prim = poly.primitive()
        if prim.coefficients != poly.coefficients:
            raise MalformedInput("minimal polynomial must be primitive with positive "
                                 "leading coefficient")
        if poly.degree == 1:
            return AlgebraicScalar.from_rational(
                Fraction(-poly.coefficients[0], poly.coefficients[1]))
        if poly.degree > 4:
            raise MalformedInput("algebraic degree > 4 is not supported")
        if not intpoly.is_irreducible(poly):
            raise MalformedInput("minimal polynomial is reducible over Q")
        with mp.workprec(prec + 32):
            root = roots.refine_root(poly, approx_root, prec)
            resid = abs(poly(root))
        if resid >= mp.mpf(2) ** (-prec + 10):
            raise MalformedInput(
                f"root approximation residual {mp.nstr(resid, 8)} too large at "
                f"{prec} bits")
        return AlgebraicScalar(kind="algebraic", minpoly=poly, root=root, prec=prec)

    @property
    def degree(self):
        return 1 if self.kind == "rational" else self.minpoly.degree


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: tuple  # Fractions, row-major

    def __init__(self, rows, cols, entries):
        entries = tuple(Fraction(e) for e in entries)
        if rows <= 0 or cols <= 0 or len(entries) != rows * cols:
            raise MalformedInput("matrix dimensions do not match entry count")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    @staticmethod
    def from_lists(lists):
        rows = len(lists)
        cols = len(lists[0]) if rows else 0
        flat = [x for row in lists for x in row]
        return RationalMatrix(rows, cols, flat)

    def to_lists(self):
        return [list(self.entries[i * self.cols:(i + 1) * self.cols])
                for i in range(self.rows)]


def weil_height(a):
    """Multiplicative Weil height.  Exact int for rationals; mpf otherwise."""
    if isinstance(a, (int, Fraction)):
        a = AlgebraicScalar.from_rational(a)
    if a.kind == "rational":
        q = a.value
        return max(abs(q.numerator), q.denominator)
    m = mahler_measure(a.minpoly)
    return mp.root(m, a.minpoly.degree)


def mahler_measure(f: IntPolynomial):
    """|lead(f)| * prod max(1, |root|), from numerically located roots."""
    if f.is_zero:
        raise MalformedInput("Mahler measure of the zero polynomial")
    if f.degree == 0:
        return mp.mpf(abs(f.coefficients[0]))
    return roots.mahler_from_roots(f)


def h_aff(M: RationalMatrix):
    """Affine (projective-tuple) height of a rational matrix, exact.

    Clear denominators with b = lcm of entry denominators, reduce the common
    gcd, return max(b, max |cleared entry|).
    """
    b = math.lcm(*(e.denominator for e in M.entries))
    cleared = [int(e * b) for e in M.entries]
    g = math.gcd(b, *(abs(c) for c in cleared))
    b //= g
    cleared = [c // g for c in cleared]
    return max(b, max(abs(c) for c in cleared))


def h_max(M: RationalMatrix):
    """Entry-wise height: max over entries of the Weil height, exact."""
    return max(weil_height(e) for e in M.entries)


def _vanishes_maker(a, d):
    """Return a fast exact predicate 'vector (a0..ad) annihilates a'."""
    if a.kind == "rational":
        x = a.value
        powers = [x ** i for i in range(d + 1)]
        den = math.lcm(*(p.denominator for p in powers))
        ints = [int(p * den) for p in powers]

        def vanishes(vec):
            return sum(c * p for c, p in zip(vec, ints)) == 0
        return vanishes

    m = a.minpoly
    k = m.degree
    # powers of alpha reduced mod minpoly, scaled to a common integer grid
    pows = []
    cur = [Fraction(1)] + [Fraction(0)] * (k - 1)
    lead = Fraction(m.coefficients[-1])
    red = [Fraction(-c) / lead for c in m.coefficients[:-1]]  # x^k = red . (1..x^{k-1})
    for _ in range(d + 1):
        pows.append(list(cur))
        shifted = [Fraction(0)] + cur[:]  # multiply by x
        overflow = shifted.pop()          # coefficient of x^k
        cur = [s + overflow * r for s, r in zip(shifted, red)]
    den = math.lcm(*(c.denominator for p in pows for c in p))
    grids = [tuple(int(c * den) for c in p) for p in pows]

    def vanishes(vec):
        acc = [0] * k
        for c, g in zip(vec, grids):
            if c:
                for i in range(k):
                    acc[i] += c * g[i]
        return not any(acc)
    return vanishes


def h_d(a: AlgebraicScalar, d: int, budget=DEFAULT_SEARCH_BUDGET):
    """Minimal projective height of a nonzero integer vector (a_0..a_d) with
    a_0 + a_1*a + ... + a_d*a^d = 0; +inf when deg(a) > d.

    The primitive minimal polynomial gives the search ceiling; minimality is
    then confirmed by exhaustive enumeration below it.
    """
    if d < 1:
        raise MalformedInput("d must be >= 1")
    if a.degree > d:
        return math.inf
    if a.kind == "rational":
        q = a.value
        ceiling = max(abs(q.numerator), q.denominator)
    else:
        ceiling = a.minpoly.max_norm()
    if ceiling == 1:
        return 1
    span = 2 * (ceiling - 1) + 1
    if span ** (d + 1) > budget:
        raise SearchBudgetExceeded(
            f"{span ** (d + 1)} candidate vectors exceed budget {budget}")
    vanishes = _vanishes_maker(a, d)
    best = ceiling
    # enumerate vectors with max-norm <= ceiling-1, first nonzero positive
    rng = range(-(ceiling - 1), ceiling)
    for vec in itertools.product(rng, repeat=d + 1):
        norm = max(abs(c) for c in vec)
        if norm == 0 or norm >= best:
            continue
        if next(c for c in vec if c) < 0:
            continue
        if vanishes(vec):
            best = norm
    return best
