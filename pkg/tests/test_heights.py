import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from abelia import heights, linalg
from abelia.errors import MalformedInput, SearchBudgetExceeded
from abelia.heights import AlgebraicScalar, RationalMatrix
from abelia.intpoly import IntPolynomial

SQRT2 = AlgebraicScalar.from_minpoly(IntPolynomial([-2, 0, 1]), 1.4)
IMAG = AlgebraicScalar.from_minpoly(IntPolynomial([1, 0, 1]), 1j)


# --- independent oracle: place-by-place affine height ----------------------

def _primes_below(n):
    sieve = [True] * n
    out = []
    for p in range(2, n):
        if sieve[p]:
            out.append(p)
            for q in range(p * p, n, p):
                sieve[q] = False
    return out


def h_aff_oracle(entries):
    """prod over places of max(1, max_ij |m|_v), primes by trial division."""
    relevant = set()
    for e in entries:
        for n in (abs(e.numerator), e.denominator):
            for p in _primes_below(2000):
                while n % p == 0 and n > 1:
                    relevant.add(p)
                    n //= p
            assert n <= 1, "oracle needs smooth test data"
    total = Fraction(max(1, max(abs(e) for e in entries)))
    for p in sorted(relevant):
        worst = min(min((_ord(e.numerator, p) if e.numerator else 10 ** 9)
                        - _ord(e.denominator, p) for e in entries), 0)
        total *= Fraction(p) ** (-worst)
    return total


def _ord(n, p):
    n, e = abs(n), 0
    while n and n % p == 0:
        n //= p
        e += 1
    return e


def test_weil_height_examples():
    assert heights.weil_height(Fraction(3, 2)) == 3
    assert heights.weil_height(Fraction(-7, 12)) == 12
    assert heights.weil_height(0) == 1
    assert abs(heights.weil_height(SQRT2) - mp.sqrt(2)) < 1e-30
    assert abs(heights.weil_height(IMAG) - 1) < 1e-30


def test_mahler_examples():
    assert abs(heights.mahler_measure(IntPolynomial([-2, 0, 1])) - 2) < 1e-30
    assert abs(heights.mahler_measure(IntPolynomial([-3, 1])) - 3) < 1e-30
    assert abs(heights.mahler_measure(IntPolynomial([-1, 2])) - 2) < 1e-30
    with pytest.raises(MalformedInput):
        heights.mahler_measure(IntPolynomial([]))


def test_h_aff_examples():
    M = RationalMatrix.from_lists([[Fraction(1, 2), 3], [0, 1]])
    assert heights.h_aff(M) == 6
    assert heights.h_aff(M) == h_aff_oracle(M.entries)
    assert heights.h_aff(RationalMatrix.from_lists([[1, 0], [0, 1]])) == 1
    assert heights.h_aff(RationalMatrix.from_lists([[2, 5], [7, 1]])) == 7


def test_h_max_examples():
    M = RationalMatrix.from_lists([[Fraction(1, 2), 3], [0, 1]])
    assert heights.h_max(M) == 3
    assert heights.h_max(RationalMatrix.from_lists([[1, 0], [0, 1]])) == 1
    assert heights.h_max(RationalMatrix.from_lists([[-4]])) == 4


@given(st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=50),
                min_size=4, max_size=4))
@settings(max_examples=60, deadline=None)
def test_h_aff_matches_oracle(entries):
    M = RationalMatrix(2, 2, entries)
    assert heights.h_aff(M) == h_aff_oracle(M.entries)


def _brute_h_d(a: AlgebraicScalar, d):
    """Direct minimal max-norm search, independent of heights.h_d."""
    best = None
    bound = 1
    while best is None and bound < 64:
        for vec in _vectors(d + 1, bound):
            if not any(vec):
                continue
            if a.kind == "rational":
                val = sum(c * a.value ** i for i, c in enumerate(vec))
                ok = val == 0
            else:
                rem = _poly_mod(vec, a.minpoly)
                ok = not any(rem)
            if ok:
                best = bound
                break
        bound += 1
    return best


def _vectors(length, norm):
    import itertools
    for vec in itertools.product(range(-norm, norm + 1), repeat=length):
        if max(abs(c) for c in vec) == norm:
            yield vec


def _poly_mod(vec, m):
    num = [Fraction(c) for c in vec]
    den = [Fraction(c) for c in m.coefficients]
    while len(num) >= len(den):
        if num[-1] == 0:
            num.pop()
            continue
        f = num[-1] / den[-1]
        shift = len(num) - len(den)
        for i, c in enumerate(den):
            num[shift + i] -= f * c
        num.pop()
    return num


def test_h_d_examples():
    assert heights.h_d(SQRT2, 2) == 2
    assert heights.h_d(AlgebraicScalar.from_rational(Fraction(3, 2)), 1) == 3
    assert heights.h_d(SQRT2, 1) == math.inf
    assert heights.h_d(IMAG, 2) == 1
    golden = AlgebraicScalar.from_minpoly(IntPolynomial([-1, -1, 1]), 1.6)
    assert heights.h_d(golden, 2) == 1


@pytest.mark.parametrize("coeffs,root,d", [
    ([-2, 0, 1], 1.4, 2),
    ([-1, -1, 1], 1.6, 2),
    ([3, -5, 1], 4.3, 2),
    ([-5, 0, 2], 1.6, 2),
    ([-2, 0, 1], 1.4, 3),
])
def test_h_d_matches_brute_force(coeffs, root, d):
    a = AlgebraicScalar.from_minpoly(IntPolynomial(coeffs), root)
    assert heights.h_d(a, d) == _brute_h_d(a, d)


def test_h_d_budget():
    big = AlgebraicScalar.from_minpoly(IntPolynomial([-997, 0, 998]), 1.0)
    with pytest.raises(SearchBudgetExceeded):
        heights.h_d(big, 3, budget=10 ** 4)


def test_h_d_lemma_bounds():
    for a, d in [(SQRT2, 2), (IMAG, 2), (SQRT2, 3),
                 (AlgebraicScalar.from_minpoly(IntPolynomial([3, -5, 1]), 4.3), 2)]:
        val = heights.h_d(a, d)
        H = heights.weil_height(a)
        assert val <= 2 ** d * H ** d * (1 + 1e-25)
        assert abs(a.root) <= math.sqrt(d + 1) * val * (1 + 1e-25)


def test_algebraic_scalar_validation():
    with pytest.raises(MalformedInput):
        AlgebraicScalar.from_minpoly(IntPolynomial([2, 3, 1]), -1.0)  # reducible
    with pytest.raises(MalformedInput):
        AlgebraicScalar.from_minpoly(IntPolynomial([1, 0, 0, 0, 0, 1]), -1.0)
    with pytest.raises(MalformedInput):
        AlgebraicScalar.from_minpoly(IntPolynomial([-4, 0, 2]), 1.4)  # imprimitive
    # the approximation selects which root is meant
    plus = AlgebraicScalar.from_minpoly(IntPolynomial([-2, 0, 1]), 1.4)
    minus = AlgebraicScalar.from_minpoly(IntPolynomial([-2, 0, 1]), -1.4)
    assert abs(plus.root - mp.sqrt(2)) < 1e-30
    assert abs(minus.root + mp.sqrt(2)) < 1e-30
    # degree-1 polynomial collapses to the rational kind
    r = AlgebraicScalar.from_minpoly(IntPolynomial([-3, 2]), 1.5)
    assert r.kind == "rational" and r.value == Fraction(3, 2)


frac = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000)


@given(st.integers(2, 4), st.data())
@settings(max_examples=40, deadline=None)
def test_matrix_height_inequalities(n, data):
    A = [[data.draw(frac) for _ in range(n)] for _ in range(n)]
    B = [[data.draw(frac) for _ in range(n)] for _ in range(n)]
    MA, MB = RationalMatrix.from_lists(A), RationalMatrix.from_lists(B)
    hmax_a, haff_a = heights.h_max(MA), heights.h_aff(MA)
    hmax_b = heights.h_max(MB)
    assert hmax_a <= haff_a <= hmax_a ** (n * n)
    hs = heights.h_max(RationalMatrix.from_lists(linalg.mat_add(A, B)))
    assert hs <= 2 * hmax_a * hmax_b
    hp = heights.h_max(RationalMatrix.from_lists(linalg.mat_mul(A, B)))
    assert hp <= n * hmax_a ** n * hmax_b ** n
    det = linalg.det_exact(A)
    assert heights.weil_height(det) <= math.factorial(n) * haff_a ** n
    if det != 0:
        hi = heights.h_max(RationalMatrix.from_lists(linalg.inverse_exact(A)))
        assert hi <= math.factorial(n) * math.factorial(n - 1) \
            * haff_a ** (2 * n - 1)
