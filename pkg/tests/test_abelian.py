import random
from fractions import Fraction

import pytest
from mpmath import mp

from abelia import abelian, linalg, siegel
from abelia.abelian import (PolarizationType, PolarizedAV,
                            SIDE_LAMBDA_MINUS_PULLBACK,
                            SIDE_PULLBACK_MINUS_LAMBDA, alphas,
                            analytic_charpoly, chi_combination,
                            classify_divisor, norm_bound_constants,
                            product_embedding, rosati, sample_cm_variety,
                            trace_form, validate_endomorphism,
                            verify_norm_bounds)
from abelia.errors import (BoundViolation, MalformedInput, NotAHomomorphism,
                           NotAnEndomorphism)
from abelia.intpoly import IntPolynomial
from abelia.siegel import SiegelPoint, SymplecticMatrix

ROT = [[0, 1], [-1, 0]]


def _av_i():
    return PolarizedAV(SiegelPoint.diag([mp.mpc(0, 1)]), [1])


def _av_ee(n=2):
    tau = SiegelPoint.diag([mp.mpc(0, 1)] * n)
    return PolarizedAV(tau, [1] * n)


def _diag_endo(av, scalars):
    g = av.g
    M = [[0] * (2 * g) for _ in range(2 * g)]
    for i, s in enumerate(scalars):
        M[i][i] = s
        M[g + i][g + i] = s
    return validate_endomorphism(av, M)


def test_polarization_type():
    pt = PolarizationType([1, 2, 6])
    assert pt.degree == 12 and pt.chi == 12
    assert pt.e_matrix()[0][3] == 1 and pt.e_matrix()[3][0] == -1
    with pytest.raises(MalformedInput):
        PolarizationType([2, 3])
    with pytest.raises(MalformedInput):
        PolarizationType([0, 1])


def test_av_gram_determinant():
    av = PolarizedAV(SiegelPoint.diag([mp.mpc("0.5", "1.2"), mp.mpc(0, 2)]),
                     [1, 3])
    S = av.gram_matrix()
    assert abs(mp.det(S) - 9) < 1e-25


def test_validate_endomorphism_examples():
    av = _av_i()
    f = validate_endomorphism(av, ROT)
    assert abs(f.rho_a[0, 0] - mp.mpc(0, 1)) < 1e-30
    f5 = validate_endomorphism(av, [[5, 0], [0, 5]])
    assert abs(f5.rho_a[0, 0] - 5) < 1e-30
    av2 = PolarizedAV(SiegelPoint.diag([mp.mpc("0.3", "1.7")]), [1])
    with pytest.raises(NotAnEndomorphism):
        validate_endomorphism(av2, ROT)
    with pytest.raises(MalformedInput):
        validate_endomorphism(av, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_rosati_examples():
    av = _av_i()
    f = validate_endomorphism(av, ROT)
    assert rosati(f) == [[0, -1], [1, 0]]
    fn = validate_endomorphism(av, [[7, 0], [0, 7]])
    assert rosati(fn) == [[7, 0], [0, 7]]
    # involution
    fd = validate_endomorphism(av, rosati(f))
    assert rosati(fd) == [list(r) for r in f.rho_r]


def test_rosati_anti_involution_sampled():
    rng = random.Random(2)
    for g in (1, 2):
        av, basis = sample_cm_variety(g, seed=100 + g, conjugate=True)
        fa, fb = basis[0], basis[-1]
        lhs = rosati(fa.compose(fb))
        rhs = linalg.mat_mul(rosati(fb), rosati(fa))
        assert linalg.mat_eq(lhs, rhs)
        for f in basis:
            back = rosati(validate_endomorphism(av, rosati(f)))
            assert linalg.mat_eq(back, [list(r) for r in f.rho_r])


def test_trace_form_examples():
    av = _av_i()
    assert trace_form(validate_endomorphism(av, ROT)) == 2
    assert trace_form(_diag_endo(av, [4])) == 32  # 2g n^2 = 2*16
    g2 = _av_ee()
    assert trace_form(_diag_endo(g2, [3, 3])) == 36  # 2*2*9
    z = validate_endomorphism(g2, [[0] * 4] * 4)
    assert trace_form(z) == 0


def test_trace_form_nonprincipal():
    av = PolarizedAV(SiegelPoint.diag([mp.mpc(0, 1), mp.mpc(0, 2)]), [1, 2])
    f = _diag_endo(av, [3, 3])
    assert trace_form(f) == 36


def test_analytic_charpoly_examples():
    av = _av_i()
    f = validate_endomorphism(av, ROT)
    assert analytic_charpoly(f) == IntPolynomial([-1, 1])
    g2 = _av_ee()
    fn = _diag_endo(g2, [3, 3])
    assert analytic_charpoly(fn) == IntPolynomial([81, -18, 1])  # (x-9)^2
    fd = _diag_endo(g2, [1, 2])
    assert analytic_charpoly(fd) == IntPolynomial([4, -5, 1])  # (x-1)(x-4)


def test_alphas_examples():
    av = _av_i()
    sc = alphas(_diag_endo(av, [5]))
    assert abs(sc.alpha_minus - 25) < 1e-25 and abs(sc.alpha_plus - 25) < 1e-25
    g2 = _av_ee()
    sc = alphas(_diag_endo(g2, [1, 2]))
    assert abs(sc.alpha_minus - 1) < 1e-25
    assert abs(sc.alpha_plus - 4) < 1e-25
    assert sc.is_isogeny
    sc = alphas(_diag_endo(g2, [1, 0]))
    assert sc.alpha_minus == 0
    assert not sc.is_isogeny


def test_chi_combination_examples():
    av = _av_i()
    f2 = _diag_endo(av, [2])
    assert chi_combination(f2, 5, 1) == 1
    assert chi_combination(f2, 4, 1) == 0
    g2 = _av_ee()
    fn = _diag_endo(g2, [3, 3])
    for a, b in [(5, 1), (7, 2), (-3, 4), (81, 9)]:
        expect = Fraction(b) ** 2 * (Fraction(a, b) - 9) ** 2
        assert chi_combination(fn, a, b) == expect


def test_chi_combination_nonprincipal():
    av = PolarizedAV(SiegelPoint.diag([mp.mpc(0, 1), mp.mpc(0, 2)]), [1, 2])
    f = _diag_endo(av, [3, 3])
    # chi(L) = 2, both spectral values 9
    assert chi_combination(f, 10, 1) == 2 * (10 - 9) ** 2
    assert chi_combination(f, 9, 1) == 0


def test_classify_divisor_examples():
    av = _av_i()
    f2 = _diag_endo(av, [2])
    assert classify_divisor(f2, 5, 1, SIDE_LAMBDA_MINUS_PULLBACK) == "ample"
    assert classify_divisor(f2, 4, 1,
                            SIDE_LAMBDA_MINUS_PULLBACK) == "not_ample_boundary"
    assert classify_divisor(f2, 3, 1, SIDE_LAMBDA_MINUS_PULLBACK) == "not_ample"
    assert classify_divisor(f2, 3, 1, SIDE_PULLBACK_MINUS_LAMBDA) == "ample"
    assert classify_divisor(f2, 5, 1, SIDE_PULLBACK_MINUS_LAMBDA) == "not_ample"
    g2 = _av_ee()
    fd = _diag_endo(g2, [1, 2])
    assert classify_divisor(fd, 2, 1, SIDE_LAMBDA_MINUS_PULLBACK) == "not_ample"
    assert classify_divisor(fd, 2, 1, SIDE_PULLBACK_MINUS_LAMBDA) == "not_ample"
    # exact rational boundary with b > 1
    assert classify_divisor(fd, 8, 2,
                            SIDE_LAMBDA_MINUS_PULLBACK) == "not_ample_boundary"
    assert classify_divisor(fd, 9, 2, SIDE_LAMBDA_MINUS_PULLBACK) == "ample"
    assert classify_divisor(fd, 7, 2, SIDE_LAMBDA_MINUS_PULLBACK) == "not_ample"


def test_norm_bound_constants_examples():
    av = _av_i()
    Z, sig = siegel.reduce(av.tau)
    assert sig.is_identity()
    deltas = siegel.delta_constants(1, [SymplecticMatrix.identity(1)])
    nbc = norm_bound_constants(av, Z, deltas, identity_cosets=True)
    assert abs(nbc.c1 - Fraction(1, 2)) < 1e-35
    assert nbc.c2_sharper is not None
    assert abs(nbc.c2_sharper - Fraction(2048, 3)) < 1e-25
    assert nbc.c2 >= nbc.c1


def test_norm_bound_constants_g2():
    av = PolarizedAV(SiegelPoint.diag([mp.mpc(0, 1), mp.mpc(0, 2)]), [1, 1])
    Z, sig = siegel.reduce(av.tau)
    deltas = siegel.delta_constants(2, [SymplecticMatrix.identity(2)])
    nbc = norm_bound_constants(av, Z, deltas, identity_cosets=True)
    assert nbc.c2 > nbc.c1 > 0


def test_verify_norm_bounds():
    av = _av_i()
    Z, _ = siegel.reduce(av.tau)
    deltas = siegel.delta_constants(1, [SymplecticMatrix.identity(1)])
    nbc = norm_bound_constants(av, Z, deltas, identity_cosets=True)
    for mat in (ROT, [[3, 0], [0, 3]], [[2, 1], [-1, 2]]):
        f = validate_endomorphism(av, mat)
        rep = verify_norm_bounds(f, nbc.c1, nbc.c2)
        assert rep.lower_slack >= 0 and rep.upper_slack >= 0
    z = validate_endomorphism(av, [[0, 0], [0, 0]])
    with pytest.raises(MalformedInput):
        verify_norm_bounds(z, nbc.c1, nbc.c2)
    # an absurdly small c2 is reported as a violation with payload
    f = validate_endomorphism(av, ROT)
    with pytest.raises(BoundViolation) as exc:
        verify_norm_bounds(f, nbc.c1, 1e-9)
    assert "rho_r" in exc.value.payload


def test_product_embedding_examples():
    E1, E2 = _av_i(), _av_i()
    avP, F = product_embedding(E1, E2, [[1, 0], [0, 1]])
    assert abs(alphas(F).alpha_plus - 1) < 1e-25
    avP, F = product_embedding(E1, E2, [[2, 0], [0, 2]])
    assert abs(alphas(F).alpha_plus - 4) < 1e-25
    # 2-isogeny between distinct CM curves
    tA = PolarizedAV(SiegelPoint.diag([mp.mpc(0, mp.sqrt(2))]), [1])
    tB = PolarizedAV(SiegelPoint.diag([mp.mpc(0, 1 / mp.sqrt(2))]), [1])
    avP, F = product_embedding(tA, tB, [[2, 0], [0, 1]])
    sc = alphas(F)
    assert abs(sc.alpha_plus - 2) < 1e-25
    assert sc.alpha_plus > 0
    with pytest.raises(NotAHomomorphism):
        product_embedding(tA, tB, [[1, 0], [0, 1]])


def test_product_embedding_type_sorting():
    # A = C/(iZ + 2Z) of type (2), B = C/(iZ + Z) principal, phi = inclusion
    a = PolarizedAV(SiegelPoint.diag([mp.mpc(0, 1)]), [2])
    b = PolarizedAV(SiegelPoint.diag([mp.mpc(0, 1)]), [1])
    avP, F = product_embedding(a, b, [[1, 0], [0, 2]])
    assert avP.ptype.d == (1, 2)
    assert alphas(F).alpha_plus > 0


def test_sample_cm_variety():
    for g in (1, 2, 3):
        for seed in range(4):
            av, basis = sample_cm_variety(g, seed=seed)
            assert av.g == g
            assert len(basis) >= 2 * g
            for f in basis:
                assert trace_form(f) > 0 or f.is_zero()
    # g=1 with tau = i basis includes the rotation
    av, basis = sample_cm_variety(1, seed=0, conjugate=False)
    mats = {tuple(map(tuple, f.rho_r)) for f in basis}
    assert ((1, 0), (0, 1)) in mats


def test_sample_two_copies_has_swap_pieces():
    # two equal factors: the basis has rank 8 and contains both factor-swap
    # unit maps e_01, e_10, whose sum is the swap involution
    for seed in range(60):
        av, basis = sample_cm_variety(2, seed=seed, conjugate=False)
        if len(basis) == 8:
            mats = {tuple(map(tuple, f.rho_r)) for f in basis}
            e01 = ((0, 1, 0, 0), (0, 0, 0, 0), (0, 0, 0, 1), (0, 0, 0, 0))
            e10 = ((0, 0, 0, 0), (1, 0, 0, 0), (0, 0, 0, 0), (0, 0, 1, 0))
            assert e01 in mats and e10 in mats
            swap = validate_endomorphism(
                av, [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
            assert trace_form(swap) == 4
            return
    pytest.fail("no two-equal-factor sample found")


def test_conjugated_samples_validate():
    for seed in range(6):
        av, basis = sample_cm_variety(2, seed=seed, conjugate=True)
        for f in basis:
            validate_endomorphism(av, [list(r) for r in f.rho_r])
