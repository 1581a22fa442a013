import random
from fractions import Fraction

import pytest
from mpmath import mp

from abelia import linalg, siegel
from abelia.errors import MalformedInput, SingularCocycle
from abelia.siegel import (SiegelPoint, SymplecticMatrix, act,
                           boundary_matrices, delta_constants, membership,
                           reduce)

S1 = SymplecticMatrix([[0, -1], [1, 0]])


def _pt(*diag):
    return SiegelPoint.diag([mp.mpc(z) for z in diag])


def test_symplectic_validation():
    SymplecticMatrix.identity(2)
    with pytest.raises(MalformedInput):
        SymplecticMatrix([[1, 1], [1, 1]])
    with pytest.raises(MalformedInput):
        SymplecticMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    s = SymplecticMatrix([[1, 5], [0, 1]])
    assert (s * s.inverse()).is_identity()
    assert s.transpose().rows == ((1, 0), (5, 1))


def test_siegel_point_validation():
    _pt(1j)
    with pytest.raises(MalformedInput):
        _pt(-1j)  # negative imaginary part
    m = mp.matrix(2)
    m[0, 0] = mp.mpc(0, 1)
    m[1, 1] = mp.mpc(0, 1)
    m[0, 1] = mp.mpc(5, 0)  # breaks positive definiteness? no: asymmetric
    m[1, 0] = mp.mpc(0, 0)
    with pytest.raises(MalformedInput):
        SiegelPoint(m)


def test_act_examples():
    out = act(S1, _pt(2j))
    assert abs(out.tau[0, 0] - mp.mpc(0, 0.5)) < 1e-35
    out = act(SymplecticMatrix([[1, 5], [0, 1]]), _pt(1j))
    assert abs(out.tau[0, 0] - mp.mpc(5, 1)) < 1e-35
    out = act(SymplecticMatrix.identity(2), _pt(1j, 2j))
    assert abs(out.tau[0, 0] - mp.mpc(0, 1)) < 1e-35
    assert abs(out.tau[1, 1] - mp.mpc(0, 2)) < 1e-35


def test_act_imaginary_transform():
    """Im(sigma tau) = ((C tau + D)^t)^-1 Im(tau) (C conj(tau) + D)^-1."""
    rng = random.Random(5)
    from abelia.abelian import random_symplectic
    for g in (1, 2):
        for _ in range(5):
            sig = random_symplectic(g, rng)
            tau = _rand_point(rng, g)
            out = act(sig, tau)
            C = linalg.to_mp(sig.C)
            D = linalg.to_mp(sig.D)
            CD = C * tau.tau + D
            CDbar = C * _conj(tau.tau) + D
            expect = (CD.T) ** -1 * tau.imag() * CDbar ** -1
            assert linalg.minf(out.imag() - expect) < mp.mpf(2) ** (-tau.prec + 20)


def _conj(m):
    out = mp.matrix(m.rows, m.cols)
    for i in range(m.rows):
        for j in range(m.cols):
            out[i, j] = mp.conj(m[i, j])
    return out


def _rand_point(rng, g, prec=128):
    with mp.workprec(prec):
        X = mp.matrix(g)
        L = mp.matrix(g)
        for i in range(g):
            for j in range(i + 1):
                X[i, j] = X[j, i] = mp.mpf(rng.uniform(-2, 2))
                L[i, j] = mp.mpf(rng.uniform(-1, 1))
            L[i, i] = mp.mpf(rng.uniform(0.3, 2))
        Y = L * L.T
        m = mp.matrix(g)
        for i in range(g):
            for j in range(g):
                m[i, j] = mp.mpc(X[i, j], Y[i, j])
        return SiegelPoint(m, prec=prec)


def test_singular_cocycle():
    with pytest.raises(SingularCocycle):
        # C tau + D = tau vanishes at... build tau with tiny imaginary part
        # instead use sigma = S and tau near 0: |tau| below cutoff impossible
        # for a valid point, so use a direct small-determinant case
        act(S1, SiegelPoint.diag([mp.mpc(0, mp.mpf(2) ** -125)]))


# --- the genus-2 boundary set ------------------------------------------------

def _z2(z1, z2, z3):
    m = mp.matrix(2)
    m[0, 0], m[1, 1] = z1, z3
    m[0, 1] = m[1, 0] = z2
    return m


BOUNDARY_FUNCTIONS = [
    lambda z1, z2, z3: z1,
    lambda z1, z2, z3: z3,
    lambda z1, z2, z3: z1 * z3 - z2 ** 2,
    lambda z1, z2, z3: z1 * z3 - z2 ** 2 + z1,
    lambda z1, z2, z3: z1 * z3 - z2 ** 2 - z1,
    lambda z1, z2, z3: z1 * z3 - z2 ** 2 + z3,
    lambda z1, z2, z3: z1 * z3 - z2 ** 2 + z3 + z1 + 1,
    lambda z1, z2, z3: z1 * z3 - z2 ** 2 + z3 - z1 - 1,
    lambda z1, z2, z3: z1 * z3 - z2 ** 2 - z3,
    lambda z1, z2, z3: z1 * z3 - z2 ** 2 - z3 + z1 - 1,
    lambda z1, z2, z3: z1 * z3 - z2 ** 2 - z3 - z1 + 1,
    lambda z1, z2, z3: z1 + z3 - 2 * z2 + 1,
    lambda z1, z2, z3: z1 + z3 - 2 * z2 - 1,
    lambda z1, z2, z3: z1 + z3 - 2 * z2,
    lambda z1, z2, z3: z1 + z3 + 2 * z2 + 1,
    lambda z1, z2, z3: z1 + z3 + 2 * z2 - 1,
    lambda z1, z2, z3: z1 + z3 + 2 * z2,
    lambda z1, z2, z3: z1 * z3 - z2 ** 2 - 2 * z2 - 1,
    lambda z1, z2, z3: z1 * z3 - z2 ** 2 + 2 * z2 - 1,
]


def test_gottschling_set_shape():
    mats = boundary_matrices(2)
    assert len(mats) == 19
    # all exactly symplectic (construction validates), pairwise distinct
    assert len({m.rows for m in mats}) == 19
    # cocycle determinants realize the documented boundary functions
    samples = [(mp.mpc("0.31", "1.7"), mp.mpc("0.11", "0.4"), mp.mpc("-0.2", "2.3")),
               (mp.mpc("-1.2", "0.8"), mp.mpc("0.7", "0.1"), mp.mpc("0.5", "1.9"))]
    for z1, z2, z3 in samples:
        Z = _z2(z1, z2, z3)
        for mat, fn in zip(mats, BOUNDARY_FUNCTIONS):
            C = linalg.to_mp(mat.C)
            D = linalg.to_mp(mat.D)
            got = mp.det(C * Z + D)
            assert abs(got - fn(z1, z2, z3)) < 1e-30


def test_boundary_sets_other_genera():
    assert len(boundary_matrices(1)) == 1
    assert len(boundary_matrices(3)) == 4
    with pytest.raises(MalformedInput):
        boundary_matrices(4)


# --- membership ---------------------------------------------------------------

def test_membership_examples():
    rep = membership(_pt(1j))
    assert rep.re_bound_ok and rep.minkowski_ok and rep.boundary_ok
    assert abs(rep.worst_margin) < 1e-12  # on the |Z| = 1 boundary
    rep = membership(_pt(mp.mpc("0.6", "0.8")))
    assert not rep.re_bound_ok
    rep = membership(_pt(1j, 2j))
    assert rep.re_bound_ok and rep.minkowski_ok and rep.boundary_ok
    assert rep.checked_cosets == 19


# --- reduction ----------------------------------------------------------------

def _reduce_g1_oracle(z):
    """Classical genus-1 reduction with plain complex arithmetic."""
    z = complex(z)
    for _ in range(200):
        z = complex(z.real - round(z.real), z.imag)
        if abs(z) < 1 - 1e-15:
            z = -1 / z
        else:
            break
    return z


def test_reduce_g1_examples():
    Z, sig = reduce(_pt(mp.mpc(5, 1)))
    assert abs(Z.tau[0, 0] - mp.mpc(0, 1)) < 1e-30
    assert sig.rows == ((1, 5), (0, 1))
    Z, sig = reduce(_pt(mp.mpc("0.3", "0.4")))
    assert abs(Z.tau[0, 0] - mp.mpc("-0.2", "1.6")) < 1e-30
    oracle = _reduce_g1_oracle(0.3 + 0.4j)
    assert abs(complex(Z.tau[0, 0]) - oracle) < 1e-12


def test_reduce_g1_matches_oracle_bulk():
    rng = random.Random(11)
    for _ in range(50):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.05, 3))
        Z, sig = reduce(SiegelPoint.diag([mp.mpc(z.real, z.imag)]))
        oracle = _reduce_g1_oracle(z)
        got = complex(Z.tau[0, 0])
        # both in the fundamental domain and equal up to the boundary seam
        assert abs(got.imag - oracle.imag) < 1e-9
        assert abs(abs(got.real) - abs(oracle.real)) < 1e-9


def test_reduce_g2_example():
    tau = _pt(1j, 2j)
    Z, sig = reduce(tau)
    assert sig.is_identity()
    assert linalg.minf(Z.tau - tau.tau) < 1e-35


def test_reduce_idempotent_and_residual():
    rng = random.Random(3)
    for g in (1, 2, 3):
        for _ in range(6):
            tau = _rand_point(rng, g)
            Z, sig = reduce(tau)
            back = act(sig, Z)
            assert linalg.minf(back.tau - tau.tau) < mp.mpf(10) ** -30
            rep = membership(Z, tol=1e-12)
            assert rep.re_bound_ok and rep.minkowski_ok and rep.boundary_ok
            Z2, sig2 = reduce(Z)
            assert linalg.minf(Z2.tau - Z.tau) < 1e-25
            ident = sig2.is_identity() or \
                sig2.rows == tuple(tuple(-x for x in r) for r in
                                   SymplecticMatrix.identity(g).rows)
            assert ident


def test_act_composition():
    from abelia.abelian import random_symplectic
    rng = random.Random(9)
    for g in (1, 2):
        for _ in range(8):
            s1 = random_symplectic(g, rng, max_entry=10)
            s2 = random_symplectic(g, rng, max_entry=10)
            tau = _rand_point(rng, g)
            lhs = act(s2, act(s1, tau))
            rhs = act(s2 * s1, tau)
            assert linalg.minf(lhs.tau - rhs.tau) < mp.mpf(2) ** (-128 + 24) \
                * (1 + (s2 * s1).max_norm()) ** 2 * 100


# --- delta constants ----------------------------------------------------------

def test_delta_examples_g1():
    d1, d2, d3, d4 = delta_constants(1, [SymplecticMatrix.identity(1)])
    assert d1 == 1
    assert d2 == 2.5
    assert abs(d3 - 2 * mp.sqrt(3) / 25) < 1e-30
    assert abs(d4 - 25 / (2 * mp.sqrt(3))) < 1e-30


def test_delta_examples_g2():
    d1, _, _, _ = delta_constants(2, [SymplecticMatrix.identity(2)])
    assert d1 == 400


def test_delta_identity_relation():
    for g in (1, 2, 3):
        d1, d2, d3, d4 = delta_constants(g, [SymplecticMatrix.identity(g)])
        lhs = d3 * d4
        rhs = mp.sqrt(mp.mpf(g) ** g) * mp.mpf(d1) ** (g - 1)
        assert abs(lhs - rhs) < 1e-25 * rhs


def test_delta_bound_inequalities():
    rng = random.Random(21)
    from abelia.abelian import random_symplectic
    for g in (1, 2):
        for _ in range(10):
            tau = _rand_point(rng, g)
            Z, sig = reduce(tau)
            cosets = [SymplecticMatrix.identity(g), sig]
            d1, d2, d3, d4 = delta_constants(g, cosets)
            mz = max(1, linalg.minf(Z.imag()))
            Yt, Xt = tau.imag(), tau.real()
            assert linalg.minf(Yt) <= d1 * mz ** (2 * g - 1)
            assert linalg.minf(Xt) <= d2 * mz ** g
            assert mp.det(Yt) >= d3 / mz ** (2 * g)
            assert linalg.minf(Yt ** -1) <= d4 * mz ** (2 * g * g - g + 1)
