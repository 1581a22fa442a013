"""Seeded invariant suites.

Each suite runs `trials` deterministic samples, sharded by (seed, shard
index), and returns a JSON-ready summary: per-invariant pass counts and the
worst observed slack.  A violation raises with a minimized reproduction
payload; the CLI maps that to exit code 1.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp

from . import abelian, elliptic, heights, intpoly, linalg, serialize, siegel
from .errors import BoundViolation, MalformedInput
from .heights import AlgebraicScalar, RationalMatrix
from .intpoly import IntPolynomial

SHARD_SIZE = 256


@dataclass
class RunConfig:
    precision_bits: int = 128
    tol_structural: float = 1e-9
    tol_heights: float = 1e-6
    seed: int = 0
    trials: int = 100
    search_budget: int = 10 ** 6
    doubling_budget: int = 12
    step_budget: int = 200

    def __post_init__(self):
        if self.precision_bits < 64:
            raise MalformedInput("precision must be at least 64 bits")
        if self.tol_structural <= 0 or self.tol_heights <= 0:
            raise MalformedInput("tolerances must be positive")


def _shards(config):
    """Deterministic (shard_index, rng, count) partition of the trials."""
    out = []
    left = config.trials
    idx = 0
    while left > 0:
        n = min(SHARD_SIZE, left)
        rng = random.Random((config.seed, idx))
        out.append((idx, rng, n))
        left -= n
        idx += 1
    return out


def _violation(suite, invariant, payload):
    raise BoundViolation(f"{suite}: invariant '{invariant}' violated",
                         payload={"suite": suite, "invariant": invariant,
                                  **payload})


@dataclass
class _Tally:
    passes: dict = field(default_factory=dict)
    worst: dict = field(default_factory=dict)

    def hit(self, name, slack=None):
        self.passes[name] = self.passes.get(name, 0) + 1
        if slack is not None:
            s = float(slack)
            if name not in self.worst or s < self.worst[name]:
                self.worst[name] = s

    def summary(self, extra=None):
        out = {"passes": dict(sorted(self.passes.items())),
               "worst_slack": {k: serialize.enc_real(v, 53)
                               for k, v in sorted(self.worst.items())}}
        if extra:
            out.update(extra)
        return out


# ---------------------------------------------------------------------------

def _rand_fraction(rng, bound=1000):
    num = rng.randint(-bound, bound)
    den = rng.randint(1, bound)
    return Fraction(num, den)


def suite_matrix_heights(config: RunConfig):
    """The five height inequalities for matrix operations, exactly."""
    t = _Tally()
    for _, rng, count in _shards(config):
        for _ in range(count):
            n = rng.randint(1, 4)
            A = [[_rand_fraction(rng) for _ in range(n)] for _ in range(n)]
            B = [[_rand_fraction(rng) for _ in range(n)] for _ in range(n)]
            MA = RationalMatrix.from_lists(A)
            MB = RationalMatrix.from_lists(B)
            hmax_a = heights.h_max(MA)
            haff_a = heights.h_aff(MA)
            hmax_b = heights.h_max(MB)
            payload = {"A": serialize.enc_rational_matrix(MA),
                       "B": serialize.enc_rational_matrix(MB)}
            if not hmax_a <= haff_a <= hmax_a ** (n * n):
                _violation("matrix-heights", "sandwich", payload)
            t.hit("sandwich", float(hmax_a ** (n * n) - haff_a))
            hs = heights.h_max(RationalMatrix.from_lists(linalg.mat_add(A, B)))
            if not hs <= 2 * hmax_a * hmax_b:
                _violation("matrix-heights", "sum", payload)
            t.hit("sum", float(2 * hmax_a * hmax_b - hs))
            hp = heights.h_max(RationalMatrix.from_lists(linalg.mat_mul(A, B)))
            if not hp <= n * hmax_a ** n * hmax_b ** n:
                _violation("matrix-heights", "product", payload)
            t.hit("product")
            det = linalg.det_exact(A)
            hdet = heights.weil_height(det)
            if not hdet <= math.factorial(n) * haff_a ** n:
                _violation("matrix-heights", "determinant", payload)
            t.hit("determinant")
            if det != 0:
                hi = heights.h_max(
                    RationalMatrix.from_lists(linalg.inverse_exact(A)))
                bound = (math.factorial(n) * math.factorial(n - 1)
                         * haff_a ** (2 * n - 1))
                if not hi <= bound:
                    _violation("matrix-heights", "inverse", payload)
                t.hit("inverse")
            # permutation / sign invariance
            perm = list(range(n * n))
            rng.shuffle(perm)
            shuffled = [MA.entries[i] for i in perm]
            MS = RationalMatrix(n, n, shuffled)
            MF = RationalMatrix(n, n, [-e for e in MA.entries])
            if heights.h_aff(MS) != haff_a or heights.h_max(MS) != hmax_a:
                _violation("matrix-heights", "permutation-invariance", payload)
            if heights.h_aff(MF) != haff_a or heights.h_max(MF) != hmax_a:
                _violation("matrix-heights", "sign-invariance", payload)
            t.hit("invariance")
    return t.summary()


def _rand_quadratic(rng, bound=20):
    """Random irreducible quadratic with |coeffs| <= bound."""
    while True:
        c2 = rng.randint(1, bound)
        c1 = rng.randint(-bound, bound)
        c0 = rng.randint(-bound, bound)
        p = IntPolynomial([c0, c1, c2]).primitive()
        if p.degree == 2 and intpoly.is_irreducible(p):
            return p


def suite_hd_oracle(config: RunConfig):
    """h_d equals the brute-force minimum and obeys both degree-d bounds."""
    t = _Tally()
    for _, rng, count in _shards(config):
        for _ in range(count):
            p = _rand_quadratic(rng)
            disc = p.coefficients[1] ** 2 - 4 * p.coefficients[0] * p.coefficients[2]
            re = -p.coefficients[1] / (2 * p.coefficients[2])
            im = math.sqrt(abs(disc)) / (2 * p.coefficients[2])
            approx = complex(re, im) if disc < 0 else complex(re + im, 0)
            a = AlgebraicScalar.from_minpoly(p, approx)
            # d = 3 only when the search ceiling keeps the brute force cheap
            d = 3 if (p.max_norm() <= 5 and rng.random() < 0.3) else 2
            val = heights.h_d(a, d, budget=config.search_budget)
            # independent oracle: degree-2 annihilators of a quadratic are
            # polynomial multiples of the minimal polynomial
            if d == 2:
                expect = p.max_norm()
                if val != expect:
                    _violation("hd-oracle", "quadratic-minimum", {
                        "minpoly": serialize.enc_polynomial(p), "got": int(val)})
            t.hit("minimum")
            H = heights.weil_height(a)
            if not val <= 2 ** d * H ** d * (1 + 1e-25):
                _violation("hd-oracle", "upper-bound", {
                    "minpoly": serialize.enc_polynomial(p)})
            t.hit("upper-bound", float(2 ** d * H ** d - val))
            if not abs(a.root) <= math.sqrt(d + 1) * val * (1 + 1e-25):
                _violation("hd-oracle", "root-bound", {
                    "minpoly": serialize.enc_polynomial(p)})
            t.hit("root-bound")
    return t.summary()


def _rand_siegel_point(rng, g, prec):
    with mp.workprec(prec):
        X = mp.matrix(g)
        L = mp.matrix(g)
        for i in range(g):
            for j in range(i + 1):
                v = mp.mpf(rng.uniform(-2, 2))
                X[i, j] = X[j, i] = v
                L[i, j] = mp.mpf(rng.uniform(-1.5, 1.5))
            L[i, i] = mp.mpf(rng.uniform(0.2, 2.0))
        Y = L * L.T
        m = mp.matrix(g)
        for i in range(g):
            for j in range(g):
                m[i, j] = mp.mpc(X[i, j], Y[i, j])
        return siegel.SiegelPoint(m, prec=prec)


def suite_siegel(config: RunConfig):
    """Reduction lands in the domain, the cocycle residual is tiny, the group
    action composes, and the four domain-constant bounds hold."""
    t = _Tally()
    prec = config.precision_bits
    for _, rng, count in _shards(config):
        for _ in range(count):
            g = rng.choice((1, 2))
            tau = _rand_siegel_point(rng, g, prec)
            Z, sig = siegel.reduce(tau, max_steps=config.step_budget)
            rep = siegel.membership(Z, tol=1e-12)
            payload = {"tau": serialize.enc_siegel_point(tau)}
            if not (rep.re_bound_ok and rep.minkowski_ok and rep.boundary_ok):
                _violation("siegel", "membership", payload)
            t.hit("membership", rep.worst_margin + 1e-12)
            with mp.workprec(prec):
                back = siegel.act(sig, Z)
                resid = linalg.minf(back.tau - tau.tau)
                if not resid < mp.mpf(10) ** -30:
                    _violation("siegel", "cocycle-residual",
                               {**payload, "residual": float(resid)})
                t.hit("cocycle-residual", 1e-30 - float(resid))
                # delta bounds for tau = sigma . Z
                cosets = [siegel.SymplecticMatrix.identity(g), sig]
                d1, d2, d3, d4 = siegel.delta_constants(g, cosets)
                mz = max(1, linalg.minf(Z.imag()))
                Yt = tau.imag()
                checks = [
                    ("delta1", d1 * mz ** (2 * g - 1) - linalg.minf(Yt)),
                    ("delta2", d2 * mz ** g - linalg.minf(tau.real())),
                    ("delta3", mp.det(Yt) - d3 / mz ** (2 * g)),
                    ("delta4", d4 * mz ** (2 * g * g - g + 1)
                     - linalg.minf(Yt ** -1)),
                ]
                for name, slack in checks:
                    if not slack >= 0:
                        _violation("siegel", name, payload)
                    t.hit(name, float(slack))
            # composition of the action
            s2 = abelian.random_symplectic(g, rng)
            with mp.workprec(prec):
                lhs = siegel.act(s2, siegel.act(sig, Z))
                rhs = siegel.act(s2 * sig, Z)
                resid = linalg.minf(lhs.tau - rhs.tau)
                if not resid < mp.mpf(2) ** (-prec + 24) * 16 ** g * (
                        1 + linalg.minf(Z.tau)) * (s2 * sig).max_norm() ** 2:
                    _violation("siegel", "composition",
                               {**payload, "residual": float(resid)})
                t.hit("composition")
    return t.summary()


def _sampled_endos(rng, av, basis, coeff_bound=10, count=4):
    """Basis elements plus random small integer combinations."""
    out = list(basis)
    for _ in range(count):
        coeffs = [rng.randint(-coeff_bound, coeff_bound) for _ in basis]
        if not any(coeffs):
            coeffs[0] = 1
        M = [[0] * (2 * av.g) for _ in range(2 * av.g)]
        for c, b in zip(coeffs, basis):
            if c:
                M = linalg.mat_add(M, [[c * x for x in row] for row in b.rho_r])
        out.append(abelian.validate_endomorphism(av, M))
    return out


def suite_rosati(config: RunConfig):
    """Involution, anti-multiplicativity, trace positivity/quadraticity, and
    det(S) = deg^2 on sampled CM products."""
    t = _Tally()
    prec = config.precision_bits
    for idx, rng, count in _shards(config):
        for k in range(count):
            g = rng.choice((1, 2, 3))
            av, basis = abelian.sample_cm_variety(
                g, seed=(config.seed, idx, k), prec=prec)
            with mp.workprec(prec):
                S = av.gram_matrix()
                d2 = mp.mpf(av.ptype.degree) ** 2
                resid = abs(mp.det(S) - d2) / d2
                if not resid < mp.mpf(10) ** -20:
                    _violation("rosati", "gram-determinant",
                               {"residual": float(resid)})
                t.hit("gram-determinant", 1e-20 - float(resid))
            endos = _sampled_endos(rng, av, basis, count=2)
            for f in endos:
                dag = abelian.rosati(f)
                ddag = abelian.rosati(abelian.validate_endomorphism(
                    av, dag)) if all(x.denominator == 1 for r in dag for x in r) \
                    else None
                if ddag is not None and not linalg.mat_eq(
                        ddag, [list(r) for r in f.rho_r]):
                    _violation("rosati", "involution",
                               {"rho_r": serialize.enc_int_matrix(f.rho_r)})
                t.hit("involution")
                if not f.is_zero():
                    tr = abelian.trace_form(f)
                    if not tr > 0:
                        _violation("rosati", "trace-positivity",
                                   {"rho_r": serialize.enc_int_matrix(f.rho_r)})
                    t.hit("trace-positivity", float(tr))
            fa, fb = endos[0], endos[1]
            lhs = abelian.rosati(fa.compose(fb))
            rhs = linalg.mat_mul(abelian.rosati(fb), abelian.rosati(fa))
            if not linalg.mat_eq(lhs, rhs):
                _violation("rosati", "anti-multiplicativity", {
                    "a": serialize.enc_int_matrix(fa.rho_r),
                    "b": serialize.enc_int_matrix(fb.rho_r)})
            t.hit("anti-multiplicativity")
            tr_s = abelian.trace_form(fa.add(fb)) + abelian.trace_form(
                abelian.validate_endomorphism(
                    av, linalg.mat_sub(fa.rho_r, fb.rho_r)))
            tr_2 = 2 * abelian.trace_form(fa) + 2 * abelian.trace_form(fb)
            if tr_s != tr_2:
                _violation("rosati", "parallelogram", {
                    "a": serialize.enc_int_matrix(fa.rho_r),
                    "b": serialize.enc_int_matrix(fb.rho_r)})
            t.hit("parallelogram")
    return t.summary()


def suite_norm_bounds(config: RunConfig):
    """c1 sqrt(tr) <= ||rho_r|| <= c2 sqrt(tr) across sampled endomorphisms."""
    t = _Tally()
    prec = config.precision_bits
    for idx, rng, count in _shards(config):
        for k in range(count):
            g = rng.choice((1, 2, 3))
            av, basis = abelian.sample_cm_variety(
                g, seed=(config.seed, idx, k), prec=prec)
            Z, sig = siegel.reduce(av.tau, max_steps=config.step_budget)
            cosets = [siegel.SymplecticMatrix.identity(g)]
            if not sig.is_identity():
                cosets.append(sig)
            deltas = siegel.delta_constants(g, cosets)
            nbc = abelian.norm_bound_constants(
                av, Z, deltas, identity_cosets=sig.is_identity())
            for f in _sampled_endos(rng, av, basis):
                rep = abelian.verify_norm_bounds(f, nbc.c1, nbc.c2)
                t.hit("two-sided", min(rep.lower_slack, rep.upper_slack))
                if nbc.c2_sharper is not None:
                    abelian.verify_norm_bounds(f, nbc.c1, nbc.c2_sharper)
                    t.hit("two-sided-sharper")
    return t.summary()


def suite_charpoly_square(config: RunConfig):
    """P^r is an exact polynomial square; spectral roots real, nonnegative,
    matching the analytic eigenvalues."""
    t = _Tally()
    prec = config.precision_bits
    for idx, rng, count in _shards(config):
        for k in range(count):
            g = rng.choice((1, 2, 3))
            av, basis = abelian.sample_cm_variety(
                g, seed=(config.seed, idx, k), prec=prec)
            for f in _sampled_endos(rng, av, basis, count=2):
                if f.is_zero():
                    continue
                sc = abelian.alphas(f)  # raises on any violation
                if not sc.alpha_minus <= sc.alpha_plus:
                    _violation("charpoly-square", "ordering",
                               {"rho_r": serialize.enc_int_matrix(f.rho_r)})
                t.hit("square-and-real")
                tr = abelian.trace_form(f)
                slack = float(tr) / 2 - float(sc.alpha_plus)
                if not slack > -1e-9:
                    _violation("charpoly-square", "trace-dominates", {
                        "rho_r": serialize.enc_int_matrix(f.rho_r),
                        "alpha_plus": float(sc.alpha_plus), "trace": str(tr)})
                t.hit("trace-dominates", slack)
    return t.summary()


# 20 small integral curves, each with a non-torsion point of small height,
# found by abscissa search; frozen as the validation corpus.
EC_CORPUS = (
    ((-4, 4), (2, 2)),
    ((-1, 1), (1, 1)),
    ((-16, 16), (0, 4)),
    ((-3, 7), (-1, 3)),
    ((3, 5), (1, 3)),
    ((5, 10), (1, 4)),
    ((-7, 7), (1, 1)),
    ((-7, -2), (-1, 2)),
    ((-12, -7), (-2, 3)),
    ((-8, 9), (2, 1)),
    ((16, 16), (0, 4)),
    ((1, 6), (-1, 2)),
    ((8, 1), (2, 5)),
    ((12, 4), (2, 6)),
    ((-7, 10), (1, 2)),
    ((-5, 5), (1, 1)),
    ((-8, 4), (0, 2)),
    ((-3, 11), (1, 3)),
    ((2, 1), (0, 1)),
    ((-13, 13), (-1, 5)),
)


def ec_corpus():
    return EC_CORPUS


def suite_ec_heights(config: RunConfig):
    """Quadraticity, parallelogram law, torsion detection, and agreement of
    the two height algorithms on the validation corpus."""
    t = _Tally()
    corpus = [(elliptic.EllipticCurve(a, b), elliptic.ECPoint(x, y))
              for (a, b), (x, y) in ec_corpus()]
    n = 0
    for _, rng, count in _shards(config):
        for _ in range(count):
            E, P = corpus[n % len(corpus)]
            n += 1
            h1 = elliptic.canonical_height(E, P, 1e-7,
                                           method="local_decomposition")
            h2 = elliptic.canonical_height(E, elliptic.mul(E, P, 2), 1e-7,
                                           method="local_decomposition")
            gap = abs(h2.value - 4 * h1.value)
            if not gap < 1e-6:
                _violation("ec-heights", "quadraticity", {
                    "curve": serialize.enc_curve(E), "gap": float(gap)})
            t.hit("quadraticity", 1e-6 - float(gap))
            Q = elliptic.mul(E, P, 2)
            hs = elliptic.canonical_height(
                E, elliptic.add(E, P, Q), 1e-7, "local_decomposition")
            hd = elliptic.canonical_height(
                E, elliptic.add(E, P, elliptic.neg(E, Q)), 1e-7,
                "local_decomposition")
            gap = abs(hs.value + hd.value - 2 * h1.value - 2 * h2.value)
            if not gap < 1e-5:
                _violation("ec-heights", "parallelogram", {
                    "curve": serialize.enc_curve(E), "gap": float(gap)})
            t.hit("parallelogram", 1e-5 - float(gap))
            hl = elliptic.canonical_height(E, P, 5e-7, "local_decomposition")
            hdb = elliptic.canonical_height(E, P, 5e-7, "doubling_limit",
                                            doubling_budget=12)
            gap = abs(hl.value - hdb.value)
            if not gap < 1e-6:
                _violation("ec-heights", "method-agreement", {
                    "curve": serialize.enc_curve(E), "gap": float(gap)})
            t.hit("method-agreement", 1e-6 - float(gap))
            if elliptic.is_torsion(E, P):
                _violation("ec-heights", "corpus-nontorsion",
                           {"curve": serialize.enc_curve(E)})
            if not h1.value > 1e-4:
                _violation("ec-heights", "positive-height",
                           {"curve": serialize.enc_curve(E)})
            t.hit("positive-height")
    return t.summary()


def suite_thm12(config: RunConfig):
    """Scaling ratios of (P1, P2) -> (P1, 2 P2) stay in the proved window and
    attain both ends."""
    t = _Tally()
    tol = max(config.tol_heights, 1e-5)
    corpus = [(elliptic.EllipticCurve(a, b), elliptic.ECPoint(x, y))
              for (a, b), (x, y) in ec_corpus()[:4]]
    for idx, rng, count in _shards(config):
        for k in range(count):
            E, P = corpus[(idx * SHARD_SIZE + k) % len(corpus)]
            pts = [P, elliptic.mul(E, P, 2)]
            rep = elliptic.verify_endo_scaling(E, pts, tol=max(tol, 1e-3))
            t.hit("window", min(r - rep.alpha_minus for r in rep.ratios))
            t.hit("extremes", max(abs(rep.extreme_low - rep.alpha_minus),
                                  abs(rep.extreme_high - rep.alpha_plus)))
    return t.summary()


SUITES = {
    "matrix-heights": suite_matrix_heights,
    "hd-oracle": suite_hd_oracle,
    "siegel": suite_siegel,
    "rosati": suite_rosati,
    "norm-bounds": suite_norm_bounds,
    "charpoly-square": suite_charpoly_square,
    "ec-heights": suite_ec_heights,
    "thm12": suite_thm12,
}


def run_suite(name, config: RunConfig):
    if name not in SUITES:
        raise MalformedInput(f"unknown suite {name!r}; choose from "
                             f"{sorted(SUITES)}")
    with mp.workprec(config.precision_bits):
        summary = SUITES[name](config)
    summary["suite"] = name
    summary["seed"] = config.seed
    summary["trials"] = config.trials
    summary["precision_bits"] = config.precision_bits
    return summary
