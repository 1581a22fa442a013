"""Simultaneous polynomial root finding at arbitrary precision.

Aberth-Ehrlich iteration with deterministic initialization on a perturbed
circle.  Multiple roots are split off exactly beforehand (Yun decomposition),
so the iteration only ever sees square-free input and keeps its quadratic
convergence.
"""
from __future__ import annotations

import mpmath
from mpmath import mp

from .errors import RootFindingFailure
from .intpoly import IntPolynomial, squarefree_decomposition

_MAX_ITER = 400


def _aberth_squarefree(coeffs, prec):
    """Roots of a square-free polynomial given by exact integer coefficients
    (constant first).  Returns a list of mpc at working precision `prec`."""
    n = len(coeffs) - 1
    if n < 1:
        return []
    with mp.workprec(prec + 32):
        c = [mp.mpf(x) for x in coeffs]
        lead = c[-1]

        def val_der(z):
            p = mp.mpc(0)
            dp = mp.mpc(0)
            for a in reversed(c):
                dp = dp * z + p
                p = p * z + a
            return p, dp

        # deterministic start: perturbed circle at the Cauchy radius
        radius = 1 + max(abs(a) / abs(lead) for a in c[:-1]) if n else mp.mpf(1)
        z = [radius * mp.expjpi(2 * mp.mpf(k) / n + mp.mpf(1) / (2 * n) + mp.mpf("0.125"))
             for k in range(n)]
        target = mp.mpf(2) ** (-(prec + 10))
        scale = max(radius, 1)
        for _ in range(_MAX_ITER):
            moved = mp.mpf(0)
            for k in range(n):
                p, dp = val_der(z[k])
                if p == 0:
                    continue
                if dp == 0:
                    z[k] += mp.mpf("0.5") * target + mp.mpc(0, 1) * scale * mp.mpf(2) ** -8
                    moved = max(moved, scale)
                    continue
                newton = p / dp
                s = mp.mpc(0)
                for j in range(n):
                    if j != k:
                        s += 1 / (z[k] - z[j])
                denom = 1 - newton * s
                step = newton / denom if denom != 0 else newton
                z[k] -= step
                moved = max(moved, abs(step))
            if moved < target * scale:
                break
        else:
            raise RootFindingFailure(
                f"Aberth iteration did not converge at {prec} bits (degree {n})")
        return [mp.mpc(r) for r in z]


def all_roots(poly: IntPolynomial, prec=None):
    """All complex roots with multiplicity, as [(root, multiplicity), ...].

    Exact square-free splitting first; each square-free factor is solved by
    Aberth-Ehrlich at the working precision (default mp.prec).
    """
    prec = prec or mp.prec
    if poly.is_zero:
        raise RootFindingFailure("zero polynomial")
    out = []
    for factor, mult in squarefree_decomposition(poly):
        for r in _aberth_squarefree(list(factor.coefficients), prec):
            out.append((r, mult))
    return out


def refine_root(poly: IntPolynomial, approx, prec=None):
    """Polish one root by Newton iteration from `approx` at precision `prec`.

    Multiple roots are handled by polishing on the square-free part that owns
    the nearest root.
    """
    prec = prec or mp.prec
    parts = squarefree_decomposition(poly)
    if not parts:
        raise RootFindingFailure("constant polynomial")
    best = None
    with mp.workprec(prec + 32):
        z0 = mp.mpc(approx)
        for factor, _ in parts:
            roots = _aberth_squarefree(list(factor.coefficients), prec)
            for r in roots:
                d = abs(r - z0)
                if best is None or d < best[0]:
                    best = (d, r)
        return best[1]


def mahler_from_roots(poly: IntPolynomial, prec=None):
    """|leading| * prod max(1, |root|) over all roots with multiplicity."""
    prec = prec or mp.prec
    with mp.workprec(prec + 48):
        acc = mp.mpf(abs(poly.leading))
        for r, mult in all_roots(poly, prec + 48):
            a = abs(r)
            if a > 1:
                acc *= a ** mult
        result = +acc
    return mpmath.mpf(result)
