"""abelia: exact heights, Siegel fundamental-domain reduction, Rosati and
spectral constants for polarized abelian varieties, and certified canonical
heights on elliptic curves."""

from .abelian import (Endomorphism, PolarizationType, PolarizedAV,
                      SpectralConstants, alphas, analytic_charpoly,
                      chi_combination, classify_divisor, norm_bound_constants,
                      product_embedding, rosati, sample_cm_variety,
                      trace_form, validate_endomorphism, verify_norm_bounds)
from .elliptic import (ECPoint, EllipticCurve, HeightValue, TwoIsogeny, add,
                       canonical_height, is_torsion, mul, neg,
                       nonample_ratio_search, on_curve, product_height,
                       velu_2isogeny, velu_dual, verify_endo_scaling,
                       verify_isogeny_identity)
from .heights import (AlgebraicScalar, RationalMatrix, h_aff, h_d, h_max,
                      mahler_measure, weil_height)
from .intpoly import IntPolynomial
from .siegel import (DomainReport, SiegelPoint, SymplecticMatrix, act,
                     boundary_matrices, delta_constants, membership, reduce)

__version__ = "0.1.0"

__all__ = [
    "AlgebraicScalar", "DomainReport", "ECPoint", "EllipticCurve",
    "Endomorphism", "HeightValue", "IntPolynomial", "PolarizationType",
    "PolarizedAV", "RationalMatrix", "SiegelPoint", "SpectralConstants",
    "SymplecticMatrix", "TwoIsogeny", "act", "add", "alphas",
    "analytic_charpoly", "boundary_matrices", "canonical_height",
    "chi_combination", "classify_divisor", "delta_constants", "h_aff", "h_d",
    "h_max", "is_torsion", "mahler_measure", "membership", "mul",
    "neg", "nonample_ratio_search", "norm_bound_constants", "on_curve",
    "product_embedding", "product_height", "reduce", "rosati",
    "sample_cm_variety", "trace_form", "validate_endomorphism",
    "velu_2isogeny", "velu_dual", "verify_endo_scaling",
    "verify_isogeny_identity", "verify_norm_bounds", "weil_height",
]
