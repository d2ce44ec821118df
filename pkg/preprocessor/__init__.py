"""Tropism-based preprocessing for the common factor of two bivariate polynomials."""

from .config import NOISY, Config
from .errors import (
    ConfigError,
    DegenerateFormError,
    DomainError,
    ExponentOverflowError,
    NotPrimitiveError,
    PolynomialSyntaxError,
    PreprocessError,
    ZeroPolynomialError,
)
from .initial_system import (
    InitialRoot,
    UnivariateForm,
    aberth_roots,
    common_roots,
    numeric_rank,
    solve_stage2,
    sylvester_matrix,
    univariatize,
)
from .pipeline import Certificate, GroundTruth, Preprocessor, Status, add_noise, gen_instance, preprocess, resultant_probe
from .polygon import (
    NewtonPolygon,
    Tropicalization,
    Tropism,
    convex_hull,
    inner_normals,
    newton_polygon,
    tentacle_degree,
    tentacle_degrees,
    tropicalization,
    tropism_intersection,
)
from .polynomial import (
    Direction,
    ExponentVector,
    SparsePoly,
    evaluate,
    format_poly,
    from_records,
    initial_form,
    multiply,
    parse_poly,
    strip_monomial,
    to_records,
    weighted_degree,
)
from .puiseux import ExponentData, SeriesGerm, exponent_condition, germ_point, residual_order, second_term
from .unimodular import UnimodularMatrix, extended_gcd, matrix_for_tropism, transform_exponent, untransform_point

__all__ = [
    "NOISY",
    "Certificate",
    "Config",
    "ConfigError",
    "DegenerateFormError",
    "Direction",
    "DomainError",
    "ExponentData",
    "ExponentOverflowError",
    "ExponentVector",
    "GroundTruth",
    "InitialRoot",
    "NewtonPolygon",
    "NotPrimitiveError",
    "PolynomialSyntaxError",
    "PreprocessError",
    "Preprocessor",
    "SeriesGerm",
    "SparsePoly",
    "Status",
    "Tropicalization",
    "Tropism",
    "UnimodularMatrix",
    "UnivariateForm",
    "ZeroPolynomialError",
    "aberth_roots",
    "add_noise",
    "common_roots",
    "convex_hull",
    "evaluate",
    "exponent_condition",
    "extended_gcd",
    "format_poly",
    "from_records",
    "gen_instance",
    "germ_point",
    "initial_form",
    "inner_normals",
    "matrix_for_tropism",
    "multiply",
    "newton_polygon",
    "numeric_rank",
    "parse_poly",
    "preprocess",
    "residual_order",
    "resultant_probe",
    "second_term",
    "solve_stage2",
    "strip_monomial",
    "sylvester_matrix",
    "tentacle_degree",
    "tentacle_degrees",
    "to_records",
    "transform_exponent",
    "tropicalization",
    "tropism_intersection",
    "univariatize",
    "untransform_point",
    "weighted_degree",
]
