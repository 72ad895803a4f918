"""Explainable sparse regression for lanthanide orthophosphate mixing.

Thin Python face of the C++ core: kernel ridge regression, combinatorial
feature expansion, and the penalized-path + exhaustive-subset sparsifier.
"""

from ._core import (
    ConfigError,
    ErrorReport,
    FeatureMatrix,
    KrrModel,
    LassoResult,
    LookupError,
    NumericalError,
    ParseError,
    PreconditionError,
    SchemaError,
    SparseFormula,
    SparseTerm,
    errors,
    expand,
    gram,
    krr_fit,
    krr_predict,
    l0_search,
    lasso_l1,
    lasso_lambda_max,
    run_stage,
)

__all__ = [
    "ConfigError",
    "ErrorReport",
    "FeatureMatrix",
    "KrrModel",
    "LassoResult",
    "LookupError",
    "NumericalError",
    "ParseError",
    "PreconditionError",
    "SchemaError",
    "SparseFormula",
    "SparseTerm",
    "errors",
    "expand",
    "gram",
    "krr_fit",
    "krr_predict",
    "l0_search",
    "lasso_l1",
    "lasso_lambda_max",
    "run_stage",
]
