"""Hyperbolicity of algebraic limit cycles via orbit integrals of the cofactor.

For a periodic orbit lying on an invariant curve f = 0 with cofactor k
(P f_x + Q f_y = k f), the integral of the divergence over one period equals
the integral of k.  This package verifies that identity numerically and
exactly, and uses it to certify the hyperbolicity of the known algebraic
limit cycles of quadratic systems.
"""

__version__ = "0.1.0"

from .algebra import BiPoly, ParamScalar, ScalarContext, poly_arithmetic, poly_eval, poly_partial
from .errors import (
    AlgCycleError,
    ContextError,
    ConvergenceError,
    DomainError,
    IntegrationError,
    NoOrbitError,
    PreconditionError,
)
from .systems import (
    CATALOG_IDS,
    BirationalMap,
    CatalogEntry,
    InvariantCurve,
    PlanarSystem,
    catalog_instantiate,
    cofactor_residual,
    divergence,
    gradient_nonvanishing_check,
    pointwise_residual,
    transform_divergence_check,
)

__all__ = [
    "__version__",
    "BiPoly",
    "ParamScalar",
    "ScalarContext",
    "poly_arithmetic",
    "poly_eval",
    "poly_partial",
    "AlgCycleError",
    "ContextError",
    "ConvergenceError",
    "DomainError",
    "IntegrationError",
    "NoOrbitError",
    "PreconditionError",
    "CATALOG_IDS",
    "BirationalMap",
    "CatalogEntry",
    "InvariantCurve",
    "PlanarSystem",
    "catalog_instantiate",
    "cofactor_residual",
    "divergence",
    "gradient_nonvanishing_check",
    "pointwise_residual",
    "transform_divergence_check",
]
