"""Flag curvature of homogeneous Finsler spaces G/H with the infinite-series
metric beta^2/(beta - alpha) and the exponential metric alpha exp(beta/alpha)."""

__version__ = "0.1.0"

from .curvature import Convention, CurvatureContext, puttmann_curvature
from .errors import (DegenerateFlagError, DegenerateMetricError, DimensionError, FlagCurvError,
                     HypothesisError, PoleError, SpaceIOError, SpaceParseError,
                     SpaceValidationError, UndefinedInputError)
from .flag import (CurvatureReport, Flag, LedgerDocument, discrepancy_ledger,
                   flag_curvature_closed, flag_curvature_oracle, orthonormalize_flag)
from .lie import LieAlgebraSpec, MetricStructure, validate_spec
from .metrics import AlphaBetaMetric, Family, finsler_norm, shen_criterion
from .natred import (natred_check_finsler, natred_check_riemannian, parallel_X_check,
                     theorem4_equivalence_harness)
from .space import bundled_space, load_space, parse_space, serialize_space

__all__ = [
    "AlphaBetaMetric", "Convention", "CurvatureContext", "CurvatureReport", "DegenerateFlagError",
    "DegenerateMetricError", "DimensionError", "Family", "Flag", "FlagCurvError", "HypothesisError",
    "LedgerDocument", "LieAlgebraSpec", "MetricStructure", "PoleError", "SpaceIOError",
    "SpaceParseError", "SpaceValidationError", "UndefinedInputError", "bundled_space",
    "discrepancy_ledger", "finsler_norm", "flag_curvature_closed", "flag_curvature_oracle",
    "load_space", "natred_check_finsler", "natred_check_riemannian", "orthonormalize_flag",
    "parallel_X_check", "parse_space", "puttmann_curvature", "serialize_space", "shen_criterion",
    "theorem4_equivalence_harness", "validate_spec",
]
