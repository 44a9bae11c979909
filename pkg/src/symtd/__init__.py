"""Symmetric tensor decomposition through a symmetric matrix eigenproblem."""

__version__ = "0.1.0"

from .decompose import (
    OstdOptions,
    WhitenOptions,
    WhitenReport,
    ostd,
    random_coefficients,
    whitened_ostd,
)
from .errors import (
    FormatError,
    InvalidSpec,
    NonConvergence,
    ShapeMismatch,
    SymmetryViolation,
    SymtdError,
    WhiteningFailure,
    ZeroTensor,
)
from .linalg import BACKEND, EigenSystem, random_orthogonal, sym_eig
from .metrics import ScoreOptions, normalize_columns, relative_error, solution_score
from .synth import GroundTruth, InstanceSpec, gen_instance
from .tensor import (
    FactorDecomposition,
    SymmetricTensor,
    frobenius_norm,
    from_dense,
    from_factors,
    multilinear_transform,
    outer_power,
    slice_combination,
    symmetrize,
    tvp_reduce_to_scalar,
    tvp_reduce_to_vector,
)
