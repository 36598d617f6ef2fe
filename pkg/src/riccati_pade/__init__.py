"""Complex eigenvalues of the repulsive exponential potential.

Hankel-determinant quantization of the Riccati series (the Riccati-Pade
method) next to an independent exact oracle built on Bessel-order zeros.
"""

from .hankel import HankelSpec, HankelValue, hankel_det, hankel_matrix
from .mpnum import Dual, PrecisionCtx, default_mantissa_bits
from .oracle import (
    OracleRoot,
    discover_order_candidates,
    exact_eigenvalue,
    find_eigenvalue,
    is_effectively_real,
    oracle_scan,
    reduced_bessel,
)
from .riccati import ModelParams, TaylorSeries, riccati_residual, taylor_coefficients
from .rpm import (
    NewtonConfig,
    RootCluster,
    RootResult,
    SequenceReport,
    certify_root,
    cluster_roots,
    hankel_sequence,
    newton_root,
)

__version__ = "0.1.0"

__all__ = [
    "Dual",
    "HankelSpec",
    "HankelValue",
    "ModelParams",
    "NewtonConfig",
    "OracleRoot",
    "PrecisionCtx",
    "RootCluster",
    "RootResult",
    "SequenceReport",
    "TaylorSeries",
    "certify_root",
    "cluster_roots",
    "default_mantissa_bits",
    "discover_order_candidates",
    "exact_eigenvalue",
    "find_eigenvalue",
    "hankel_det",
    "hankel_matrix",
    "hankel_sequence",
    "is_effectively_real",
    "newton_root",
    "oracle_scan",
    "reduced_bessel",
    "riccati_residual",
    "taylor_coefficients",
]
