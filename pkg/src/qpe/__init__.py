"""Pseudo-entropy of quantum feature-map unitaries versus Shannon entropy of the encoded data."""

__version__ = "0.1.0"

from .entropy import (  # noqa: E402
    EntropyValue,
    TranslationKind,
    data_entropy,
    pseudo_entropy,
    shannon_entropy,
    simplex_inverse,
    simplex_map,
    translate,
)
from .feature_maps import EncoderKind, EncoderSpec, fidelity_gram  # noqa: E402
from .spectral import UnitaryMatrix, eig_unitary, kron, matmul, random_su2  # noqa: E402
from .stats import CorrelationReport, correlation_report, pearson, spearman, xicor  # noqa: E402

__all__ = [
    "__version__",
    "CorrelationReport",
    "EncoderKind",
    "EncoderSpec",
    "EntropyValue",
    "TranslationKind",
    "UnitaryMatrix",
    "correlation_report",
    "data_entropy",
    "eig_unitary",
    "fidelity_gram",
    "kron",
    "matmul",
    "pearson",
    "pseudo_entropy",
    "random_su2",
    "shannon_entropy",
    "simplex_inverse",
    "simplex_map",
    "spearman",
    "translate",
    "xicor",
]
