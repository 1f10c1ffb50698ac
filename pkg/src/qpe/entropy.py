"""Shannon entropy on the simplex and pseudo-entropy of unitaries.

All logarithms are natural.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .spectral import SpectralDecomposition, eig_unitary

SIMPLEX_TOL = 1e-9
CLIP = 500.0


@dataclass(frozen=True)
class EntropyValue:
    real: float
    imag: float = 0.0
    branch_flag: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.real) and math.isfinite(self.imag)):
            raise ValidationError(f"non-finite entropy {self.real} + {self.imag}i")

    @property
    def modulus(self) -> float:
        return math.hypot(self.real, self.imag)

    def __complex__(self) -> complex:
        return complex(self.real, self.imag)


class TranslationKind(str, enum.Enum):
    REAL = "real"
    MODULUS = "modulus"


def translate(s: EntropyValue, kind: TranslationKind | str) -> float:
    kind = TranslationKind(kind)
    if kind is TranslationKind.REAL:
        return s.real
    return s.modulus


def simplex_map(x, *, return_clipped: bool = False):
    """E(x) = (e^x1, ..., e^xd, 1) / (e^x1 + ... + e^xd + 1)

    Entries are clipped to |x_i| <= 500 first; pass ``return_clipped`` to
    also get the mask of clipped entries.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(x)):
        raise ValidationError("simplex_map needs finite input")
    clipped = np.abs(x) > CLIP
    z = np.append(np.clip(x, -CLIP, CLIP), 0.0)
    e = np.exp(z - z.max())
    p = e / e.sum()
    return (p, clipped) if return_clipped else p


def simplex_inverse(p) -> np.ndarray:
    """Log-ratios against the last coordinate."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size < 2:
        raise DomainError("simplex point needs at least two coordinates")
    if np.any(p < 1e-300) or not np.all(np.isfinite(p)):
        raise DomainError("simplex_inverse needs a strictly interior point")
    return np.log(p[:-1]) - np.log(p[-1])


def check_simplex(p, *, strict: bool = True) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise ValidationError("simplex point must be a finite non-empty vector")
    if strict and np.min(p) <= 0:
        raise ValidationError("simplex point must be strictly positive")
    if np.min(p) < 0:
        raise ValidationError("probabilities must be nonnegative")
    if abs(p.sum() - 1) >= SIMPLEX_TOL:
        raise ValidationError(f"simplex point sums to {p.sum()!r}")
    return p


def shannon_entropy(p, *, allow_boundary: bool = False) -> EntropyValue:
    """-sum p_i ln p_i. With ``allow_boundary`` zero entries count as 0 log 0 = 0."""
    p = check_simplex(p, strict=not allow_boundary)
    nz = p[p > 0]
    return EntropyValue(float(-np.sum(nz * np.log(nz))), 0.0, False)


def data_entropy(x) -> EntropyValue:
    """Shannon entropy of a raw data point after the simplex map."""
    return shannon_entropy(simplex_map(x))


def classical_circle_entropy(theta: float) -> EntropyValue:
    """Entropy of the distribution (cos^2 theta, sin^2 theta)."""
    c2 = math.cos(theta) ** 2
    return shannon_entropy([c2, 1.0 - c2], allow_boundary=True)


def entropy_from_phases(phases, branch_flag: bool = False) -> EntropyValue:
    """-sum e^{i a} log e^{i a} = sum a sin a - i sum a cos a"""
    a = np.asarray(phases, dtype=float)
    return EntropyValue(float(np.sum(a * np.sin(a))), float(-np.sum(a * np.cos(a))), branch_flag)


def pseudo_entropy(u, *, decomposition: SpectralDecomposition | None = None) -> EntropyValue:
    spec = decomposition if decomposition is not None else eig_unitary(u)
    return entropy_from_phases(spec.phases, bool(spec.branch_warnings))
