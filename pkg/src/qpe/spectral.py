"""Dense complex linear algebra for unitary operators.

Everything here works on full matrices: pseudo-entropy needs the whole
spectrum, so there are no statevector shortcuts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import CapacityError, NumericalInstabilityError, ShapeError, ValidationError

UNITARITY_TOL = 1e-9
MODULUS_DRIFT_TOL = 1e-7
BRANCH_TOL = 1e-8
DEFAULT_DIM_CAP = 2**14

_dim_cap = DEFAULT_DIM_CAP


def set_dim_cap(cap: int) -> None:
    """Change the largest matrix dimension :func:`kron` may produce."""
    global _dim_cap
    if cap < 1:
        raise ValueError("dimension cap must be positive")
    _dim_cap = int(cap)


def get_dim_cap() -> int:
    return _dim_cap


def unitarity_residual(m: np.ndarray) -> float:
    """max |(M^dagger M - I)_ij|"""
    m = np.asarray(m)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


class UnitaryMatrix:
    """A square complex matrix checked for unitarity at construction.

    The wrapped array is read-only. ``np.asarray(u)`` gives it back, and
    ``u @ v`` composes two unitaries.
    """

    __slots__ = ("_data", "unitarity_residual")

    def __init__(self, data, *, tol: float = UNITARITY_TOL, check: bool = True):
        arr = np.array(data, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ShapeError(f"unitary must be a non-empty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("matrix has non-finite entries")
        residual = unitarity_residual(arr)
        if check and not residual < tol:
            raise ValidationError(f"matrix is not unitary: residual {residual:.3e} >= {tol:.0e}")
        arr.setflags(write=False)
        self._data = arr
        self.unitarity_residual = residual

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    @property
    def n_qubits(self) -> int | None:
        """log2 of the dimension, or None when the dimension is not a power of two."""
        d = self.dim
        return d.bit_length() - 1 if d & (d - 1) == 0 else None

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data
        return self._data.astype(dtype)

    def __matmul__(self, other: UnitaryMatrix) -> UnitaryMatrix:
        return matmul(self, other)

    def dag(self) -> UnitaryMatrix:
        return UnitaryMatrix(self._data.conj().T, check=False)

    def __repr__(self) -> str:
        return f"UnitaryMatrix(dim={self.dim}, residual={self.unitarity_residual:.1e})"


def as_unitary(u) -> UnitaryMatrix:
    return u if isinstance(u, UnitaryMatrix) else UnitaryMatrix(u)


def kron(a, b) -> UnitaryMatrix:
    """Kronecker product; ``a`` is the leftmost (most significant) factor."""
    a, b = as_unitary(a), as_unitary(b)
    dim = a.dim * b.dim
    if dim > _dim_cap:
        raise CapacityError(f"kron result dimension {dim} exceeds cap {_dim_cap}")
    return UnitaryMatrix(np.kron(a.data, b.data))


def kron_all(factors) -> UnitaryMatrix:
    factors = list(factors)
    if not factors:
        raise ShapeError("kron_all needs at least one factor")
    out = as_unitary(factors[0])
    for f in factors[1:]:
        out = kron(out, f)
    return out


def matmul(a, b) -> UnitaryMatrix:
    a, b = as_unitary(a), as_unitary(b)
    if a.dim != b.dim:
        raise ShapeError(f"cannot multiply unitaries of dims {a.dim} and {b.dim}")
    return UnitaryMatrix(a.data @ b.data)


def matmul_all(factors) -> UnitaryMatrix:
    """Operator-order product ``factors[0] @ factors[1] @ ...``."""
    factors = list(factors)
    if not factors:
        raise ShapeError("matmul_all needs at least one factor")
    out = np.asarray(as_unitary(factors[0]).data)
    for f in factors[1:]:
        f = as_unitary(f)
        if f.dim != out.shape[0]:
            raise ShapeError(f"cannot multiply unitaries of dims {out.shape[0]} and {f.dim}")
        out = out @ f.data
    return UnitaryMatrix(out)


def dagger(a):
    """Conjugate transpose. Unitaries stay unitaries; plain arrays stay arrays."""
    if isinstance(a, UnitaryMatrix):
        return a.dag()
    return np.asarray(a).conj().T


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenphases in (-pi, pi], ascending, with matching unit eigenvectors."""

    phases: np.ndarray
    eigenvectors: np.ndarray
    branch_warnings: tuple[int, ...] = field(default=())

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.phases)

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def reconstruction_residual(self, u) -> float:
        return float(np.max(np.abs(np.asarray(u) - self.reconstruct())))


def _leading_phase(vec: np.ndarray) -> float:
    nz = np.flatnonzero(np.abs(vec) > 1e-10)
    return float(np.angle(vec[nz[0]])) if nz.size else 0.0


def eig_unitary(u, *, branch_tol: float = BRANCH_TOL) -> SpectralDecomposition:
    """Eigendecomposition of a unitary with principal-branch phases.

    The complex Schur form ``U = Q T Q^dagger`` is used: for a normal matrix
    T is diagonal up to rounding and Q is unitary even inside degenerate
    eigenspaces, which a plain ``eig`` does not guarantee. Eigenvalues are
    projected radially onto the unit circle before their phase is taken.
    An eigenvalue at -1 is reported with phase +pi; any phase within
    ``branch_tol`` of pi is listed in ``branch_warnings``.
    """
    u = as_unitary(u)
    t, q = scipy.linalg.schur(u.data, output="complex")
    lam = np.diag(t).copy()
    drift = np.max(np.abs(np.abs(lam) - 1.0))
    if drift > MODULUS_DRIFT_TOL:
        raise NumericalInstabilityError(f"eigenvalue modulus drift {drift:.3e} exceeds {MODULUS_DRIFT_TOL:.0e}")
    phases = np.angle(lam / np.abs(lam))
    # keep the cut on the negative real axis closed from above: -pi never appears
    phases[phases <= -np.pi + branch_tol] = np.pi

    norms = np.linalg.norm(q, axis=0)
    q = q / norms
    lead = np.array([_leading_phase(q[:, k]) for k in range(q.shape[1])])
    order = np.lexsort((lead, np.round(phases, 12)))
    phases = phases[order]
    q = q[:, order]
    warnings = tuple(int(k) for k in np.flatnonzero(np.pi - phases < branch_tol))
    phases.setflags(write=False)
    q.setflags(write=False)
    return SpectralDecomposition(phases=phases, eigenvectors=q, branch_warnings=warnings)


GAMMA_RANGE = (0.0, np.pi)
PHI_RANGE = (0.0, 2 * np.pi)
LAMBDA_RANGE = (0.0, 2 * np.pi)


def su2_from_angles(gamma: float, phi: float, lam: float) -> np.ndarray:
    """General single-qubit gate rescaled by a global phase so that det = 1."""
    c, s = np.cos(gamma / 2), np.sin(gamma / 2)
    m = np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ]
    )
    return m * np.exp(-0.5j * (phi + lam))


def random_su2(seed: int | np.random.Generator) -> UnitaryMatrix:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    gamma = rng.uniform(*GAMMA_RANGE)
    phi = rng.uniform(*PHI_RANGE)
    lam = rng.uniform(*LAMBDA_RANGE)
    return UnitaryMatrix(su2_from_angles(gamma, phi, lam))


def random_unitary(dim: int, seed: int | np.random.Generator) -> UnitaryMatrix:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return UnitaryMatrix(q * (d / np.abs(d)))
