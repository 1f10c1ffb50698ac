"""Gates and quantum feature maps, each returned as a full unitary.

Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
basis-state index.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import CapacityError, DomainError, ShapeError, ValidationError
from .spectral import UnitaryMatrix, as_unitary, get_dim_cap, kron_all, matmul_all

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def gate_rx(theta: float) -> UnitaryMatrix:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return UnitaryMatrix([[c, -1j * s], [-1j * s, c]])


def gate_ry(theta: float) -> UnitaryMatrix:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return UnitaryMatrix([[c, -s], [s, c]])


def gate_rz(theta: float) -> UnitaryMatrix:
    return UnitaryMatrix([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]])


def gate_ry_tilde(alpha: float) -> UnitaryMatrix:
    """R_y(2 arccos(alpha)): sends |0> to alpha|0> + sqrt(1 - alpha^2)|1>."""
    if not -1e-12 <= alpha <= 1 + 1e-12:
        raise DomainError(f"amplitude rotation needs alpha in [0, 1], got {alpha}")
    return gate_ry(2 * math.acos(min(max(alpha, 0.0), 1.0)))


def gate_phase(theta: float) -> UnitaryMatrix:
    return UnitaryMatrix([[1, 0], [0, np.exp(1j * theta)]])


def gate_hadamard() -> UnitaryMatrix:
    return UnitaryMatrix(np.array([[1, 1], [1, -1]]) / math.sqrt(2))


def gate_x() -> UnitaryMatrix:
    return UnitaryMatrix(_X)


def gate_y() -> UnitaryMatrix:
    return UnitaryMatrix(_Y)


def gate_z() -> UnitaryMatrix:
    return UnitaryMatrix(_Z)


def gate_s() -> UnitaryMatrix:
    return gate_phase(math.pi / 2)


def gate_t() -> UnitaryMatrix:
    return gate_phase(math.pi / 4)


def gate_swap() -> UnitaryMatrix:
    m = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    return UnitaryMatrix(m)


def identity(n_qubits: int) -> UnitaryMatrix:
    return UnitaryMatrix(np.eye(2**n_qubits, dtype=complex))


def _check_dim(n: int) -> int:
    dim = 2**n
    if dim > get_dim_cap():
        raise CapacityError(f"{n} qubits need dimension {dim}, above cap {get_dim_cap()}")
    return dim


def embed_multicontrolled(u, controls: dict[int, int], target: int, n: int) -> UnitaryMatrix:
    """Apply a 2x2 ``u`` on ``target`` when every control qubit holds its bit.

    ``controls`` maps qubit index to the required value (0 is an open,
    anti-control). With no controls this is ``u`` on ``target`` alone.
    """
    u = np.asarray(as_unitary(u).data)
    if u.shape != (2, 2):
        raise ShapeError("embedded gate must be 2x2")
    if not 0 <= target < n:
        raise ShapeError(f"target {target} out of range for {n} qubits")
    for c, v in controls.items():
        if not 0 <= c < n:
            raise ShapeError(f"control {c} out of range for {n} qubits")
        if c == target:
            raise ShapeError("control and target must differ")
        if v not in (0, 1):
            raise ValidationError(f"control value must be 0 or 1, got {v}")
    dim = _check_dim(n)
    idx = np.arange(dim)
    bit = lambda q: (idx >> (n - 1 - q)) & 1  # noqa: E731
    active = bit(target) == 0
    for c, v in controls.items():
        active &= bit(c) == v
    i0 = idx[active]
    i1 = i0 | (1 << (n - 1 - target))
    m = np.eye(dim, dtype=complex)
    m[i0, i0] = u[0, 0]
    m[i0, i1] = u[0, 1]
    m[i1, i0] = u[1, 0]
    m[i1, i1] = u[1, 1]
    return UnitaryMatrix(m)


def embed_controlled(u, control: int, control_value: int, target: int, n: int) -> UnitaryMatrix:
    return embed_multicontrolled(u, {control: control_value}, target, n)


def embed_single(u, target: int, n: int) -> UnitaryMatrix:
    return embed_multicontrolled(u, {}, target, n)


def _as_point(x) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise ShapeError(f"data point must be a non-empty vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("data point has non-finite values")
    return arr


def encode_angle(x) -> UnitaryMatrix:
    """Tensor product of R_x(x_l) over features."""
    x = _as_point(x)
    _check_dim(x.size)
    return kron_all(gate_rx(v) for v in x)


def encode_phase_product(angles) -> UnitaryMatrix:
    a = _as_point(angles)
    _check_dim(a.size)
    return kron_all(gate_phase(v) for v in a)


class IQPVariant(str, enum.Enum):
    IQP = "IQP"
    IQP_SO = "IQP_SO"
    IQP_FL = "IQP_FL"


def iqp_pair_angles(x) -> np.ndarray:
    """Controlled-phase angles (pi - x_k)(pi - x_j); only k < j is meaningful."""
    x = _as_point(x)
    y = np.pi - x
    return np.outer(y, y)


def iqp_phase_diagonal(x) -> np.ndarray:
    """Diagonal of the product of all CP(pi_kj, k, j) and P(x_k) gates.

    Every gate in that block is diagonal in the computational basis, so the
    product is a phase per basis state: sum of x_k over set bits plus
    pi_kj over pairs of set bits.
    """
    x = _as_point(x)
    n = x.size
    dim = _check_dim(n)
    bits = ((np.arange(dim)[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1).astype(float)
    pair = np.triu(iqp_pair_angles(x), k=1)
    phase = bits @ x + np.einsum("bk,kj,bj->b", bits, pair, bits)
    return np.exp(1j * phase)


def hadamard_layer(n: int) -> np.ndarray:
    dim = _check_dim(n)
    h = np.array([[1.0]])
    h1 = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    for _ in range(n):
        h = np.kron(h, h1)
    assert h.shape == (dim, dim)
    return h


def encode_iqp(x, variant: IQPVariant | str = IQPVariant.IQP) -> UnitaryMatrix:
    """IQP family built from phase and controlled-phase layers.

    IQP    : H^n . D(x) . H^n
    IQP_SO : D(x)
    IQP_FL : D(x) . H^n . D(x) . H^n   (data re-uploaded)

    where D(x) is the diagonal CP-product times P-layer.
    """
    variant = IQPVariant(variant)
    x = _as_point(x)
    d = iqp_phase_diagonal(x)
    if variant is IQPVariant.IQP_SO:
        return UnitaryMatrix(np.diag(d))
    h = hadamard_layer(x.size)
    if variant is IQPVariant.IQP:
        return UnitaryMatrix((h * d[None, :]) @ h)
    dh = d[:, None] * h
    return UnitaryMatrix(dh @ dh)


@dataclass
class AmplitudeTree:
    """Binary tree of partial probability masses; ``levels[0]`` is the root."""

    levels: list[np.ndarray]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def leaves(self) -> np.ndarray:
        return self.levels[-1]

    def mass(self, level: int, index: int) -> float:
        return float(self.levels[level][index])

    def children(self, level: int, index: int) -> tuple[float, float]:
        nxt = self.levels[level + 1]
        return float(nxt[2 * index]), float(nxt[2 * index + 1])


def _normalize_probs(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=float).ravel()
    n = p.size
    if n < 2 or n & (n - 1):
        raise ShapeError(f"amplitude encoding needs a power-of-two length >= 2, got {n}")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise DomainError("probabilities must be finite and nonnegative")
    total = p.sum()
    if abs(total - 1) > 1e-6:
        raise DomainError(f"probabilities sum to {total}, not 1")
    if abs(total - 1) > 1e-9:
        p = p / total
    return p


def amplitude_tree(probs) -> AmplitudeTree:
    p = _normalize_probs(probs)
    levels = [p]
    while levels[0].size > 1:
        levels.insert(0, levels[0].reshape(-1, 2).sum(axis=1))
    return AmplitudeTree(levels)


def pad_to_power_of_two(p) -> np.ndarray:
    """Append zeros until the length is a power of two (at least 2)."""
    p = np.asarray(p, dtype=float).ravel()
    n = max(2, 1 << max(0, (p.size - 1).bit_length()))
    return np.concatenate([p, np.zeros(n - p.size)])


def amplitude_gates(probs) -> list[tuple[dict[int, int], int, float]]:
    """Gate list (controls, target, alpha) in application order.

    Level d rotates qubit d by R~_y(sqrt(left_child / parent)), controlled
    on the bit pattern of the ancestors. A zero-mass parent gets alpha = 1
    (identity rotation).
    """
    tree = amplitude_tree(probs)
    gates = []
    for level in range(tree.depth):
        for node in range(2**level):
            parent = tree.mass(level, node)
            left, _ = tree.children(level, node)
            alpha = math.sqrt(min(left / parent, 1.0)) if parent > 0 else 1.0
            controls = {q: (node >> (level - 1 - q)) & 1 for q in range(level)}
            gates.append((controls, level, alpha))
    return gates


def encode_amplitude(probs) -> UnitaryMatrix:
    p = _normalize_probs(probs)
    n = p.size.bit_length() - 1
    ops = [embed_multicontrolled(gate_ry_tilde(a), c, t, n) for c, t, a in amplitude_gates(p)]
    # apply in list order: later gates multiply from the left
    return matmul_all(reversed(ops))


def encode_circle(theta: float, which: str = "amplitude") -> UnitaryMatrix:
    """Unit-circle encoders: 'amplitude' is R_x(2 theta), 'angle' is
    R_x(2 cos^2 theta) (x) R_x(2 sin^2 theta)."""
    if which == "amplitude":
        return gate_rx(2 * theta)
    if which == "angle":
        c2 = math.cos(theta) ** 2
        return kron_all([gate_rx(2 * c2), gate_rx(2 * (1 - c2))])
    raise ValueError(f"unknown circle encoder {which!r}")


def encode_expressivity(x: float, depth: str = "shallow") -> UnitaryMatrix:
    h, s, t = gate_hadamard(), gate_s(), gate_t()
    shallow = [h, gate_rz(x), h]
    if depth == "shallow":
        return matmul_all(shallow)
    if depth == "deep":
        return matmul_all([t, gate_ry(x), t.dag(), s, gate_rx(x), s.dag(), *shallow])
    raise ValueError(f"unknown expressivity depth {depth!r}")


def encode_symmetric(x1: float, x2: float, axis: str = "z") -> UnitaryMatrix:
    gate = {"y": gate_ry, "z": gate_rz}.get(axis)
    if gate is None:
        raise ValueError(f"axis must be 'y' or 'z', got {axis!r}")
    return kron_all([gate(x1), gate(x2)])


class EncoderKind(str, enum.Enum):
    ANGLE = "Angle"
    PHASE_PRODUCT = "PhaseProduct"
    IQP = "IQP"
    IQP_SO = "IQP_SO"
    IQP_FL = "IQP_FL"
    AMPLITUDE = "Amplitude"
    CIRCLE_AMPLITUDE = "CircleAmplitude"
    CIRCLE_ANGLE = "CircleAngle"
    EXPRESSIVITY_SHALLOW = "ExpressivityShallow"
    EXPRESSIVITY_DEEP = "ExpressivityDeep"
    SYMMETRIC_RY = "SymmetricRy"
    SYMMETRIC_RZ = "SymmetricRz"


CLI_NAMES = {
    "angle": EncoderKind.ANGLE,
    "phase": EncoderKind.PHASE_PRODUCT,
    "iqp": EncoderKind.IQP,
    "iqp-so": EncoderKind.IQP_SO,
    "iqp-fl": EncoderKind.IQP_FL,
    "amplitude": EncoderKind.AMPLITUDE,
    "circle-amplitude": EncoderKind.CIRCLE_AMPLITUDE,
    "circle-angle": EncoderKind.CIRCLE_ANGLE,
    "expressivity-shallow": EncoderKind.EXPRESSIVITY_SHALLOW,
    "expressivity-deep": EncoderKind.EXPRESSIVITY_DEEP,
    "symmetric-ry": EncoderKind.SYMMETRIC_RY,
    "symmetric-rz": EncoderKind.SYMMETRIC_RZ,
}

_FIXED_QUBITS = {
    EncoderKind.CIRCLE_AMPLITUDE: 1,
    EncoderKind.CIRCLE_ANGLE: 2,
    EncoderKind.EXPRESSIVITY_SHALLOW: 1,
    EncoderKind.EXPRESSIVITY_DEEP: 1,
    EncoderKind.SYMMETRIC_RY: 2,
    EncoderKind.SYMMETRIC_RZ: 2,
}
_SCALAR_INPUT = {
    EncoderKind.CIRCLE_AMPLITUDE,
    EncoderKind.CIRCLE_ANGLE,
    EncoderKind.EXPRESSIVITY_SHALLOW,
    EncoderKind.EXPRESSIVITY_DEEP,
}


@dataclass(frozen=True)
class EncoderSpec:
    """An encoder kind plus options.

    ``qubit_count`` may be left as None and is then inferred from the first
    input. Supported option: ``su_normalize`` (divide by det^(1/dim)).
    """

    kind: EncoderKind
    qubit_count: int | None = None
    options: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "kind", EncoderKind(self.kind))
        fixed = _FIXED_QUBITS.get(self.kind)
        if fixed is not None and self.qubit_count not in (None, fixed):
            raise ValidationError(f"{self.kind.value} acts on {fixed} qubit(s), not {self.qubit_count}")
        if self.qubit_count is not None and self.qubit_count < 1:
            raise ValidationError("qubit_count must be positive")

    @classmethod
    def from_name(cls, name: str, **options) -> EncoderSpec:
        key = name.strip()
        kind = CLI_NAMES.get(key.lower()) or EncoderKind(key)
        return cls(kind, options=options)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def scalar_input(self) -> bool:
        return self.kind in _SCALAR_INPUT

    def expected_input_dim(self) -> int | None:
        """Length of the input vector this spec accepts, if fixed."""
        k = self.kind
        if k in _SCALAR_INPUT:
            return 1
        if k in (EncoderKind.SYMMETRIC_RY, EncoderKind.SYMMETRIC_RZ):
            return 2
        if self.qubit_count is None:
            return None
        if k is EncoderKind.AMPLITUDE:
            return 2**self.qubit_count
        return self.qubit_count

    def encode(self, x) -> UnitaryMatrix:
        x = _as_point(x)
        want = self.expected_input_dim()
        if want is not None and x.size != want:
            raise ShapeError(f"{self.name} expects input of length {want}, got {x.size}")
        u = _ENCODERS[self.kind](x)
        if self.options.get("su_normalize"):
            u = su_normalize(u)
        return u


def su_normalize(u) -> UnitaryMatrix:
    """Remove the global phase so that det = 1 (principal dim-th root)."""
    m = np.asarray(as_unitary(u).data)
    det = np.linalg.det(m)
    return UnitaryMatrix(m * np.exp(-1j * np.angle(det) / m.shape[0]))


_ENCODERS = {
    EncoderKind.ANGLE: encode_angle,
    EncoderKind.PHASE_PRODUCT: encode_phase_product,
    EncoderKind.IQP: lambda x: encode_iqp(x, IQPVariant.IQP),
    EncoderKind.IQP_SO: lambda x: encode_iqp(x, IQPVariant.IQP_SO),
    EncoderKind.IQP_FL: lambda x: encode_iqp(x, IQPVariant.IQP_FL),
    EncoderKind.AMPLITUDE: encode_amplitude,
    EncoderKind.CIRCLE_AMPLITUDE: lambda x: encode_circle(x[0], "amplitude"),
    EncoderKind.CIRCLE_ANGLE: lambda x: encode_circle(x[0], "angle"),
    EncoderKind.EXPRESSIVITY_SHALLOW: lambda x: encode_expressivity(x[0], "shallow"),
    EncoderKind.EXPRESSIVITY_DEEP: lambda x: encode_expressivity(x[0], "deep"),
    EncoderKind.SYMMETRIC_RY: lambda x: encode_symmetric(x[0], x[1], "y"),
    EncoderKind.SYMMETRIC_RZ: lambda x: encode_symmetric(x[0], x[1], "z"),
}


def fidelity_gram(points, spec: EncoderSpec) -> np.ndarray:
    """G[i, j] = |<0...0| U(x_i)^dagger U(x_j) |0...0>|^2

    Only the first column of each unitary is needed, so this reads
    ``U(x)|0...0>`` directly.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    states = np.array([np.asarray(spec.encode(p).data)[:, 0] for p in pts])
    overlaps = states.conj() @ states.T
    g = np.abs(overlaps) ** 2
    g = np.clip((g + g.T) / 2, 0.0, 1.0)
    np.fill_diagonal(g, 1.0)
    return g
