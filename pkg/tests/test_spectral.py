import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpe.errors import CapacityError, NumericalInstabilityError, ShapeError, ValidationError
from qpe.feature_maps import gate_hadamard, gate_phase, gate_rx, gate_rz, gate_x, gate_y, gate_z
from qpe.spectral import (
    UnitaryMatrix,
    dagger,
    eig_unitary,
    get_dim_cap,
    kron,
    kron_all,
    matmul,
    random_su2,
    random_unitary,
    set_dim_cap,
    unitarity_residual,
)

angles = st.floats(min_value=-10, max_value=10, allow_nan=False)


def test_rejects_non_unitary():
    with pytest.raises(ValidationError):
        UnitaryMatrix([[1, 1], [0, 1]])


def test_rejects_non_square_and_nonfinite():
    with pytest.raises((ShapeError, ValidationError)):
        UnitaryMatrix(np.ones((2, 3)))
    with pytest.raises(ValidationError):
        UnitaryMatrix([[np.nan, 0], [0, 1]])


def test_data_is_read_only():
    u = UnitaryMatrix(np.eye(2))
    with pytest.raises(ValueError):
        u.data[0, 0] = 2


def test_kron_identity():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)).data, np.eye(4))


def test_kron_diagonal_phases():
    t1, t2 = 0.3, 1.1
    a = np.diag([np.exp(1j * t1), np.exp(-1j * t1)])
    b = np.diag([np.exp(1j * t2), np.exp(-1j * t2)])
    want = np.diag(np.exp(1j * np.array([t1 + t2, t1 - t2, -t1 + t2, -t1 - t2])))
    np.testing.assert_allclose(kron(a, b).data, want, atol=1e-15)


def test_kron_x_h_hand_expanded():
    s = 1 / np.sqrt(2)
    # X (x) H: X's off-diagonal ones place H blocks in the off-diagonal quadrants
    want = np.array(
        [
            [0, 0, s, s],
            [0, 0, s, -s],
            [s, s, 0, 0],
            [s, -s, 0, 0],
        ]
    )
    np.testing.assert_allclose(kron(gate_x(), gate_hadamard()).data, want, atol=1e-15)


def test_kron_index_rule():
    a, b = random_unitary(2, 1).data, random_unitary(3, 2).data
    k = kron(a, b).data
    for ia in range(2):
        for ja in range(2):
            for ib in range(3):
                for jb in range(3):
                    assert k[ia * 3 + ib, ja * 3 + jb] == pytest.approx(a[ia, ja] * b[ib, jb], abs=1e-15)


def test_kron_capacity():
    old = get_dim_cap()
    try:
        set_dim_cap(8)
        kron_all([np.eye(2)] * 3)
        with pytest.raises(CapacityError):
            kron_all([np.eye(2)] * 4)
    finally:
        set_dim_cap(old)


def test_matmul_examples():
    u = random_unitary(4, 3)
    np.testing.assert_allclose(matmul(u, dagger(u)).data, np.eye(4), atol=1e-9)
    np.testing.assert_allclose(matmul(gate_hadamard(), gate_hadamard()).data, np.eye(2), atol=1e-15)
    # XZ = [[0,-1],[1,0]] = -iY
    np.testing.assert_allclose(matmul(gate_x(), gate_z()).data, -1j * gate_y().data, atol=1e-15)


def test_matmul_shape_mismatch():
    with pytest.raises(ShapeError):
        matmul(np.eye(2), np.eye(4))


def test_dagger_examples():
    np.testing.assert_array_equal(dagger(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(dagger(gate_phase(0.7)).data, gate_phase(-0.7).data, atol=1e-15)
    a = np.arange(6).reshape(2, 3) + 1j
    np.testing.assert_array_equal(dagger(dagger(a)), a)


def test_eig_pauli_x_branch():
    dec = eig_unitary(gate_x())
    np.testing.assert_allclose(dec.phases, [0, np.pi], atol=1e-12)
    assert dec.branch_warnings == (1,)


def test_eig_minus_identity_reports_plus_pi():
    dec = eig_unitary(-np.eye(2))
    assert np.all(dec.phases == np.pi)
    assert dec.branch_warnings == (0, 1)


@given(st.floats(min_value=1e-3, max_value=2 * np.pi - 1e-3))
def test_eig_rz(theta):
    dec = eig_unitary(gate_rz(theta))
    want = np.sort([-theta / 2, theta / 2])
    np.testing.assert_allclose(dec.phases, want, atol=1e-9)


@given(st.floats(min_value=-np.pi / 2 + 1e-3, max_value=np.pi / 2 - 1e-3))
def test_eig_rx_double_angle(theta):
    dec = eig_unitary(gate_rx(2 * theta))
    np.testing.assert_allclose(dec.phases, np.sort([-theta, theta]), atol=1e-9)


def test_eig_hadamard():
    np.testing.assert_allclose(eig_unitary(gate_hadamard()).phases, [0, np.pi], atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_eig_reconstruction(n, seed):
    u = random_unitary(2**n, seed)
    dec = eig_unitary(u)
    assert dec.phases.size == u.dim
    assert np.all(dec.phases > -np.pi) and np.all(dec.phases <= np.pi)
    assert np.all(np.diff(dec.phases) >= 0)
    assert dec.reconstruction_residual(u) < 1e-8


def test_eig_degenerate_spectrum_orthonormal():
    # kron of identical factors has a repeated eigenvalue
    u = kron_all([gate_rz(0.4)] * 3)
    dec = eig_unitary(u)
    v = dec.eigenvectors
    np.testing.assert_allclose(v.conj().T @ v, np.eye(8), atol=1e-10)
    assert dec.reconstruction_residual(u) < 1e-8


def test_eig_modulus_drift_raises():
    # passes the unitarity gate with a loose tolerance, then fails the drift check
    m = np.diag([1.0, 1.0 + 1e-6])
    u = UnitaryMatrix(m, tol=1e-3)
    with pytest.raises(NumericalInstabilityError):
        eig_unitary(u)


def test_eig_deterministic():
    u = random_unitary(8, 5)
    a, b = eig_unitary(u), eig_unitary(u)
    np.testing.assert_array_equal(a.phases, b.phases)
    np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)


@pytest.mark.parametrize("seed", range(50))
def test_random_su2_special_unitary(seed):
    u = random_su2(seed)
    assert unitarity_residual(u.data) < 1e-9
    assert abs(np.linalg.det(u.data) - 1) < 1e-9


def test_random_su2_deterministic():
    np.testing.assert_array_equal(random_su2(7).data, random_su2(7).data)


def test_random_su2_trace_distribution():
    ours = np.mean([abs(np.trace(random_su2(s).data)) / 2 for s in range(10_000)])
    # independent Monte Carlo from the parameterization: |tr|/2 = |cos(g/2) cos((phi+lam)/2)|
    rng = np.random.default_rng(2024)
    g = rng.uniform(0, np.pi, 200_000)
    s = rng.uniform(0, 2 * np.pi, 200_000) + rng.uniform(0, 2 * np.pi, 200_000)
    oracle = np.mean(np.abs(np.cos(g / 2) * np.cos(s / 2)))
    assert abs(ours - oracle) < 0.05
