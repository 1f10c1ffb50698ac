import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpe.entropy import pseudo_entropy
from qpe.errors import DomainError, ShapeError, ValidationError
from qpe.feature_maps import (
    EncoderKind,
    EncoderSpec,
    amplitude_gates,
    amplitude_tree,
    embed_controlled,
    encode_amplitude,
    encode_angle,
    encode_circle,
    encode_expressivity,
    encode_iqp,
    encode_phase_product,
    encode_symmetric,
    fidelity_gram,
    gate_hadamard,
    gate_phase,
    gate_rx,
    gate_ry,
    gate_ry_tilde,
    gate_s,
    gate_swap,
    gate_t,
    gate_x,
    hadamard_layer,
)
from qpe.spectral import eig_unitary, kron, matmul

small = st.floats(min_value=-3, max_value=3, allow_nan=False)


def test_rotation_entries():
    np.testing.assert_allclose(gate_rx(0).data, np.eye(2))
    t = 0.9
    c, s = math.cos(t / 2), math.sin(t / 2)
    np.testing.assert_allclose(gate_rx(t).data, [[c, -1j * s], [-1j * s, c]], atol=1e-15)


@given(st.floats(min_value=0, max_value=1))
def test_ry_arccos_amplitudes(a):
    state = gate_ry(2 * math.acos(a)).data[:, 0]
    np.testing.assert_allclose(state, [a, math.sqrt(1 - a * a)], atol=1e-12)
    np.testing.assert_allclose(gate_ry_tilde(a).data, gate_ry(2 * math.acos(a)).data)


def test_phase_gate_special_values():
    np.testing.assert_allclose(gate_phase(0).data, np.eye(2))
    np.testing.assert_allclose(gate_phase(math.pi / 2).data, [[1, 0], [0, 1j]], atol=1e-15)
    np.testing.assert_allclose(gate_phase(math.pi / 4).data, gate_t().data, atol=1e-15)
    np.testing.assert_allclose(gate_s().data, gate_phase(math.pi / 2).data, atol=1e-15)


def test_hadamard():
    h = gate_hadamard()
    np.testing.assert_allclose(matmul(h, h).data, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(h.data[:, 0], [1 / math.sqrt(2)] * 2)


def test_embed_controlled_identity_and_range():
    np.testing.assert_array_equal(embed_controlled(np.eye(2), 0, 1, 1, 2).data, np.eye(4))
    with pytest.raises(ShapeError):
        embed_controlled(np.eye(2), 0, 1, 2, 2)
    with pytest.raises(ShapeError):
        embed_controlled(np.eye(2), 3, 1, 0, 2)


@given(small)
def test_controlled_phase_symmetric(theta):
    a = embed_controlled(gate_phase(theta), 1, 1, 0, 2).data
    b = embed_controlled(gate_phase(theta), 0, 1, 1, 2).data
    want = np.diag([1, 1, 1, np.exp(1j * theta)])
    np.testing.assert_allclose(a, want, atol=1e-15)
    np.testing.assert_allclose(b, want, atol=1e-15)


def test_embed_controlled_qubit_order():
    # CNOT with control 0 (MSB) flips |10> <-> |11>
    cx = embed_controlled(gate_x(), 0, 1, 1, 2).data
    want = np.eye(4)[[0, 1, 3, 2]]
    np.testing.assert_allclose(cx, want)


def test_encode_angle_identity():
    np.testing.assert_allclose(encode_angle([0, 0, 0]).data, np.eye(8), atol=1e-15)


@given(st.floats(min_value=-3, max_value=3))
def test_encode_angle_single(theta):
    s = pseudo_entropy(encode_angle([theta]))
    assert s.real == pytest.approx(theta * math.sin(theta / 2), abs=1e-12)
    assert abs(s.imag) < 1e-12


def test_encode_angle_two_features_brute_force():
    x = (math.pi / 2, math.pi / 2)
    u = np.kron(gate_rx(x[0]).data, gate_rx(x[1]).data)
    lam = np.linalg.eigvals(u)
    brute = complex(-np.sum(lam * np.log(lam)))
    # phases add: {+-pi/4} + {+-pi/4} = {-pi/2, 0, 0, pi/2}
    closed = 2 * (math.pi / 2) * math.sin(math.pi / 2)
    s = pseudo_entropy(encode_angle(x))
    assert complex(s) == pytest.approx(brute, abs=1e-12)
    assert s.real == pytest.approx(closed, abs=1e-12)


@given(st.floats(min_value=-3, max_value=3))
def test_phase_product_single(theta):
    s = pseudo_entropy(encode_phase_product([theta]))
    assert s.real == pytest.approx(theta * math.sin(theta), abs=1e-12)
    assert s.imag == pytest.approx(-theta * math.cos(theta), abs=1e-12)


def test_phase_product_special_values():
    s = pseudo_entropy(encode_phase_product([math.pi / 2]))
    assert s.real == pytest.approx(math.pi / 2, abs=1e-15)
    assert abs(s.imag) < 1e-15
    z = pseudo_entropy(encode_phase_product([0, 0]))
    assert z.real == 0 and z.imag == 0


@given(st.floats(min_value=0.01, max_value=2 * math.pi - 0.01))
def test_iqp_single_qubit(x):
    h = gate_hadamard().data
    p = gate_phase(x).data
    np.testing.assert_allclose(encode_iqp([x], "IQP").data, h @ p @ h, atol=1e-12)
    np.testing.assert_allclose(encode_iqp([x], "IQP_SO").data, p, atol=1e-15)
    s = pseudo_entropy(encode_iqp([x], "IQP_SO"))
    if abs(x - math.pi) > 1e-6:
        a = math.remainder(x, 2 * math.pi)  # principal phase
        assert s.real == pytest.approx(a * math.sin(a), abs=1e-12)
        assert s.imag == pytest.approx(-a * math.cos(a), abs=1e-12)


def _iqp_oracle_so(x):
    """Gate-by-gate product of P layers and CP gates, built from embed_controlled."""
    n = len(x)
    u = np.eye(2**n, dtype=complex)
    for k in range(n):
        u = np.kron(np.kron(np.eye(2**k), gate_phase(x[k]).data), np.eye(2 ** (n - k - 1))) @ u
    for k in range(n):
        for j in range(k + 1, n):
            u = embed_controlled(gate_phase((math.pi - x[k]) * (math.pi - x[j])), k, 1, j, n).data @ u
    return u


def test_iqp_pi_pi_brute_force():
    x = (math.pi, math.pi)
    so = _iqp_oracle_so(x)
    # all CP angles vanish, so D = P(pi) (x) P(pi) = diag(1, -1, -1, 1)
    np.testing.assert_allclose(so, np.diag([1, -1, -1, 1]), atol=1e-15)
    h2 = np.kron(gate_hadamard().data, gate_hadamard().data)
    np.testing.assert_allclose(encode_iqp(x, "IQP_SO").data, so, atol=1e-12)
    np.testing.assert_allclose(encode_iqp(x, "IQP").data, h2 @ so @ h2, atol=1e-12)
    np.testing.assert_allclose(encode_iqp(x, "IQP_FL").data, so @ h2 @ so @ h2, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=0, max_value=2 * math.pi), min_size=2, max_size=4))
def test_iqp_matches_gate_oracle(x):
    so = _iqp_oracle_so(x)
    h = hadamard_layer(len(x))
    np.testing.assert_allclose(encode_iqp(x, "IQP_SO").data, so, atol=1e-12)
    np.testing.assert_allclose(encode_iqp(x, "IQP").data, h @ so @ h, atol=1e-12)
    np.testing.assert_allclose(encode_iqp(x, "IQP_FL").data, so @ h @ so @ h, atol=1e-12)


def test_amplitude_tree_examples():
    t = amplitude_tree([0.17, 0.4, 0.23, 0.2])
    np.testing.assert_allclose(t.levels[1], [0.57, 0.43])
    assert t.levels[0][0] == pytest.approx(1.0)
    np.testing.assert_allclose(amplitude_tree([0.25] * 4).levels[1], [0.5, 0.5])
    point = amplitude_tree([1, 0, 0, 0])
    assert [point.mass(d, 0) for d in range(3)] == [1, 1, 1]


@settings(deadline=None)
@given(st.integers(1, 4), st.integers(0, 10_000))
def test_amplitude_tree_parent_sums(m, seed):
    p = np.random.default_rng(seed).dirichlet(np.ones(2**m))
    t = amplitude_tree(p)
    for level in range(t.depth):
        for i in range(2**level):
            assert abs(t.mass(level, i) - sum(t.children(level, i))) < 1e-12


def test_amplitude_tree_errors():
    with pytest.raises(ShapeError):
        amplitude_tree([0.5, 0.25, 0.25])
    with pytest.raises(DomainError):
        amplitude_tree([0.5, 0.6])
    with pytest.raises(DomainError):
        amplitude_tree([1.5, -0.5])


def test_amplitude_gate_list():
    gates = amplitude_gates([0.17, 0.4, 0.23, 0.2])
    (c0, t0, a0), (c1, t1, a1), (c2, t2, a2) = gates
    assert (c0, t0) == ({}, 0) and a0 == pytest.approx(math.sqrt(0.57))
    assert (c1, t1) == ({0: 0}, 1) and a1 == pytest.approx(math.sqrt(0.17 / 0.57))
    assert (c2, t2) == ({0: 1}, 1) and a2 == pytest.approx(math.sqrt(0.23 / 0.43))


def test_amplitude_state_multiset():
    p = np.array([0.17, 0.4, 0.23, 0.2])
    state = encode_amplitude(p).data[:, 0]
    np.testing.assert_allclose(np.sort(np.abs(state) ** 2), np.sort(p), atol=1e-9)
    np.testing.assert_allclose(np.abs(state) ** 2, p, atol=1e-9)


def test_amplitude_fig2_composition():
    a0, a1, a2 = math.sqrt(0.57), math.sqrt(0.17 / 0.57), math.sqrt(0.23 / 0.43)
    r0 = np.kron(gate_ry_tilde(a0).data, np.eye(2))
    c1 = embed_controlled(gate_ry_tilde(a1), 0, 0, 1, 2).data
    c2 = embed_controlled(gate_ry_tilde(a2), 0, 1, 1, 2).data
    state = (c2 @ c1 @ r0)[:, 0]
    np.testing.assert_allclose(state**2, [0.17, 0.4, 0.23, 0.2], atol=1e-12)
    np.testing.assert_allclose(encode_amplitude([0.17, 0.4, 0.23, 0.2]).data, c2 @ c1 @ r0, atol=1e-12)


def test_amplitude_point_mass_is_identity():
    np.testing.assert_allclose(encode_amplitude([1, 0]).data, np.eye(2), atol=1e-15)


@settings(deadline=None)
@given(st.integers(1, 4), st.integers(0, 10_000))
def test_amplitude_random(m, seed):
    p = np.random.default_rng(seed).dirichlet(np.ones(2**m) * 0.5)
    probs = np.abs(encode_amplitude(p).data[:, 0]) ** 2
    np.testing.assert_allclose(probs, p, atol=1e-9)


@given(st.floats(min_value=-1.5, max_value=1.5))
def test_circle_closed_forms(theta):
    assert pseudo_entropy(encode_circle(theta, "amplitude")).real == pytest.approx(2 * theta * math.sin(theta), abs=1e-9)
    c = math.cos(2 * theta)
    want = 2 * c * math.sin(c) + 2 * math.sin(1)
    assert pseudo_entropy(encode_circle(theta, "angle")).real == pytest.approx(want, abs=1e-9)


def test_circle_angle_at_quarter_pi():
    assert pseudo_entropy(encode_circle(math.pi / 4, "angle")).real == pytest.approx(2 * math.sin(1), abs=1e-12)
    assert 2 * math.sin(1) == pytest.approx(1.682942, abs=1e-6)


def test_expressivity_shallow_zero():
    np.testing.assert_allclose(encode_expressivity(0.0, "shallow").data, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(encode_expressivity(0.0, "deep").data, np.eye(2), atol=1e-15)


@given(small, small)
def test_symmetric_identities(x1, x2):
    sw = gate_swap().data
    xx = kron(gate_x(), gate_x()).data
    for axis in ("y", "z"):
        u = encode_symmetric(x1, x2, axis).data
        np.testing.assert_allclose(encode_symmetric(x2, x1, axis).data, sw @ u @ sw, atol=1e-12)
        np.testing.assert_allclose(encode_symmetric(-x1, -x2, axis).data, xx @ u @ xx, atol=1e-12)


def test_encoder_spec_checks():
    with pytest.raises(ValidationError):
        EncoderSpec(EncoderKind.CIRCLE_ANGLE, qubit_count=3)
    with pytest.raises(ShapeError):
        EncoderSpec(EncoderKind.ANGLE, qubit_count=2).encode([1.0])
    assert EncoderSpec.from_name("iqp-so").kind is EncoderKind.IQP_SO
    assert EncoderSpec.from_name("IQP_FL").kind is EncoderKind.IQP_FL
    assert EncoderSpec(EncoderKind.AMPLITUDE, qubit_count=2).expected_input_dim() == 4


def test_su_normalize_option():
    spec = EncoderSpec(EncoderKind.PHASE_PRODUCT, options={"su_normalize": True})
    u = spec.encode([0.3, 1.2])
    assert abs(np.linalg.det(u.data) - 1) < 1e-12


def test_gram_brute_force():
    pts = np.random.default_rng(0).uniform(0, 2 * math.pi, (3, 2))
    spec = EncoderSpec(EncoderKind.ANGLE)
    g = fidelity_gram(pts, spec)
    for i in range(3):
        for j in range(3):
            ui = np.kron(gate_rx(pts[i, 0]).data, gate_rx(pts[i, 1]).data)
            uj = np.kron(gate_rx(pts[j, 0]).data, gate_rx(pts[j, 1]).data)
            assert g[i, j] == pytest.approx(abs((ui.conj().T @ uj)[0, 0]) ** 2, abs=1e-12)


def test_gram_properties():
    pts = np.array([[0.1, 0.2], [0.1, 0.2], [1.0, 3.0], [2.0, 0.5]])
    g = fidelity_gram(pts, EncoderSpec(EncoderKind.IQP))
    assert np.all(np.diag(g) == 1)
    assert g[0, 1] == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_array_equal(g, g.T)
    assert np.all((g >= 0) & (g <= 1))


def test_iqp_rejects_nonfinite():
    with pytest.raises(ValidationError):
        encode_iqp([np.nan, 1.0])


def test_eig_iqp_so_is_diagonal():
    x = [0.3, 1.7, 2.2]
    dec = eig_unitary(encode_iqp(x, "IQP_SO"))
    assert dec.reconstruction_residual(encode_iqp(x, "IQP_SO")) < 1e-10


@given(small, small)
def test_symmetric_variants_share_spectrum(x1, x2):
    # R_y and R_z are unitarily similar, so the two variants have equal pseudo-entropy
    a = pseudo_entropy(encode_symmetric(x1, x2, "y"))
    b = pseudo_entropy(encode_symmetric(x1, x2, "z"))
    if not (a.branch_flag or b.branch_flag):
        assert complex(a) == pytest.approx(complex(b), abs=1e-10)
