import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resonator_synth import gates
from resonator_synth.fock import HilbertSpace, StateVector
from resonator_synth.gates import (A, B, R, Z, apply_gate, gate_A, gate_B, gate_matrix, gate_R,
                                   gate_Z)
from resonator_synth.hamiltonian import build_hamiltonian, unitary_constant

from conftest import quiet_params, random_state

SPACE = HilbertSpace(4, 3)
angles = st.floats(0.0, 4 * np.pi, allow_nan=False)
phases = st.floats(0.0, 2 * np.pi, allow_nan=False)
diagonals = st.integers(-3, 4)


def gate_descriptors():
    return st.one_of(
        st.builds(A, angles),
        st.builds(B, angles),
        st.builds(R, diagonals, angles, phases),
        st.builds(Z, phases),
    )


def basis(q, a, b, space=SPACE):
    return StateVector.basis(space, q, a, b)


def test_swap_examples():
    s = SPACE
    out = gate_A(s, np.pi / 2) @ basis(1, 0, 0)
    assert out[(0, 1, 0)] == pytest.approx(-1j)
    out = gate_A(s, np.pi / (2 * np.sqrt(2))) @ basis(1, 1, 0)
    assert out[(0, 2, 0)] == pytest.approx(-1j)
    out = gate_B(s, np.pi / 2) @ basis(1, 0, 0)
    assert out[(0, 0, 1)] == pytest.approx(-1j)
    out = gate_B(s, np.pi / (2 * np.sqrt(3))) @ basis(1, 0, 2)
    assert out[(0, 0, 3)] == pytest.approx(-1j)


@given(angles)
def test_swaps_leave_partnerless_states_alone(theta):
    assert np.allclose((gate_A(SPACE, theta) @ basis(0, 0, 2)).amplitudes, basis(0, 0, 2).amplitudes)
    assert np.allclose((gate_B(SPACE, theta) @ basis(0, 3, 0)).amplitudes, basis(0, 3, 0).amplitudes)


def test_rotation_examples():
    out = gate_R(SPACE, 0, np.pi / 2, 0.0) @ basis(0, 0, 0)
    assert out[(0, 0, 0)] == pytest.approx(1 / np.sqrt(2))
    assert out[(1, 0, 0)] == pytest.approx(-1j / np.sqrt(2))
    start = StateVector(SPACE, -basis(0, 1, 0).amplitudes)
    out = gate_R(SPACE, 1, np.pi, 0.0) @ start
    assert out[(1, 1, 0)] == pytest.approx(1j)


def test_R_matrix_entries_match_convention():
    theta, phi = 1.3, 0.7
    m = gate_R(SPACE, -1, theta, phi).matrix
    i0, i1 = SPACE.index(0, 1, 2), SPACE.index(1, 1, 2)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    assert m[i0, i0] == pytest.approx(c)
    assert m[i0, i1] == pytest.approx(-1j * np.exp(-1j * phi) * s)
    assert m[i1, i0] == pytest.approx(-1j * np.exp(1j * phi) * s)


@given(diagonals, angles, phases)
def test_R_is_selective(n, theta, phi):
    m = gate_R(SPACE, n, theta, phi).matrix
    _, n_a, n_b = SPACE.quantum_numbers
    off = n_a - n_b != n
    assert np.allclose(m[np.ix_(off, off)], np.eye(off.sum()), atol=1e-14)
    assert np.allclose(m[np.ix_(off, ~off)], 0, atol=1e-14)


@given(gate_descriptors())
def test_gates_are_unitary(g):
    assert gate_matrix(g, SPACE).is_unitary(1e-12)


@given(gate_descriptors(), st.integers(0, 2**32 - 1))
def test_fast_route_matches_dense_route(g, seed):
    psi = random_state(SPACE, np.random.default_rng(seed))
    dense = gate_matrix(g, SPACE)
    assert np.allclose(apply_gate(g, psi).amplitudes, (dense @ psi).amplitudes, atol=1e-12)
    assert np.allclose(apply_gate(g, psi, inverse=True).amplitudes, (dense.dag @ psi).amplitudes,
                       atol=1e-12)


@given(angles, angles)
def test_swap_one_parameter_groups(t1, t2):
    for build in (gate_A, gate_B):
        lhs = (build(SPACE, t1) @ build(SPACE, t2)).matrix
        assert np.allclose(lhs, build(SPACE, t1 + t2).matrix, atol=1e-10)


@given(diagonals, angles, angles, phases)
def test_R_composes_on_one_axis(n, t1, t2, phi):
    lhs = (gate_R(SPACE, n, t1, phi) @ gate_R(SPACE, n, t2, phi)).matrix
    assert np.allclose(lhs, gate_R(SPACE, n, t1 + t2, phi).matrix, atol=1e-10)


@given(diagonals, diagonals, angles, angles, phases, phases)
def test_R_on_distinct_diagonals_commute(n1, n2, t1, t2, p1, p2):
    if n1 == n2:
        return
    x = gate_R(SPACE, n1, t1, p1)
    y = gate_R(SPACE, n2, t2, p2)
    assert np.allclose((x @ y).matrix, (y @ x).matrix, rtol=0, atol=1e-15)


def test_R_is_4pi_periodic_not_2pi():
    full = gate_R(SPACE, 0, 2 * np.pi, 0.3).matrix
    _, n_a, n_b = SPACE.quantum_numbers
    on = n_a == n_b
    assert np.allclose(np.diag(full)[on], -1)
    assert np.allclose(gate_R(SPACE, 0, 4 * np.pi, 0.3).matrix, np.eye(SPACE.dim))


def test_angles_are_not_wrapped():
    g = A(2 * np.pi + 0.5)
    assert g.theta == pytest.approx(2 * np.pi + 0.5)
    assert not np.allclose(gate_matrix(g, SPACE).matrix, gate_A(SPACE, 0.5).matrix)
    assert R(1, 1.0, 2 * np.pi + 0.25).phi == pytest.approx(0.25)
    assert Z(-0.5).theta == pytest.approx(2 * np.pi - 0.5)


def test_descriptor_validation():
    with pytest.raises(ValueError):
        gates.GateDescriptor("X", 1.0)
    with pytest.raises(ValueError):
        gates.GateDescriptor("R", 1.0)
    with pytest.raises(ValueError):
        A(-0.1)
    assert Z(0.3).is_virtual and not A(0.3).is_virtual


def test_Z_is_a_qubit_phase():
    m = gate_Z(SPACE, 0.4).matrix
    q, _, _ = SPACE.quantum_numbers
    assert np.allclose(np.diag(m), np.where(q == 1, np.exp(-0.4j), 1.0))


@pytest.mark.parametrize("axis", ["a", "b"])
def test_ideal_swap_matches_full_hamiltonian_without_spectator(axis):
    # resonant qubit, other coupling switched off: exp(-iHt) in the bare frame is the ideal swap
    if axis == "a":
        p = quiet_params(6.3, 7.7, 6.3, 70.0, 0.0, 7.0, 3, 3)
        w, g, ideal = p.omega_a, p.g_a, gate_A
    else:
        p = quiet_params(6.3, 7.7, 7.7, 0.0, 70.0, 7.0, 3, 3)
        w, g, ideal = p.omega_b, p.g_b, gate_B
    theta = 1.234
    t = theta / g
    h = build_hamiltonian(p, w).matrix
    h0 = np.diag(np.diag(h)).real
    u = np.diag(np.exp(1j * np.diag(h0) * t)) @ unitary_constant(h, t)
    assert np.max(np.abs(u - ideal(p.space, theta).matrix)) < 1e-9


def test_apply_sequence_matches_product():
    seq = [R(0, 0.7, 0.2), A(0.9), Z(1.1), B(0.4), R(-1, 2.0, 1.0)]
    psi = random_state(SPACE, np.random.default_rng(3))
    u = np.eye(SPACE.dim)
    for g in seq:
        u = gate_matrix(g, SPACE).matrix @ u
    assert np.allclose(gates.apply_sequence(seq, psi).amplitudes, u @ psi.amplitudes, atol=1e-12)
