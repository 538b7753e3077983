"""Idealized primitive gates A, B, R (plus the virtual qubit phase Z).

Conventions (fixed by the NOON trajectory):

* ``A(theta) = exp(-i theta (s+ a + s- a+))``: the pair (|1,n_a,n_b>, |0,n_a+1,n_b>)
  rotates by theta*sqrt(n_a+1) with cos on the diagonal and -i sin off it.
* ``B(theta)`` likewise with (|1,n_a,n_b>, |0,n_a,n_b+1>) and sqrt(n_b+1).
* ``R(n, theta, phi)`` acts on (|0,n_a,n_b>, |1,n_a,n_b>) for every node with
  n_a - n_b = n as [[c, -i e^{-i phi} s], [-i e^{i phi} s, c]], c, s = cos, sin(theta/2).
* ``Z(chi) = exp(-i chi |1><1|)`` is a zero-duration frame rotation of the qubit.

Rotation angles are not wrapped: the A/B rates sqrt(n) are incommensurate and
R is 4*pi periodic, so theta mod 2*pi would change the operator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .fock import DenseOperator, HilbertSpace, StateVector, build_ladder_operators

KINDS = ("A", "B", "R", "Z")


@dataclass(frozen=True)
class GateDescriptor:
    kind: str
    theta: float
    phi: float = 0.0
    n: int | None = None
    node: tuple | None = None  # (n_a, n_b) an R pulse is aimed at; used for drive tuning

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "R" and self.n is None:
            raise ValueError("R gate needs a diagonal index n")
        if self.kind in ("A", "B", "R") and self.theta < 0:
            raise ValueError(f"rotation angle must be >= 0, got {self.theta}")
        object.__setattr__(self, "phi", float(np.mod(self.phi, 2 * np.pi)))
        if self.kind == "Z":
            object.__setattr__(self, "theta", float(np.mod(self.theta, 2 * np.pi)))

    @property
    def is_virtual(self) -> bool:
        return self.kind == "Z"

    def __str__(self):
        if self.kind == "R":
            return f"R(n={self.n}, theta={self.theta:.6g}, phi={self.phi:.6g})"
        return f"{self.kind}({self.theta:.6g})"


def A(theta: float) -> GateDescriptor:
    return GateDescriptor("A", theta)


def B(theta: float) -> GateDescriptor:
    return GateDescriptor("B", theta)


def R(n: int, theta: float, phi: float = 0.0, node: tuple | None = None) -> GateDescriptor:
    return GateDescriptor("R", theta, phi, int(n), node)


def Z(chi: float) -> GateDescriptor:
    return GateDescriptor("Z", chi)


# dense constructions, via matrix exponentials of the generators

def jc_generator_a(space: HilbertSpace) -> np.ndarray:
    ops = build_ladder_operators(space)
    return (ops.sigma_plus @ ops.a).matrix + (ops.sigma_minus @ ops.a_dag).matrix


def jc_generator_b(space: HilbertSpace) -> np.ndarray:
    ops = build_ladder_operators(space)
    return (ops.sigma_plus @ ops.b).matrix + (ops.sigma_minus @ ops.b_dag).matrix


def diagonal_projector(space: HilbertSpace, n: int) -> np.ndarray:
    _, n_a, n_b = space.quantum_numbers
    return np.diag((n_a - n_b == n).astype(complex))


def gate_A(space: HilbertSpace, theta: float) -> DenseOperator:
    return DenseOperator(space, expm(-1j * theta * jc_generator_a(space)))


def gate_B(space: HilbertSpace, theta: float) -> DenseOperator:
    return DenseOperator(space, expm(-1j * theta * jc_generator_b(space)))


def gate_R(space: HilbertSpace, n: int, theta: float, phi: float) -> DenseOperator:
    ops = build_ladder_operators(space)
    drive = np.exp(1j * phi) * ops.sigma_plus.matrix + np.exp(-1j * phi) * ops.sigma_minus.matrix
    proj = diagonal_projector(space, n)
    return DenseOperator(space, expm(-0.5j * theta * proj @ drive))


def gate_Z(space: HilbertSpace, chi: float) -> DenseOperator:
    q, _, _ = space.quantum_numbers
    return DenseOperator(space, np.diag(np.exp(-1j * chi * q)))


def gate_matrix(gate: GateDescriptor, space: HilbertSpace) -> DenseOperator:
    if gate.kind == "A":
        return gate_A(space, gate.theta)
    if gate.kind == "B":
        return gate_B(space, gate.theta)
    if gate.kind == "R":
        return gate_R(space, gate.n, gate.theta, gate.phi)
    return gate_Z(space, gate.theta)


# fast in-place application on the (2, na+1, nb+1) amplitude grid

def _jc_pairs(grid, theta, axis, sign):
    n_max = grid.shape[axis + 1] - 1
    if n_max == 0:
        return
    rates = np.sqrt(np.arange(1, n_max + 1))
    c = np.cos(theta * rates)
    s = sign * 1j * np.sin(theta * rates)
    if axis == 0:
        upper = grid[1, :-1, :]
        lower = grid[0, 1:, :]
        c, s = c[:, None], s[:, None]
    else:
        upper = grid[1, :, :-1]
        lower = grid[0, :, 1:]
    new_upper = c * upper + s * lower
    new_lower = s * upper + c * lower
    upper[...] = new_upper
    lower[...] = new_lower


def _rotate_diagonal(grid, n, theta, phi, sign):
    na, nb = grid.shape[1:]
    a_idx = np.arange(max(0, n), min(na, nb + n))
    if a_idx.size == 0:
        return
    b_idx = a_idx - n
    u = grid[0, a_idx, b_idx]
    v = grid[1, a_idx, b_idx]
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    grid[0, a_idx, b_idx] = c * u + sign * 1j * np.exp(-1j * phi) * s * v
    grid[1, a_idx, b_idx] = sign * 1j * np.exp(1j * phi) * s * u + c * v


def apply_gate(gate: GateDescriptor, state: StateVector, inverse: bool = False) -> StateVector:
    """Apply ``gate`` (or its adjoint) to ``state`` using the pairwise rotation formulas."""
    out = state.copy()
    grid = out.as_grid()
    sign = 1.0 if inverse else -1.0
    if gate.kind == "A":
        _jc_pairs(grid, gate.theta, 0, sign)
    elif gate.kind == "B":
        _jc_pairs(grid, gate.theta, 1, sign)
    elif gate.kind == "R":
        _rotate_diagonal(grid, gate.n, gate.theta, gate.phi, sign)
    else:
        grid[1] *= np.exp(sign * 1j * gate.theta)
    return out


def apply_sequence(gates, state: StateVector) -> StateVector:
    for g in gates:
        state = apply_gate(g, state)
    return state
