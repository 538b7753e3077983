"""Truncated qubit x resonator A x resonator B space, states and operators.

Basis ordering is row-major with the qubit slowest, then n_a, then n_b:

    index = (q * (na_max + 1) + n_a) * (nb_max + 1) + n_b
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import numpy as np

from .errors import QuantumNumberError, SpaceMismatchError

NORM_TOL = 1e-9


@dataclass(frozen=True)
class HilbertSpace:
    na_max: int
    nb_max: int
    qubit_dim: int = field(default=2, init=False)

    def __post_init__(self):
        if self.na_max < 0 or self.nb_max < 0:
            raise ValueError(f"cutoffs must be non-negative, got ({self.na_max}, {self.nb_max})")

    @property
    def dim(self) -> int:
        return self.qubit_dim * (self.na_max + 1) * (self.nb_max + 1)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.qubit_dim, self.na_max + 1, self.nb_max + 1)

    def index(self, q: int, n_a: int, n_b: int) -> int:
        return basis_index(self, q, n_a, n_b)

    def triple(self, index: int) -> tuple[int, int, int]:
        return basis_triple(self, index)

    def labels(self) -> Iterator[tuple[int, int, int]]:
        """All (q, n_a, n_b) in index order."""
        for q in range(2):
            for n_a in range(self.na_max + 1):
                for n_b in range(self.nb_max + 1):
                    yield q, n_a, n_b

    @cached_property
    def quantum_numbers(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Arrays (q, n_a, n_b) over flat indices."""
        q, n_a, n_b = np.indices(self.shape)
        return q.ravel(), n_a.ravel(), n_b.ravel()


def basis_index(space: HilbertSpace, q: int, n_a: int, n_b: int) -> int:
    if q not in (0, 1):
        raise QuantumNumberError(f"qubit level q={q} not in {{0, 1}}")
    if not 0 <= n_a <= space.na_max:
        raise QuantumNumberError(f"n_a={n_a} outside [0, {space.na_max}]")
    if not 0 <= n_b <= space.nb_max:
        raise QuantumNumberError(f"n_b={n_b} outside [0, {space.nb_max}]")
    return (q * (space.na_max + 1) + n_a) * (space.nb_max + 1) + n_b


def basis_triple(space: HilbertSpace, index: int) -> tuple[int, int, int]:
    if not 0 <= index < space.dim:
        raise QuantumNumberError(f"flat index {index} outside [0, {space.dim})")
    rest, n_b = divmod(index, space.nb_max + 1)
    q, n_a = divmod(rest, space.na_max + 1)
    return q, n_a, n_b


@dataclass
class StateVector:
    space: HilbertSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.space.dim,):
            raise SpaceMismatchError(
                f"amplitude length {self.amplitudes.shape} does not match dim {self.space.dim}"
            )

    @classmethod
    def basis(cls, space: HilbertSpace, q: int, n_a: int, n_b: int) -> StateVector:
        amps = np.zeros(space.dim, dtype=complex)
        amps[basis_index(space, q, n_a, n_b)] = 1.0
        return cls(space, amps)

    @classmethod
    def vacuum(cls, space: HilbertSpace) -> StateVector:
        return cls.basis(space, 0, 0, 0)

    @classmethod
    def from_components(cls, space: HilbertSpace, components: dict, normalize: bool = True) -> StateVector:
        """Build from ``{(q, n_a, n_b): amplitude}``."""
        amps = np.zeros(space.dim, dtype=complex)
        for (q, n_a, n_b), c in components.items():
            amps[basis_index(space, q, n_a, n_b)] += c
        state = cls(space, amps)
        return state.normalized() if normalize else state

    def __getitem__(self, qnum: tuple[int, int, int]) -> complex:
        return complex(self.amplitudes[basis_index(self.space, *qnum)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> StateVector:
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.space, self.amplitudes / nrm)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol

    def copy(self) -> StateVector:
        return StateVector(self.space, self.amplitudes.copy())

    def as_grid(self) -> np.ndarray:
        """Amplitudes reshaped to (2, na_max+1, nb_max+1)."""
        return self.amplitudes.reshape(self.space.shape)

    def excited_weight(self) -> float:
        """Total probability with the qubit in |1>."""
        return float(np.sum(np.abs(self.as_grid()[1]) ** 2))


@dataclass(frozen=True)
class DenseOperator:
    space: HilbertSpace
    matrix: np.ndarray

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            _check_same(self.space, other.space)
            return StateVector(self.space, self.matrix @ other.amplitudes)
        if isinstance(other, DenseOperator):
            _check_same(self.space, other.space)
            return DenseOperator(self.space, self.matrix @ other.matrix)
        return NotImplemented

    @property
    def dag(self) -> DenseOperator:
        return DenseOperator(self.space, self.matrix.conj().T)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def is_unitary(self, tol: float = 1e-9) -> bool:
        eye = np.eye(self.space.dim)
        return bool(np.max(np.abs(self.matrix.conj().T @ self.matrix - eye)) <= tol)


@dataclass(frozen=True)
class LadderOperators:
    a: DenseOperator
    a_dag: DenseOperator
    b: DenseOperator
    b_dag: DenseOperator
    sigma_plus: DenseOperator
    sigma_minus: DenseOperator

    def __iter__(self):
        return iter((self.a, self.a_dag, self.b, self.b_dag, self.sigma_plus, self.sigma_minus))


def _annihilator(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def build_ladder_operators(space: HilbertSpace) -> LadderOperators:
    """Return a, a+, b, b+, sigma+, sigma- embedded in the full space.

    Truncation is hard: a+ applied to |na_max> gives zero.
    """
    id_q = np.eye(2)
    id_a = np.eye(space.na_max + 1)
    id_b = np.eye(space.nb_max + 1)
    a = np.kron(np.kron(id_q, _annihilator(space.na_max)), id_b)
    b = np.kron(np.kron(id_q, id_a), _annihilator(space.nb_max))
    sp = np.zeros((2, 2), dtype=complex)
    sp[1, 0] = 1.0
    sigma_plus = np.kron(np.kron(sp, id_a), id_b)
    ops = [a, a.conj().T, b, b.conj().T, sigma_plus, sigma_plus.conj().T]
    return LadderOperators(*(DenseOperator(space, m) for m in ops))


def number_operators(space: HilbertSpace) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Diagonals of n_q, n_a, n_b."""
    q, n_a, n_b = space.quantum_numbers
    return q.astype(float), n_a.astype(float), n_b.astype(float)


def _check_same(s1: HilbertSpace, s2: HilbertSpace):
    if s1 != s2:
        raise SpaceMismatchError(f"spaces differ: {s1} vs {s2}")


def fidelity(psi: StateVector, phi: StateVector) -> float:
    """|<psi|phi>|^2, clipped to [0, 1]."""
    _check_same(psi.space, phi.space)
    overlap = np.vdot(psi.amplitudes, phi.amplitudes)
    return float(min(1.0, abs(overlap) ** 2))


def partial_trace_qubit(psi: StateVector) -> np.ndarray:
    """Reduced density matrix on A (x) B, indexed by n_a * (nb_max + 1) + n_b."""
    grid = psi.amplitudes.reshape(2, -1)
    return grid.T @ grid.conj()


def resonator_state(psi: StateVector) -> np.ndarray:
    """The (na_max+1, nb_max+1) amplitude table of the qubit-ground branch."""
    return psi.as_grid()[0].copy()
