"""Rotating-wave Hamiltonian, control segments and schedule propagation.

Two propagation modes share one schedule:

``ideal``
    each segment is replaced by the idealized gate it realizes (instantaneous
    shifts, perfect diagonal selectivity).
``full``
    the complete RWA Hamiltonian is integrated segment by segment.  Between
    segments the state is stored in the bare interaction frame, i.e. with the
    phases of ``omega_q(t) n_q + omega_a n_a + omega_b n_b`` removed, so full and
    ideal trajectories are directly comparable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import gates
from .dispersive import SystemParams, delta_omega
from .errors import NonHermitianError, NumericalError, SpaceMismatchError
from .fock import DenseOperator, HilbertSpace, StateVector, build_ladder_operators, number_operators

NORM_DRIFT_LIMIT = 1e-6
DEFAULT_STEP_FACTOR = 0.01  # h * max|eigenvalue| for the RK4 ramps
DEFAULT_RAMP = 1e-9
DRESSED_OVERLAP_MIN = 0.5 + 1e-6  # bare weight a dressed state must keep to inherit its label


# -- control segments -------------------------------------------------------

@dataclass(frozen=True)
class Shift:
    target: float
    ramp: float = DEFAULT_RAMP
    hold: float = 0.0
    gate_index: int | None = None

    @property
    def duration(self):
        return self.ramp + self.hold


@dataclass(frozen=True)
class ResonantA:
    duration: float
    gate_index: int | None = None


@dataclass(frozen=True)
class ResonantB:
    duration: float
    gate_index: int | None = None


@dataclass(frozen=True)
class Rabi:
    duration: float
    omega_d: float
    phase: float
    amplitude: float
    gate_index: int | None = None


@dataclass(frozen=True)
class VirtualPhase:
    """Zero-duration diagonal correction; amplitudes of listed states gain exp(i*phase)."""
    phases: dict = field(default_factory=dict)
    gate_index: int | None = None

    @property
    def duration(self):
        return 0.0

    def as_array(self, space: HilbertSpace) -> np.ndarray:
        out = np.zeros(space.dim)
        for (q, n_a, n_b), ph in self.phases.items():
            out[space.index(q, n_a, n_b)] = ph
        return out


ControlSegment = Union[Shift, ResonantA, ResonantB, Rabi, VirtualPhase]


@dataclass
class PulseSchedule:
    params: SystemParams
    segments: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def total_duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    def duration_by_kind(self) -> dict:
        out = {"Shift": 0.0, "ResonantA": 0.0, "ResonantB": 0.0, "Rabi": 0.0}
        for s in self.segments:
            name = type(s).__name__
            if name in out:
                out[name] += s.duration
        return out

    def validate(self):
        p = self.params
        for i, s in enumerate(self.segments):
            if s.duration < 0:
                raise ValueError(f"segment {i}: negative duration")
            if isinstance(s, Rabi) and s.amplitude < 0:
                raise ValueError(f"segment {i}: negative Rabi amplitude")
            if isinstance(s, Shift) and not p.omega_a <= s.target <= p.omega_b:
                raise ValueError(f"segment {i}: shift target outside [omega_a, omega_b]")
            if isinstance(s, Shift) and (s.ramp < 0 or s.hold < 0):
                raise ValueError(f"segment {i}: negative ramp or hold")


# -- Hamiltonian ------------------------------------------------------------

@dataclass(frozen=True)
class Drive:
    omega_d: float
    phase: float
    amplitude: float


class _Terms:
    """Static pieces of the Hamiltonian for one space (cached per space)."""

    _cache: dict = {}

    def __init__(self, space: HilbertSpace):
        ops = build_ladder_operators(space)
        self.n_q, self.n_a, self.n_b = number_operators(space)
        self.x_a = (ops.sigma_plus @ ops.a).matrix + (ops.sigma_minus @ ops.a_dag).matrix
        self.x_b = (ops.sigma_plus @ ops.b).matrix + (ops.sigma_minus @ ops.b_dag).matrix
        self.sp = ops.sigma_plus.matrix
        self.excitations = self.n_q + self.n_a + self.n_b

    @classmethod
    def get(cls, space: HilbertSpace) -> _Terms:
        if space not in cls._cache:
            cls._cache[space] = cls(space)
        return cls._cache[space]


def build_hamiltonian(p: SystemParams, omega_q: float, drive: Drive | None = None,
                      frame: str = "lab", t: float = 0.0,
                      frame_frequency: float | None = None) -> DenseOperator:
    """Hamiltonian of the qubit-two-resonator system.

    ``frame="lab"`` is the RWA Hamiltonian as written, with the drive term
    evaluated at time ``t``.  ``frame="drive"`` co-rotates every excitation at
    ``frame_frequency`` (default: the drive frequency), making the driven
    Hamiltonian time-independent with drive term (Omega/2)(e^{i phi} s+ + h.c.).
    """
    space = p.space
    terms = _Terms.get(space)
    if frame == "lab":
        shift = 0.0
    elif frame == "drive":
        if frame_frequency is None:
            if drive is None:
                raise ValueError("drive frame needs a drive or an explicit frame_frequency")
            frame_frequency = drive.omega_d
        shift = frame_frequency
    else:
        raise ValueError(f"unknown frame {frame!r}")

    diag = ((omega_q - shift) * terms.n_q + (p.omega_a - shift) * terms.n_a
            + (p.omega_b - shift) * terms.n_b)
    h = np.diag(diag).astype(complex) + p.g_a * terms.x_a + p.g_b * terms.x_b
    if drive is not None and drive.amplitude != 0:
        phase = drive.phase
        if frame == "lab":
            phase = drive.phase - drive.omega_d * t
        else:
            phase = drive.phase - (drive.omega_d - shift) * t
        term = 0.5 * drive.amplitude * np.exp(1j * phase) * terms.sp
        h = h + term + term.conj().T
    return DenseOperator(space, h)


def dressed_basis(p: SystemParams, omega_q: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of the drive-free Hamiltonian relabelled by the bare state they connect to.

    Returns (energies, vectors) with ``vectors[:, i]`` the dressed partner of bare
    state ``i``, phased so that its overlap with that bare state is real and
    positive.  Each bare state is matched to the eigenvector it overlaps most,
    which is unambiguous in the dispersive regime.
    """
    omega_q = p.omega_q if omega_q is None else omega_q
    h = build_hamiltonian(p, omega_q).matrix
    evals, evecs = np.linalg.eigh(h)
    weights = np.abs(evecs) ** 2
    match = np.argmax(weights, axis=1)
    best = weights[np.arange(len(match)), match]
    if len(set(match.tolist())) != len(match) or np.min(best) < DRESSED_OVERLAP_MIN:
        raise NumericalError("bare-to-dressed assignment is ambiguous (not dispersive)")
    vecs = evecs[:, match]
    diag = vecs[np.arange(len(match)), np.arange(len(match))]
    return evals[match], vecs * (diag.conj() / np.abs(diag))


def dressed_energies(p: SystemParams, omega_q: float | None = None) -> np.ndarray:
    """Eigenenergy of the drive-free Hamiltonian adiabatically connected to each bare state."""
    return dressed_basis(p, omega_q)[0]


def dressed_shifts(p: SystemParams, omega_q: float | None = None) -> np.ndarray:
    """Dressed minus bare energy for every basis state."""
    omega_q = p.omega_q if omega_q is None else omega_q
    q, n_a, n_b = number_operators(p.space)
    return dressed_energies(p, omega_q) - (omega_q * q + p.omega_a * n_a + p.omega_b * n_b)


def dressed_transition_frequency(p: SystemParams, n_a: int, n_b: int) -> float:
    """Exact |0,n_a,n_b> -> |1,n_a,n_b> frequency of the dressed (parked) system."""
    e = dressed_energies(p)
    return float(e[p.space.index(1, n_a, n_b)] - e[p.space.index(0, n_a, n_b)])


def _check_hermitian(h: np.ndarray):
    scale = max(1.0, float(np.max(np.abs(h))))
    if np.max(np.abs(h - h.conj().T)) > 1e-12 * scale:
        raise NonHermitianError("Hamiltonian is not Hermitian")


def unitary_constant(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian h via eigendecomposition."""
    _check_hermitian(h)
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def propagate_constant(H: DenseOperator, psi: StateVector, t: float) -> StateVector:
    if H.space != psi.space:
        raise SpaceMismatchError("Hamiltonian and state live on different spaces")
    if t == 0:
        _check_hermitian(H.matrix)
        return psi.copy()
    return StateVector(psi.space, unitary_constant(H.matrix, t) @ psi.amplitudes)


def rk4_propagate(hfunc: Callable[[float], np.ndarray], psi: np.ndarray, t0: float, t1: float,
                  n_steps: int) -> np.ndarray:
    """Fixed-step classical RK4 for i d(psi)/dt = H(t) psi."""
    h = (t1 - t0) / n_steps
    y = np.array(psi, dtype=complex)
    t = t0
    for _ in range(n_steps):
        k1 = -1j * (hfunc(t) @ y)
        hm = hfunc(t + 0.5 * h)
        k2 = -1j * (hm @ (y + 0.5 * h * k1))
        k3 = -1j * (hm @ (y + 0.5 * h * k2))
        k4 = -1j * (hfunc(t + h) @ (y + h * k3))
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


def rk4_steps(duration: float, max_rate: float, step_factor: float = DEFAULT_STEP_FACTOR) -> int:
    """Number of steps so that h * max_rate <= step_factor."""
    if duration <= 0:
        return 0
    return max(1, math.ceil(duration * max_rate / step_factor))


# -- schedule propagation -----------------------------------------------------

@dataclass
class Snapshot:
    segment_index: int
    gate_index: int | None
    time: float
    state: StateVector


def diagonal_of(seg: Rabi, p: SystemParams) -> int:
    """Fock diagonal addressed by a Rabi segment (nearest integer multiple of delta_omega)."""
    dw, _ = delta_omega(p)
    return int(round((seg.omega_d - p.omega_q) / dw))


def segment_gate(seg, p: SystemParams) -> gates.GateDescriptor | None:
    """Idealized gate realized by one segment (None for shifts)."""
    if isinstance(seg, ResonantA):
        return gates.A(p.g_a * seg.duration)
    if isinstance(seg, ResonantB):
        return gates.B(p.g_b * seg.duration)
    if isinstance(seg, Rabi):
        return gates.R(diagonal_of(seg, p), seg.amplitude * seg.duration, seg.phase)
    return None


class _FullState:
    """Integrator state for full-mode propagation (bare interaction frame)."""

    def __init__(self, p: SystemParams, psi: StateVector, compensate: bool, step_factor: float):
        self.p = p
        self.space = p.space
        self.terms = _Terms.get(self.space)
        self.psi = psi.amplitudes.copy()
        self.t = 0.0
        self.theta_q = 0.0  # integral of omega_q dt
        self.omega_q = p.omega_q
        self.compensate = compensate
        self.step_factor = step_factor

    def frame_offset(self, omega_f: float) -> np.ndarray:
        """D(t) = Theta(t) - omega_f N t, diagonal."""
        tr = self.terms
        return ((self.theta_q - omega_f * self.t) * tr.n_q
                + (self.p.omega_a - omega_f) * self.t * tr.n_a
                + (self.p.omega_b - omega_f) * self.t * tr.n_b)

    def constant(self, omega_q: float, tau: float, drive: Drive | None = None):
        omega_f = drive.omega_d if drive is not None else omega_q
        if drive is not None:
            # drive phase referenced to the qubit's bare frame at segment start
            phys = drive.phase + omega_f * self.t - self.theta_q
            drive = Drive(drive.omega_d, phys, drive.amplitude)
        h = build_hamiltonian(self.p, omega_q, drive, frame="drive", frame_frequency=omega_f).matrix
        psi_f = np.exp(-1j * self.frame_offset(omega_f)) * self.psi
        psi_f = unitary_constant(h, tau) @ psi_f
        self.t += tau
        self.theta_q += omega_q * tau
        self.omega_q = omega_q
        self.psi = np.exp(1j * self.frame_offset(omega_f)) * psi_f

    def ramp(self, target: float, tau: float):
        if tau <= 0:
            self.omega_q = target
            return
        p, tr = self.p, self.terms
        w0 = self.omega_q
        omega_f = 0.5 * (p.omega_a + p.omega_b)
        static = np.diag((p.omega_a - omega_f) * tr.n_a + (p.omega_b - omega_f) * tr.n_b).astype(complex)
        static += p.g_a * tr.x_a + p.g_b * tr.x_b
        nq = np.diag(tr.n_q).astype(complex)
        t0 = self.t

        def hfunc(t):
            wq = w0 + (target - w0) * (t - t0) / tau
            return static + (wq - omega_f) * nq

        max_rate = max(np.max(np.abs(np.linalg.eigvalsh(hfunc(t0)))),
                       np.max(np.abs(np.linalg.eigvalsh(hfunc(t0 + tau)))))
        n = rk4_steps(tau, max_rate, self.step_factor)
        psi_f = np.exp(-1j * self.frame_offset(omega_f)) * self.psi
        psi_f = rk4_propagate(hfunc, psi_f, t0, t0 + tau, n)
        self.t += tau
        self.theta_q += 0.5 * (w0 + target) * tau
        self.omega_q = target
        self.psi = np.exp(1j * self.frame_offset(omega_f)) * psi_f

    def swap_phase(self, omega_res: float) -> float:
        """Phase of the qubit-resonator coupling in the bare frame (zero for the ideal swap)."""
        return float(np.mod(self.theta_q - omega_res * self.t, 2 * np.pi))

    def qubit_phase(self, alpha: float):
        """Multiply excited amplitudes by e^{i alpha} (software phase correction)."""
        if self.compensate and alpha:
            self.psi = np.exp(1j * alpha * self.terms.n_q) * self.psi

    def dispersive_correction(self, shifts: np.ndarray, tau: float):
        if self.compensate:
            self.psi = np.exp(1j * shifts * tau) * self.psi


def _spectator_shifts(space: HilbertSpace, coupling: float, detuning: float, axis: str) -> np.ndarray:
    """Second-order shifts from the off-resonant resonator while the qubit sits on the other one.

    ``detuning`` is omega_q - omega_spectator.
    """
    q, n_a, n_b = space.quantum_numbers
    n = n_a if axis == "a" else n_b
    chi = coupling**2 / detuning
    return np.where(q == 0, -chi * n, chi * (n + 1))


def propagate_schedule(sched: PulseSchedule, psi0: StateVector, mode: str = "ideal",
                       compensate_dispersive: bool = True,
                       step_factor: float = DEFAULT_STEP_FACTOR):
    """Propagate ``psi0`` through every segment; return (final state, snapshots).

    One snapshot is recorded after each segment.  In full mode with
    ``compensate_dispersive`` the analytically known second-order Stark phases
    accumulated during Rabi and resonant segments are removed in software.
    """
    p = sched.params
    if psi0.space != p.space:
        raise SpaceMismatchError("initial state does not match the schedule's cutoffs")
    sched.validate()
    if mode not in ("ideal", "full"):
        raise ValueError(f"unknown mode {mode!r}")

    trajectory = []
    if mode == "ideal":
        state = psi0.copy()
        t = 0.0
        for i, seg in enumerate(sched.segments):
            if isinstance(seg, VirtualPhase):
                state = StateVector(state.space, state.amplitudes * np.exp(1j * seg.as_array(state.space)))
            else:
                g = segment_gate(seg, p)
                if g is not None:
                    state = gates.apply_gate(g, state)
            t += seg.duration
            trajectory.append(Snapshot(i, seg.gate_index, t, state.copy()))
        return state, trajectory

    fs = _FullState(p, psi0, compensate_dispersive, step_factor)
    disp = dressed_shifts(p) if compensate_dispersive else np.zeros(p.space.dim)
    spect_a = _spectator_shifts(p.space, p.g_b, p.omega_a - p.omega_b, "b")
    spect_b = _spectator_shifts(p.space, p.g_a, p.omega_b - p.omega_a, "a")
    for i, seg in enumerate(sched.segments):
        norm_before = np.linalg.norm(fs.psi)
        if isinstance(seg, Shift):
            fs.ramp(seg.target, seg.ramp)
            if seg.hold > 0:
                fs.constant(seg.target, seg.hold)
        elif isinstance(seg, (ResonantA, ResonantB)):
            w_res = p.omega_a if isinstance(seg, ResonantA) else p.omega_b
            alpha = fs.swap_phase(w_res)
            fs.qubit_phase(alpha)
            fs.constant(w_res, seg.duration)
            fs.qubit_phase(-alpha)
            fs.dispersive_correction(spect_a if isinstance(seg, ResonantA) else spect_b, seg.duration)
        elif isinstance(seg, Rabi):
            fs.constant(p.omega_q, seg.duration, Drive(seg.omega_d, seg.phase, seg.amplitude))
            fs.dispersive_correction(disp, seg.duration)
        elif isinstance(seg, VirtualPhase):
            fs.psi = fs.psi * np.exp(1j * seg.as_array(p.space))
        else:
            raise TypeError(f"segment {i}: unknown segment type {type(seg).__name__}")
        drift = abs(np.linalg.norm(fs.psi) - norm_before)
        if drift > NORM_DRIFT_LIMIT:
            raise NumericalError(f"norm drift {drift:.3g} in segment {i}", segment_index=i)
        trajectory.append(Snapshot(i, seg.gate_index, fs.t, StateVector(p.space, fs.psi.copy())))
    return StateVector(p.space, fs.psi.copy()), trajectory
