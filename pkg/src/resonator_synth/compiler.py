"""State-synthesis compiler for two resonators sharing one tunable qubit.

The general path works backwards from the target: photons are removed row by
row (top row first, right to left inside a row) with B-swaps, then the
remaining bottom row is emptied with A-swaps.  Every removal is a pair

    B-dagger (or A-dagger) that zeroes |0,k,j>  (moving it to |1,k,j-1>)
    R-dagger on diagonal k-j+1 that zeroes |1,k,j-1>  (moving it to |0,k,j-1>)

solved against the live tracked state.  Because the swap only mixes two
amplitudes with a relative factor of -i, the pair's relative phase is
first aligned with a virtual qubit phase Z; Z gates have zero duration and
are not counted among the A/B/R pulses.

Support invariant before node (k, j) of the B stage:

* qubit-ground amplitudes live in rows < j and in row j at columns <= k;
* qubit-excited amplitudes live in rows <= j-2 and in row j-1 at columns <= k.

The rotation on diagonal k-j+1 only touches nodes above row j-1 that are
already empty, and below it only nodes that are still allowed to be occupied,
so each pair shrinks the support by exactly one node.

Product-order convention: gates are listed in the order they act, i.e. the
forward sequence [g0, g1, ...] realizes U = ... g1 g0.
"""
from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import gates
from .dispersive import SystemParams, diagonal_frequency, max_selective_amplitude
from .errors import CompilationError, PreconditionError, SingularityError
from .fock import HilbertSpace, StateVector
from .gates import GateDescriptor, apply_gate
from .hamiltonian import (DEFAULT_RAMP, PulseSchedule, Rabi, ResonantA, ResonantB, Shift,
                          VirtualPhase, dressed_energies)

RESIDUAL_EPS = 1e-9
MAX_CORRECTIONS = 3
GUARD_LEVELS = 2


# -- targets ------------------------------------------------------------------

@dataclass
class TargetSpec:
    """Coefficient table c[n_a, n_b] of a two-resonator pure state."""
    coefficients: np.ndarray
    label: str = "general"

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coefficients, dtype=complex))
        norm = np.linalg.norm(c)
        if norm == 0:
            raise ValueError("target coefficients are all zero")
        if abs(norm**2 - 1.0) > 1e-9:
            warnings.warn(f"target norm^2 = {norm**2:.6g}; normalizing", stacklevel=2)
            c = c / norm
        self.coefficients = _trim(c)

    @property
    def N_a(self) -> int:
        return self.coefficients.shape[0] - 1

    @property
    def N_b(self) -> int:
        return self.coefficients.shape[1] - 1

    def state(self, space: HilbertSpace) -> StateVector:
        """|0> (x) |Psi> embedded in ``space``."""
        if self.N_a > space.na_max or self.N_b > space.nb_max:
            raise PreconditionError(
                f"target (N_a={self.N_a}, N_b={self.N_b}) exceeds cutoffs "
                f"({space.na_max}, {space.nb_max})")
        amps = np.zeros(space.shape, dtype=complex)
        amps[0, :self.N_a + 1, :self.N_b + 1] = self.coefficients
        return StateVector(space, amps.ravel())

    def default_cutoffs(self, guard: int = GUARD_LEVELS) -> tuple[int, int]:
        return self.N_a + guard, self.N_b + guard

    def is_dense(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.coefficients) > tol))

    def noon_form(self, tol: float = 1e-12):
        """(N_a, N_b, relative phase) if this is an equal-weight two-branch NOON state, else None."""
        c = self.coefficients
        na, nb = self.N_a, self.N_b
        if na < 1 or nb < 1:
            return None
        support = np.argwhere(np.abs(c) > tol)
        if {tuple(x) for x in support} != {(na, 0), (0, nb)}:
            return None
        if abs(abs(c[na, 0]) - abs(c[0, nb])) > 1e-9:
            return None
        return na, nb, float(np.angle(c[0, nb] / c[na, 0]))


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.argwhere(np.abs(c) > 0)
    na = int(nz[:, 0].max())
    nb = int(nz[:, 1].max())
    return c[:na + 1, :nb + 1].copy()


def make_target(kind: str, *args, coefficients=None) -> TargetSpec:
    """Build a target state.

    ``make_target("general", coefficients=c)``, ``make_target("max-entangled", N)``
    or ``make_target("noon", N_a, N_b)``.
    """
    if kind == "general":
        if coefficients is None:
            raise ValueError("general target needs a coefficient table")
        c = np.atleast_2d(np.asarray(coefficients, dtype=complex))
        if np.linalg.norm(c) == 0:
            raise ValueError("target coefficients are all zero")
        return TargetSpec(c / np.linalg.norm(c), "general")
    if kind in ("max-entangled", "max_entangled"):
        (N,) = args
        c = np.zeros((N + 1, N + 1), dtype=complex)
        for k in range(N + 1):
            c[k, N - k] = 1.0 / math.sqrt(N + 1)
        return TargetSpec(c, f"max-entangled({N})")
    if kind == "noon":
        na, nb = args
        if na < 1 or nb < 1:
            raise ValueError("NOON target needs N_a, N_b >= 1")
        c = np.zeros((na + 1, nb + 1), dtype=complex)
        c[na, 0] = c[0, nb] = 1.0 / math.sqrt(2.0)
        return TargetSpec(c, f"noon({na},{nb})")
    raise ValueError(f"unknown target kind {kind!r}")


def random_target(N_a: int, N_b: int, rng: np.random.Generator) -> TargetSpec:
    """Dense Haar-like random target with every coefficient nonzero."""
    c = rng.normal(size=(N_a + 1, N_b + 1)) + 1j * rng.normal(size=(N_a + 1, N_b + 1))
    return TargetSpec(c / np.linalg.norm(c), f"random({N_a},{N_b})")


# -- gate sequences -------------------------------------------------------------

@dataclass
class GateSequence:
    gates: list
    space: HilbertSpace
    snapshots: list = field(default_factory=list)
    corrections: int = 0
    final_phase: complex = 1.0
    label: str = ""

    def __len__(self):
        return len(self.gates)

    def counts(self) -> dict:
        out = {"A": 0, "B": 0, "R": 0, "Z": 0}
        for g in self.gates:
            out[g.kind] += 1
        return out

    @property
    def pulses(self) -> list:
        """Gates with nonzero duration (A, B, R)."""
        return [g for g in self.gates if not g.is_virtual]

    def apply(self, state: StateVector) -> StateVector:
        return gates.apply_sequence(self.gates, state)

    def record_snapshots(self):
        state = StateVector.vacuum(self.space)
        self.snapshots = []
        for g in self.gates:
            state = apply_gate(g, state)
            self.snapshots.append(state)

    def records(self) -> list:
        """Export records (kind, theta, phi, n, snapshot hash)."""
        if len(self.snapshots) != len(self.gates):
            self.record_snapshots()
        return [
            {"kind": g.kind, "theta_rad": g.theta, "phi_rad": g.phi, "n": g.n,
             "snapshot_sha256": snapshot_hash(s)}
            for g, s in zip(self.gates, self.snapshots)
        ]


def snapshot_hash(state: StateVector, decimals: int = 9) -> str:
    rounded = np.round(state.amplitudes, decimals) + (0.0 + 0.0j)
    return hashlib.sha256(rounded.astype(np.complex128).tobytes()).hexdigest()[:16]


# -- pair solvers ---------------------------------------------------------------

def _solve_swap(x: complex, y: complex, rate: float):
    """Z then swap-dagger zeroing ``x`` (ground, upper node) against ``y`` (excited partner).

    Returns (chi, theta) for the forward gates Z(chi) and swap(theta).
    Applying Z(chi)-dagger multiplies y by e^{i chi}; the swap-dagger then maps
    x -> cos(a) x + i sin(a) y' with a = theta * rate.
    """
    ax, ay = abs(x), abs(y)
    if ax == 0.0:
        return 0.0, 0.0
    if ay == 0.0:
        return 0.0, (math.pi / 2) / rate
    # need e^{i chi} y / x = i |y| / |x|  so that cos(a) x + i sin(a) e^{i chi} y = 0
    chi = math.pi / 2 + np.angle(x) - np.angle(y)
    return float(np.mod(chi, 2 * math.pi)), math.atan2(ax, ay) / rate


def _solve_rotation(u: complex, v: complex):
    """Forward R parameters (theta, phi) whose adjoint zeroes the excited amplitude ``v``."""
    au, av = abs(u), abs(v)
    if av == 0.0:
        return 0.0, 0.0
    theta = 2.0 * math.atan2(av, au)
    phi = np.angle(v) - (np.angle(u) if au > 0 else 0.0) + math.pi / 2
    return theta, float(np.mod(phi, 2 * math.pi))


# -- general compiler ---------------------------------------------------------------

class _Tracker:
    """Live state for the inverse construction; records forward gates in reverse."""

    def __init__(self, state: StateVector):
        self.state = state
        self.inverse_steps = []  # forward gates in the order they were undone

    @property
    def grid(self):
        return self.state.as_grid()

    def undo(self, gate: GateDescriptor):
        self.state = apply_gate(gate, self.state, inverse=True)
        self.inverse_steps.append(gate)

    def forward_gates(self) -> list:
        return list(reversed(self.inverse_steps))


def _remove_node(tr: _Tracker, axis: str, k: int, j: int):
    """Empty |0,k,j> into |0,k,j-1> (axis 'b') or |0,k,0> into |0,k-1,0> (axis 'a')."""
    if axis == "b":
        upper, partner, rate = (0, k, j), (1, k, j - 1), math.sqrt(j)
        diag = k - j + 1
    else:
        upper, partner, rate = (0, k, 0), (1, k - 1, 0), math.sqrt(k)
        diag = k - 1
    grid = tr.grid
    chi, theta = _solve_swap(grid[upper], grid[partner], rate)
    if chi != 0.0:
        tr.undo(gates.Z(chi))
    tr.undo(gates.B(theta) if axis == "b" else gates.A(theta))
    grid = tr.grid
    ground = (0,) + partner[1:]
    theta_r, phi_r = _solve_rotation(grid[ground], grid[partner])
    tr.undo(gates.R(diag, theta_r, phi_r, node=ground[1:]))


def _node_residual(tr: _Tracker, axis: str, k: int, j: int) -> float:
    grid = tr.grid
    if axis == "b":
        return max(abs(grid[0, k, j]), abs(grid[1, k, j - 1]))
    return max(abs(grid[0, k, 0]), abs(grid[1, k - 1, 0]))


def _support_leak(tr: _Tracker, axis: str, k: int, j: int) -> float:
    """Largest amplitude outside the support allowed after finishing node (k, j)."""
    g = np.abs(tr.grid)
    mask = np.zeros(g.shape, dtype=bool)
    if axis == "b":
        mask[0, :, :j] = True
        mask[0, :k, j] = True
        mask[1, :, :max(j - 1, 0)] = True
        mask[1, :k, j - 1] = True
    else:
        mask[0, :k, 0] = True
        mask[1, :max(k - 1, 0), 0] = True
    return float(np.max(np.where(mask, 0.0, g)))


def _process(tr: _Tracker, axis: str, k: int, j: int, eps: float) -> int:
    _remove_node(tr, axis, k, j)
    extra = 0
    while _node_residual(tr, axis, k, j) > eps:
        if extra >= MAX_CORRECTIONS:
            raise CompilationError(
                f"node (n_a={k}, n_b={j}) residual {_node_residual(tr, axis, k, j):.3g} "
                f"after {MAX_CORRECTIONS} corrective pairs", node=(k, j),
                residual=_node_residual(tr, axis, k, j))
        _remove_node(tr, axis, k, j)
        extra += 1
    leak = _support_leak(tr, axis, k, j)
    if leak > eps:
        raise CompilationError(f"amplitude {leak:.3g} leaked outside the allowed support at "
                               f"node (n_a={k}, n_b={j})", node=(k, j), residual=leak)
    return extra


def compile_general(target: TargetSpec, p: SystemParams | None = None,
                    space: HilbertSpace | None = None, eps: float = RESIDUAL_EPS) -> GateSequence:
    """Compile ``target`` into A/B/R (+ virtual Z) gates acting on |0,0,0>.

    Gate budget without corrections: N_a A, (N_a+1) N_b B, N_a + (N_a+1) N_b R.
    """
    if space is None:
        space = p.space if p is not None else HilbertSpace(*target.default_cutoffs())
    tr = _Tracker(target.state(space))
    Na, Nb = target.N_a, target.N_b
    corrections = 0
    for j in range(Nb, 0, -1):
        for k in range(Na, -1, -1):
            corrections += _process(tr, "b", k, j, eps)
    for k in range(Na, 0, -1):
        corrections += _process(tr, "a", k, 0, eps)

    final = tr.state.amplitudes
    vac = final[0]
    rest = float(np.max(np.abs(final[1:]), initial=0.0))
    if abs(abs(vac) - 1.0) > eps or rest > eps:
        raise CompilationError(f"inverse evolution ended {rest:.3g} away from |0,0,0>",
                               node=(0, 0), residual=rest)
    seq = GateSequence(tr.forward_gates(), space, corrections=corrections,
                       final_phase=complex(np.conj(vac)), label=target.label)
    seq.record_snapshots()
    return seq


def inverse_residual(seq: GateSequence, target: TargetSpec) -> float:
    """Distance from |0,0,0> (up to global phase) after undoing ``seq`` on |0>|Psi>."""
    state = target.state(seq.space)
    for g in reversed(seq.gates):
        state = apply_gate(g, state, inverse=True)
    amps = state.amplitudes
    return float(max(abs(abs(amps[0]) - 1.0), np.max(np.abs(amps[1:]), initial=0.0)))


# -- NOON fast path ----------------------------------------------------------------

def _noon_gates(N_a: int, N_b: int, phi_b: float) -> list:
    seq = [gates.R(0, math.pi / 2, node=(0, 0)), gates.A(math.pi / 2)]
    for j in range(2, N_a + 1):
        seq += [gates.R(j - 1, math.pi, node=(j - 1, 0)), gates.A(math.pi / (2 * math.sqrt(j)))]
    seq += [gates.R(0, math.pi, phi_b, node=(0, 0)), gates.B(math.pi / 2)]
    for j in range(2, N_b + 1):
        seq += [gates.R(-(j - 1), math.pi, node=(0, j - 1)), gates.B(math.pi / (2 * math.sqrt(j)))]
    return seq


def compile_noon(N_a: int, N_b: int, p: SystemParams | None = None, relative_phase: float = 0.0,
                 space: HilbertSpace | None = None) -> GateSequence:
    """Linear-length sequence for (|N_a,0> + e^{i relative_phase} |0,N_b>)/sqrt(2).

    The phase of the first B-side rotation is solved by tracking the state so
    that the two branches end with the requested relative phase.  With zero
    relative phase and N_a = N_b = 3 every drive phase is zero.
    """
    if N_a < 1 or N_b < 1:
        raise ValueError("NOON synthesis needs N_a, N_b >= 1")
    if space is None:
        space = p.space if p is not None else HilbertSpace(N_a + GUARD_LEVELS, N_b + GUARD_LEVELS)
    if N_a > space.na_max or N_b > space.nb_max:
        raise PreconditionError(f"NOON({N_a},{N_b}) exceeds cutoffs ({space.na_max}, {space.nb_max})")

    vac = StateVector.vacuum(space)
    trial = gates.apply_sequence(_noon_gates(N_a, N_b, 0.0), vac)
    natural = np.angle(trial[(0, 0, N_b)] / trial[(0, N_a, 0)])
    phi_b = float(np.mod(relative_phase - natural, 2 * math.pi))
    if abs(phi_b - 2 * math.pi) < 1e-12:
        phi_b = 0.0
    seq = GateSequence(_noon_gates(N_a, N_b, phi_b), space, label=f"noon({N_a},{N_b})")
    seq.record_snapshots()
    final = seq.snapshots[-1]
    seq.final_phase = complex(final[(0, N_a, 0)] * math.sqrt(2))
    return seq


def noon_relative_phase(seq: GateSequence, N_a: int, N_b: int) -> float:
    """Relative phase alpha of the final state (|N_a,0> + e^{i alpha}|0,N_b>)/sqrt(2)."""
    final = seq.snapshots[-1] if seq.snapshots else seq.apply(StateVector.vacuum(seq.space))
    return float(np.angle(final[(0, 0, N_b)] / final[(0, N_a, 0)]))


def compile_target(target: TargetSpec, p: SystemParams | None = None,
                   space: HilbertSpace | None = None) -> GateSequence:
    """NOON fast path when the target has NOON form, general construction otherwise."""
    form = target.noon_form()
    if form is not None:
        na, nb, rel = form
        return compile_noon(na, nb, p, relative_phase=rel, space=space)
    return compile_general(target, p, space=space)


# -- duration estimates ------------------------------------------------------------------

def _check_rates(p: SystemParams):
    if p.Omega <= 0 or p.g_a <= 0 or p.g_b <= 0:
        raise SingularityError("duration estimate needs Omega, g_a, g_b > 0")


def _swap_time_sum(N: int, g: float) -> float:
    return sum(math.pi / (2 * g * math.sqrt(j)) for j in range(1, N + 1))


def estimate_duration_general(N_a: int, N_b: int, p: SystemParams) -> float:
    """Upper estimate of the general sequence time, every R taken as a pi pulse."""
    _check_rates(p)
    return ((N_a + 1) * (N_b + 1) * math.pi / p.Omega + _swap_time_sum(N_a, p.g_a)
            + (N_a + 1) * _swap_time_sum(N_b, p.g_b))


def estimate_duration_noon(N_a: int, N_b: int, p: SystemParams) -> float:
    """NOON sequence time: one pi/2 and N_a + N_b - 1 pi pulses plus the swaps."""
    _check_rates(p)
    return ((N_a + N_b - 0.5) * math.pi / p.Omega + _swap_time_sum(N_a, p.g_a)
            + _swap_time_sum(N_b, p.g_b))


# -- lowering to pulses --------------------------------------------------------------------

def gate_duration(g: GateDescriptor, p: SystemParams) -> float:
    if g.kind == "A":
        return g.theta / p.g_a
    if g.kind == "B":
        return g.theta / p.g_b
    if g.kind == "R":
        return g.theta / p.Omega
    return 0.0


def lower_schedule(seq: GateSequence, p: SystemParams, ramp: float = DEFAULT_RAMP,
                   drive: str = "literal") -> PulseSchedule:
    """Turn gates into pulse segments.

    A -> Shift(omega_a), ResonantA, Shift(back); B likewise; R -> Rabi at the
    diagonal's Stark-shifted frequency; Z -> VirtualPhase on every excited state.
    ``drive="literal"`` uses omega_q + n*delta_omega, ``drive="dressed"`` the exact
    dressed transition of the node each rotation is aimed at.
    """
    if seq.space != p.space:
        raise PreconditionError("gate sequence cutoffs differ from the system parameters")
    if drive not in ("literal", "dressed"):
        raise ValueError(f"unknown drive tuning {drive!r}")
    if drive == "dressed":
        energies = dressed_energies(p)
    segs = []
    gate_time = 0.0
    for i, g in enumerate(seq.gates):
        if g.kind in ("A", "B"):
            rate = p.g_a if g.kind == "A" else p.g_b
            if rate <= 0:
                raise SingularityError(f"gate {i}: zero coupling for {g.kind}")
            t = g.theta / rate
            target = p.omega_a if g.kind == "A" else p.omega_b
            resonant = ResonantA(t, i) if g.kind == "A" else ResonantB(t, i)
            segs += [Shift(target, ramp, 0.0, i), resonant, Shift(p.omega_q, ramp, 0.0, i)]
            gate_time += t
        elif g.kind == "R":
            if p.Omega <= 0:
                raise SingularityError(f"gate {i}: zero Rabi amplitude")
            t = g.theta / p.Omega
            if drive == "dressed" and g.node is not None:
                na, nb = g.node
                w_d = energies[p.space.index(1, na, nb)] - energies[p.space.index(0, na, nb)]
            else:
                w_d = diagonal_frequency(p, g.n)
            segs.append(Rabi(t, float(w_d), g.phi, p.Omega, i))
            gate_time += t
        else:
            phases = {lab: -g.theta for lab in p.space.labels() if lab[0] == 1}
            segs.append(VirtualPhase(phases, i))

    bound = max_selective_amplitude(p)
    over = bound.exceeded_by(p.Omega)
    if over:
        warnings.warn("Rabi amplitude exceeds the diagonal selectivity bound", stacklevel=2)
    meta = {
        "target": seq.label,
        "gate_time": gate_time,
        "shift_overhead": sum(s.duration for s in segs if isinstance(s, Shift)),
        "selectivity_warning": over,
        "gate_counts": seq.counts(),
    }
    return PulseSchedule(p, segs, meta)
