"""Number-dependent Stark shift arithmetic for the resonator-qubit-resonator system.

All frequencies here are angular (rad/s).  The qubit is parked between the
two resonators, omega_a < omega_q < omega_b, so that the A-side dispersive
shift is positive and the B-side shift negative.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import PreconditionError, SingularityError
from .fock import HilbertSpace
from .units import ghz, mhz

DISPERSIVE_RATIO_LIMIT = 0.3
MATCHING_RTOL = 1e-3


@dataclass(frozen=True)
class SystemParams:
    omega_a: float
    omega_b: float
    omega_q: float
    g_a: float
    g_b: float
    Omega: float
    na_max: int = 5
    nb_max: int = 5

    def __post_init__(self):
        if not self.omega_a < self.omega_q < self.omega_b:
            warnings.warn("parked qubit frequency is not between the resonators "
                          "(need omega_a < omega_q < omega_b)", stacklevel=3)
        if self.g_a < 0 or self.g_b < 0:
            raise ValueError("couplings must be non-negative")
        if self.Omega < 0:
            raise ValueError("Rabi amplitude must be non-negative")
        if not self.dispersive_valid:
            warnings.warn("coupling/detuning ratio above %.1f: dispersive formulas are "
                          "unreliable" % DISPERSIVE_RATIO_LIMIT, stacklevel=3)

    @classmethod
    def from_cyclic(cls, omega_a_GHz, omega_b_GHz, omega_q_GHz, g_a_MHz, g_b_MHz,
                    Omega_MHz, na_max=5, nb_max=5) -> SystemParams:
        return cls(ghz(omega_a_GHz), ghz(omega_b_GHz), ghz(omega_q_GHz),
                   mhz(g_a_MHz), mhz(g_b_MHz), mhz(Omega_MHz), na_max, nb_max)

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace(self.na_max, self.nb_max)

    @property
    def dispersive_valid(self) -> bool:
        da = self.omega_q - self.omega_a
        db = self.omega_b - self.omega_q
        if da <= 0 or db <= 0:
            return False
        return self.g_a / da < DISPERSIVE_RATIO_LIMIT and self.g_b / db < DISPERSIVE_RATIO_LIMIT

    @property
    def chi_a(self) -> float:
        """Per-photon dispersive shift g_a^2 / (omega_q - omega_a)."""
        return _ratio(self.g_a**2, self.omega_q - self.omega_a, "omega_q == omega_a")

    @property
    def chi_b(self) -> float:
        """Per-photon dispersive shift g_b^2 / (omega_q - omega_b); negative when parked below B."""
        return _ratio(self.g_b**2, self.omega_q - self.omega_b, "omega_q == omega_b")

    def with_cutoffs(self, na_max: int, nb_max: int) -> SystemParams:
        return replace(self, na_max=na_max, nb_max=nb_max)


def scan_params(na_max: int = 5, nb_max: int = 5) -> SystemParams:
    """Parameters of the Stark-shifted Rabi scan (6.3 / 7.7 / 7 GHz, 70 MHz, 7 MHz)."""
    return SystemParams.from_cyclic(6.3, 7.7, 7.0, 70.0, 70.0, 7.0, na_max, nb_max)


def estimate_params(na_max: int = 10, nb_max: int = 10) -> SystemParams:
    """Parameters used for the NOON timing estimate (6 / 7 / 6.5 GHz, 150 MHz, 22 MHz)."""
    return SystemParams.from_cyclic(6.0, 7.0, 6.5, 150.0, 150.0, 22.0, na_max, nb_max)


def _ratio(num, den, what):
    if den == 0:
        raise SingularityError(f"degenerate detuning: {what}")
    return num / den


def delta_omega(p: SystemParams) -> tuple[float, float]:
    """Return (delta_omega, mismatch).

    delta_omega = 2 g_a^2 / (omega_q - omega_a) and the mismatch is its absolute
    difference from -2 g_b^2 / (omega_q - omega_b).
    """
    dw_a = 2.0 * p.chi_a
    dw_b = -2.0 * p.chi_b
    return dw_a, abs(dw_a - dw_b)


def matched_qubit_frequency(omega_a: float, omega_b: float, g_a: float, g_b: float) -> float:
    """Qubit frequency in (omega_a, omega_b) at which both diagonal shifts agree."""
    if not omega_a < omega_b:
        raise PreconditionError("need omega_a < omega_b")
    if g_a == 0 and g_b == 0:
        raise SingularityError("both couplings vanish; matching is undefined")
    return (g_a**2 * omega_b + g_b**2 * omega_a) / (g_a**2 + g_b**2)


def drive_frequency(p: SystemParams, n_a: int, n_b: int) -> float:
    """Stark-shifted |0,n_a,n_b> -> |1,n_a,n_b> transition frequency (second order)."""
    shift_a = 0.0 if p.g_a == 0 else p.chi_a * (2 * n_a + 1)
    shift_b = 0.0 if p.g_b == 0 else p.chi_b * (2 * n_b + 1)
    return p.omega_q + shift_a + shift_b


def diagonal_frequency(p: SystemParams, n: int, rtol: float = MATCHING_RTOL) -> float:
    """Drive frequency addressing every Fock node with n_a - n_b = n."""
    dw, mismatch = delta_omega(p)
    if mismatch > rtol * abs(dw):
        raise PreconditionError(
            f"matching condition violated: mismatch {mismatch:.4g} rad/s exceeds "
            f"{rtol:g} x delta_omega ({dw:.4g} rad/s)"
        )
    return p.omega_q + n * dw


@dataclass(frozen=True)
class AmplitudeBound:
    recommended: float
    hard_bound: float

    def exceeded_by(self, Omega: float) -> bool:
        return abs(Omega) > self.hard_bound * (1 + 1e-12)


def max_selective_amplitude(p: SystemParams) -> AmplitudeBound:
    """Recommended Rabi amplitude (delta_omega / 4) and the hard bound (delta_omega / 2)."""
    if p.g_a == 0:
        return AmplitudeBound(0.0, 0.0)
    dw, _ = delta_omega(p)
    return AmplitudeBound(recommended=abs(dw) / 4.0, hard_bound=abs(dw) / 2.0)


def bare_dispersive_shifts(p: SystemParams, space: HilbertSpace | None = None) -> np.ndarray:
    """Second-order energy shift of every bare basis state with the qubit parked at omega_q.

    |0,n_a,n_b> shifts by -chi_a n_a - chi_b n_b, |1,n_a,n_b> by
    chi_a (n_a+1) + chi_b (n_b+1).
    """
    space = space or p.space
    q, n_a, n_b = space.quantum_numbers
    return np.where(
        q == 0,
        -p.chi_a * n_a - p.chi_b * n_b,
        p.chi_a * (n_a + 1) + p.chi_b * (n_b + 1),
    )
