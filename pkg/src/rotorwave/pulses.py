"""Resonant pulse-sequence design for rotational ladder climbing.

A target superposition c_0..c_N is converted into N Gaussian subpulses, one
per adjacent transition, through the area recursion
theta_1 = arccos(c_0), theta_n = arccos(c_{n-1} / prod_{k<n} sin(theta_k)),
with carrier frequencies on resonance and phases arranged so the excited
state phases form the ladder of the target.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .model import Molecule, transition_dipole, transition_frequency
from .optimizer import OrientationTarget
from .units import UNITS

__all__ = [
    "InfeasibleTargetError",
    "Subpulse",
    "PulseSequence",
    "CrossTalkReport",
    "pulse_areas_from_amplitudes",
    "subpulse_phases",
    "design_sequence",
    "field_amplitude",
    "fourier_area",
    "cross_talk_report",
    "sample_field",
    "write_field_csv",
]

# slack before an arccos argument marginally above 1 is treated as infeasible
_FEASIBILITY_SLACK = 1e-12

# envelope support used for quadrature windows, in units of the duration
_WINDOW_SIGMAS = 8.0


class InfeasibleTargetError(ValueError):
    """Raised when amplitudes cannot be reached by a single ladder pass."""


@dataclass(frozen=True)
class Subpulse:
    """One Gaussian subpulse of the sequence (all quantities atomic units).

    index is 1-based: subpulse n drives the |n-1> -> |n> transition.
    field_amplitude = sqrt(2/pi) * area / (duration * transition dipole).
    """

    index: int
    area: float
    field_amplitude: float
    carrier: float
    center_time: float
    duration: float
    phase: float

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("subpulse duration must be positive")
        if not (0.0 <= self.area <= math.pi / 2 + 1e-12):
            raise ValueError(f"ladder-climbing areas lie in [0, pi/2], got {self.area}")

    @property
    def window(self):
        """(t_lo, t_hi) outside which the envelope is negligible."""
        half = _WINDOW_SIGMAS * self.duration
        return (self.center_time - half, self.center_time + half)

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        u = (t - self.center_time) / self.duration
        return self.field_amplitude * np.exp(-0.5 * u * u)

    def field(self, t):
        t = np.asarray(t, dtype=float)
        return self.envelope(t) * np.cos(self.carrier * (t - self.center_time) + self.phase)

    def to_dict(self) -> dict:
        return {
            "n": self.index,
            "theta_rad": self.area,
            "E_au": self.field_amplitude,
            "omega_au": self.carrier,
            "tau_au": self.center_time,
            "T_au": self.duration,
            "phi_rad": self.phase,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Subpulse":
        return cls(
            index=int(data["n"]),
            area=float(data["theta_rad"]),
            field_amplitude=float(data["E_au"]),
            carrier=float(data["omega_au"]),
            center_time=float(data["tau_au"]),
            duration=float(data["T_au"]),
            phase=float(data["phi_rad"]),
        )


@dataclass(frozen=True)
class PulseSequence:
    """Time-ordered subpulses plus the active window [t_on, t_off]."""

    molecule: Molecule
    subpulses: tuple
    t_on: float
    t_off: float

    def __post_init__(self):
        taus = [p.center_time for p in self.subpulses]
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValueError("subpulses must be strictly time-ordered")
        carriers = [p.carrier for p in self.subpulses]
        if any(b <= a for a, b in zip(carriers, carriers[1:])):
            raise ValueError("carriers must be strictly increasing")

    def __len__(self):
        return len(self.subpulses)

    def field(self, t):
        return field_amplitude(self, t)

    @property
    def peak_field(self) -> float:
        return max(p.field_amplitude for p in self.subpulses)

    @property
    def peak_intensity_w_cm2(self) -> float:
        return UNITS.field_to_intensity(self.peak_field)

    def to_dict(self) -> dict:
        return {
            "molecule": self.molecule.to_dict(),
            "subpulses": [p.to_dict() for p in self.subpulses],
            "t_on_au": self.t_on,
            "t_off_au": self.t_off,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PulseSequence":
        return cls(
            molecule=Molecule.from_dict(data["molecule"]),
            subpulses=tuple(Subpulse.from_dict(p) for p in data["subpulses"]),
            t_on=float(data["t_on_au"]),
            t_off=float(data["t_off_au"]),
        )

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "PulseSequence":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def pulse_areas_from_amplitudes(amplitudes) -> np.ndarray:
    """Subpulse areas theta_1..theta_N reproducing the given amplitudes.

    The recursion divides each amplitude by the running product of sines;
    arguments in (1, 1 + 1e-12] are clamped to 1, anything larger means the
    target cannot be reached by one ladder pass.
    """
    c = np.asarray(amplitudes, dtype=float)
    if np.any(c < 0):
        raise ValueError("amplitudes must be non-negative")
    norm = float(np.sum(c * c))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"amplitudes must be normalized, sum c^2 = {norm}")
    n_pulses = len(c) - 1
    thetas = np.empty(n_pulses)
    sin_prod = 1.0
    for n in range(1, n_pulses + 1):
        arg = c[n - 1] / sin_prod if sin_prod > 0 else math.inf
        if arg > 1.0 + _FEASIBILITY_SLACK:
            raise InfeasibleTargetError(
                f"subpulse {n}: arccos argument {arg} exceeds 1; "
                "amplitudes are not reachable by one ladder pass"
            )
        theta = math.acos(min(arg, 1.0))
        thetas[n - 1] = theta
        sin_prod *= math.sin(theta)
    return thetas


def subpulse_phases(molecule: Molecule, taus, phi_1: float) -> np.ndarray:
    """Carrier phases phi_1..phi_N locking the state phases to a ladder.

    phi_n = omega_{n,n-1} tau_n - n*(-phi_1 + omega_{1,0} tau_1) - (n-1)*pi/2,
    valid for any choice of the first phase.
    """
    taus = np.asarray(taus, dtype=float)
    if np.any(np.diff(taus) <= 0):
        raise ValueError("center times must be strictly increasing")
    n = np.arange(1, len(taus) + 1)
    omegas = 2.0 * molecule.b_au * n
    xi = -phi_1 + transition_frequency(molecule, 0) * taus[0]
    return omegas * taus - n * xi - (n - 1) * math.pi / 2


def phase_for_target_ladder(molecule: Molecule, tau_1: float, delta_phi: float = 0.0) -> float:
    """First-pulse phase that realizes a state ladder with the given delta_phi.

    Each ladder step through a subpulse adds pi/2 - phi_n + omega_{n,n-1} tau_n
    to the state phase, so the realized delta_phi equals
    pi/2 - phi_1 + omega_{1,0} tau_1; solve that for phi_1.
    """
    return math.pi / 2 + transition_frequency(molecule, 0) * tau_1 - delta_phi


def design_sequence(
    target: OrientationTarget,
    molecule: Molecule,
    t_sub: float | None = None,
    spacing_factor: float = 5.0,
    phi_1: float | None = None,
) -> PulseSequence:
    """Design the resonant subpulse train that prepares the target.

    Parameters
    ----------
    t_sub : subpulse duration in atomic time; default 3 revival periods
    spacing_factor : center-time spacing in units of t_sub (>= 4 keeps the
        subpulses effectively non-overlapping)
    phi_1 : first carrier phase; None picks the phase that realizes the
        target's own phase ladder (delta_phi) exactly
    """
    if t_sub is None:
        t_sub = 3.0 * molecule.t_rot_au
    if t_sub <= 0:
        raise ValueError("t_sub must be positive")
    if spacing_factor < 4.0:
        raise ValueError("spacing_factor must be >= 4 for non-overlapping subpulses")
    thetas = pulse_areas_from_amplitudes(target.amplitudes)
    n_pulses = target.j_max
    taus = spacing_factor * t_sub * np.arange(n_pulses)
    if phi_1 is None:
        phi_1 = phase_for_target_ladder(molecule, taus[0], target.delta_phi)
    phases = subpulse_phases(molecule, taus, phi_1)
    pulses = []
    for n in range(1, n_pulses + 1):
        mu = transition_dipole(molecule, n - 1)
        amp = math.sqrt(2.0 / math.pi) * thetas[n - 1] / (t_sub * mu)
        pulses.append(
            Subpulse(
                index=n,
                area=float(thetas[n - 1]),
                field_amplitude=amp,
                carrier=transition_frequency(molecule, n - 1),
                center_time=float(taus[n - 1]),
                duration=t_sub,
                phase=float(phases[n - 1]),
            )
        )
    return PulseSequence(
        molecule=molecule,
        subpulses=tuple(pulses),
        t_on=float(taus[0] - 5.0 * t_sub),
        t_off=float(taus[-1] + 5.0 * t_sub),
    )


def field_amplitude(sequence: PulseSequence, t):
    """Total electric field E(t) of the sequence, atomic units."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for p in sequence.subpulses:
        out += p.field(t)
    return out if out.ndim else float(out)


def fourier_area(pulse: Subpulse, omega: float, t_lo: float, t_hi: float) -> complex:
    """Adaptive quadrature of int E_n(t) exp(-i omega t) dt over [t_lo, t_hi]."""
    if t_hi <= t_lo:
        return 0.0 + 0.0j

    def re_part(t):
        return pulse.field(t) * math.cos(omega * t)

    def im_part(t):
        return -pulse.field(t) * math.sin(omega * t)

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            re, re_err = quad(re_part, t_lo, t_hi, epsabs=1e-11, epsrel=1e-11, limit=6000)
            im, im_err = quad(im_part, t_lo, t_hi, epsabs=1e-11, epsrel=1e-11, limit=6000)
        except IntegrationWarning as exc:
            raise ArithmeticError(f"pulse-area quadrature did not converge: {exc}") from exc
    if max(re_err, im_err) > 1e-7:
        raise ArithmeticError(
            f"pulse-area quadrature error estimate {max(re_err, im_err):.2e} too large"
        )
    return complex(re, im)


@dataclass
class CrossTalkReport:
    """Off-resonant areas picked up by each transition from each subpulse.

    areas[n, m] is the area subpulse n+1 deposits on the |m> -> |m+1|
    transition; the diagonal reproduces the designed areas.
    """

    areas: np.ndarray
    threshold: float
    flagged: tuple

    @property
    def ok(self) -> bool:
        return not self.flagged

    @property
    def max_off_diagonal(self) -> float:
        if self.areas.shape[0] < 2:
            return 0.0
        off = self.areas.copy()
        np.fill_diagonal(off, 0.0)
        return float(off.max())


def cross_talk_report(sequence: PulseSequence, threshold: float = 1e-3) -> CrossTalkReport:
    """Quantify how independently each subpulse addresses its own transition."""
    n = len(sequence.subpulses)
    mol = sequence.molecule
    areas = np.zeros((n, n))
    flagged = []
    for i, pulse in enumerate(sequence.subpulses):
        lo, hi = pulse.window
        for m in range(n):
            omega = transition_frequency(mol, m)
            mu = transition_dipole(mol, m)
            areas[i, m] = mu * abs(fourier_area(pulse, omega, lo, hi))
            if m != i and areas[i, m] > threshold:
                flagged.append((i + 1, m + 1))
    return CrossTalkReport(areas=areas, threshold=threshold, flagged=tuple(flagged))


def sample_field(sequence: PulseSequence, points_per_cycle: int = 16):
    """Uniform sampling of E(t) over [t_on, t_off], resolving the fastest carrier."""
    fastest = max(p.carrier for p in sequence.subpulses)
    dt = 2.0 * math.pi / fastest / points_per_cycle
    n = int(math.ceil((sequence.t_off - sequence.t_on) / dt)) + 1
    t = np.linspace(sequence.t_on, sequence.t_off, n)
    return t, field_amplitude(sequence, t)


def write_field_csv(sequence: PulseSequence, path, points_per_cycle: int = 16):
    """Sampled field CSV with columns t_ps, E_au, E_kV_per_cm."""
    t, e = sample_field(sequence, points_per_cycle)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t_ps,E_au,E_kV_per_cm\n")
        for ti, ei in zip(t, e):
            fh.write(
                "%.12g,%.12g,%.12g\n" % (UNITS.au_to_ps(ti), ei, UNITS.field_au_to_kv_cm(ei))
            )
