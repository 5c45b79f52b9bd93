"""Closed-form wave function for sequential resonant subpulses.

First-order Magnus treatment of each two-level block: after subpulse n the
population splits as cos/sin of the accumulated pulse area
theta_n(t) = mu_{n,n-1} |int_{t0}^{t} E_n(t') exp(-i omega_{n,n-1} t') dt'|,
and each excitation step multiplies the coefficient by
i sin(theta_n) exp(-i (phi_n - omega_{n,n-1} tau_n)).  No rotating wave
approximation is made: the defining integral is evaluated by adaptive
quadrature on the exact field, counter-rotating component included.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import Molecule, RotationalBasis, rotational_energies, transition_dipole
from .observables import Trajectory
from .pulses import PulseSequence, Subpulse, fourier_area

__all__ = [
    "AnalyticState",
    "partial_area",
    "magnus_state",
    "to_schrodinger_picture",
    "analytic_trajectory",
    "save_state",
    "load_state",
]


@dataclass(frozen=True)
class AnalyticState:
    """Interaction-picture coefficients over J = 0..N at one time instant."""

    coefficients: np.ndarray
    time: float

    def __post_init__(self):
        norm = float(np.sum(np.abs(self.coefficients) ** 2))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state norm {norm} deviates from 1")

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2


def _require_non_overlapping(sequence: PulseSequence):
    pulses = sequence.subpulses
    for a, b in zip(pulses, pulses[1:]):
        if b.center_time - a.center_time < 4.0 * max(a.duration, b.duration):
            raise ValueError(
                "subpulses overlap; the sequential-coupling solution does not apply"
            )


@lru_cache(maxsize=4096)
def _full_area(pulse: Subpulse, molecule: Molecule) -> float:
    lo, hi = pulse.window
    mu = transition_dipole(molecule, pulse.index - 1)
    return mu * abs(fourier_area(pulse, pulse.carrier, lo, hi))


def partial_area(pulse: Subpulse, molecule: Molecule, t: float, t0: float | None = None) -> float:
    """Accumulated pulse area theta_n(t) by quadrature of the defining integral.

    t0 defaults to the start of the pulse window (envelope below 1e-14 of
    peak); for t beyond the window the cached full area is returned.
    """
    lo, hi = pulse.window
    start = lo if t0 is None else max(t0, lo)
    if t <= start:
        return 0.0
    if t >= hi and t0 is None:
        return _full_area(pulse, molecule)
    mu = transition_dipole(molecule, pulse.index - 1)
    return mu * abs(fourier_area(pulse, pulse.carrier, start, min(t, hi)))


def _state_from_areas(sequence: PulseSequence, thetas: np.ndarray, t: float) -> AnalyticState:
    steps = 1j * np.sin(thetas) * np.exp(
        -1j * np.array([p.phase - p.carrier * p.center_time for p in sequence.subpulses])
    )
    ladder = np.concatenate(([1.0 + 0.0j], np.cumprod(steps)))
    n = len(sequence.subpulses)
    coeffs = np.empty(n + 1, dtype=complex)
    coeffs[:n] = np.cos(thetas) * ladder[:n]
    coeffs[n] = ladder[n]
    return AnalyticState(coefficients=coeffs, time=t)


def magnus_state(sequence: PulseSequence, t: float) -> AnalyticState:
    """Interaction-picture wave function of the driven ladder at time t.

    Coefficient of |0> is cos(theta_1(t)); of an intermediate |J> it is
    cos(theta_{J+1}(t)) times the product of the first J excitation steps;
    the top state carries the full product.  Norm is 1 by construction.
    """
    _require_non_overlapping(sequence)
    mol = sequence.molecule
    thetas = np.array([partial_area(p, mol, t) for p in sequence.subpulses])
    return _state_from_areas(sequence, thetas, t)


def to_schrodinger_picture(state: AnalyticState, molecule: Molecule) -> np.ndarray:
    """Attach the free-rotor phases exp(-i omega_J t) to the coefficients."""
    n = len(state.coefficients)
    omega = rotational_energies(molecule, n)
    return state.coefficients * np.exp(-1j * omega * state.time)


def _area_profiles(sequence: PulseSequence, times: np.ndarray) -> np.ndarray:
    """theta_n at every requested time, quadrature accumulated segment-wise."""
    mol = sequence.molecule
    out = np.zeros((len(times), len(sequence.subpulses)))
    for k, pulse in enumerate(sequence.subpulses):
        lo, hi = pulse.window
        mu = transition_dipole(mol, pulse.index - 1)
        z = 0.0 + 0.0j
        prev = lo
        full = None
        for i, t in enumerate(times):
            if t <= lo:
                continue
            if prev >= hi:
                if full is None:
                    full = _full_area(pulse, mol)
                out[i, k] = full
                continue
            seg_hi = min(t, hi)
            if seg_hi > prev:
                z += fourier_area(pulse, pulse.carrier, prev, seg_hi)
                prev = seg_hi
            out[i, k] = mu * abs(z)
    return out


def analytic_trajectory(
    sequence: PulseSequence, times, basis: RotationalBasis | None = None
) -> Trajectory:
    """Schroedinger-picture trajectory of the closed-form wave function.

    The returned states are padded to the basis size so the same observable
    pipeline works on analytic and numeric runs.
    """
    _require_non_overlapping(sequence)
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    n = len(sequence.subpulses)
    if basis is None:
        basis = RotationalBasis(j_target=n, j_buffer=0)
    if basis.size < n + 1:
        raise ValueError("basis too small for the sequence")
    thetas = _area_profiles(sequence, times)
    omega = rotational_energies(sequence.molecule, basis)
    states = np.zeros((len(times), basis.size), dtype=complex)
    for i, t in enumerate(times):
        st = _state_from_areas(sequence, thetas[i], t)
        states[i, : n + 1] = st.coefficients * np.exp(-1j * omega[: n + 1] * t)
    return Trajectory(times=times, states=states, molecule=sequence.molecule)


def save_state(path, coefficients, t: float, picture: str):
    """Write a state export file: {"t_au", "coeffs": [[re, im], ...], "picture"}."""
    if picture not in ("interaction", "schrodinger"):
        raise ValueError("picture must be 'interaction' or 'schrodinger'")
    coeffs = np.asarray(coefficients, dtype=complex)
    data = {
        "t_au": float(t),
        "coeffs": [[float(c.real), float(c.imag)] for c in coeffs],
        "picture": picture,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def load_state(path):
    """Read a state export file; returns (coefficients, t_au, picture)."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    coeffs = np.array([complex(re, im) for re, im in data["coeffs"]])
    return coeffs, float(data["t_au"]), data["picture"]
