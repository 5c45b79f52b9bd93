"""Exact numerical propagation of the driven rigid rotor.

H(t) = B J^2 - mu0 E(t) cos(theta) on the truncated |J> basis.  Active pulse
windows are integrated with a fourth-order commutator-free Magnus scheme
built from two exact (eigendecomposition) exponentials per step, so the
propagation is unitary by construction at any step size; between windows the
free evolution is applied exactly as phase factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Molecule, RotationalBasis, cos_operator_matrix, rotational_energies
from .observables import Trajectory
from .pulses import PulseSequence

__all__ = [
    "WavefunctionState",
    "PropagationSchedule",
    "BasisTooSmallError",
    "hamiltonian_at",
    "step_exponential_midpoint",
    "free_evolution",
    "default_dt",
    "propagate_window",
    "run_experiment",
]

# Gauss-Legendre nodes and the fourth-order commutator-free weights
_SQRT3 = math.sqrt(3.0)
_NODE1, _NODE2 = 0.5 - _SQRT3 / 6.0, 0.5 + _SQRT3 / 6.0
_W1, _W2 = (3.0 - 2.0 * _SQRT3) / 12.0, (3.0 + 2.0 * _SQRT3) / 12.0

_LEAK_LIMIT = 1e-6
_EIGH_CHUNK = 4096


class BasisTooSmallError(RuntimeError):
    """Truncation guard tripped: population reached the top buffer states."""

    def __init__(self, leakage: float, time: float):
        super().__init__(
            f"population {leakage:.3e} in the top buffer states at t = {time:.6g} au; "
            "enlarge j_buffer"
        )
        self.leakage = leakage
        self.time = time


@dataclass(frozen=True)
class WavefunctionState:
    """Complex coefficient vector over the truncated basis at one instant."""

    coefficients: np.ndarray
    time: float

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2


@dataclass(frozen=True)
class PropagationSchedule:
    """Active field windows plus the uniform observable-sampling grid."""

    windows: tuple
    t_start: float
    t_end: float
    sample_step: float

    def __post_init__(self):
        for (a, b), (c, d) in zip(self.windows, self.windows[1:]):
            if c < b:
                raise ValueError("active windows must be disjoint and ordered")
        if self.sample_step <= 0:
            raise ValueError("sample_step must be positive")

    @classmethod
    def from_sequence(
        cls,
        sequence: PulseSequence,
        sample_step_trot: float = 0.01,
        extra_revivals: float = 4.0,
        half_span_sigmas: float = 5.0,
    ) -> "PropagationSchedule":
        """Windows tau_n +/- 5 T_n merged where they touch; grid in T_rot units."""
        t_rot = sequence.molecule.t_rot_au
        raw = sorted(
            (p.center_time - half_span_sigmas * p.duration,
             p.center_time + half_span_sigmas * p.duration)
            for p in sequence.subpulses
        )
        merged = [list(raw[0])]
        for a, b in raw[1:]:
            if a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        t_start = merged[0][0]
        t_end = merged[-1][1] + extra_revivals * t_rot
        return cls(
            windows=tuple((a, b) for a, b in merged),
            t_start=t_start,
            t_end=t_end,
            sample_step=sample_step_trot * t_rot,
        )

    def sample_times(self) -> np.ndarray:
        n = int(math.floor((self.t_end - self.t_start) / self.sample_step + 1e-9)) + 1
        return self.t_start + self.sample_step * np.arange(n)

    def in_window(self, t: float) -> bool:
        return any(a - 1e-9 <= t <= b + 1e-9 for a, b in self.windows)


def hamiltonian_at(molecule: Molecule, basis, field_value: float) -> np.ndarray:
    """H = diag(omega_J) - mu0 * E * cos_matrix on the truncated basis."""
    h = -molecule.mu0_au * field_value * cos_operator_matrix(basis)
    h[np.diag_indices_from(h)] = rotational_energies(molecule, basis)
    return h


def step_exponential_midpoint(coefficients: np.ndarray, hamiltonian: np.ndarray, dt: float):
    """psi -> exp(-i H dt) psi with the exponential taken exactly.

    The eigendecomposition of the small real-symmetric matrix makes the step
    norm-preserving regardless of dt.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    w, v = np.linalg.eigh(hamiltonian)
    return v @ (np.exp(-1j * w * dt) * (v.T @ coefficients))


def free_evolution(coefficients: np.ndarray, molecule: Molecule, dt: float) -> np.ndarray:
    """Exact field-free update: phase factors exp(-i omega_J dt)."""
    omega = rotational_energies(molecule, len(coefficients))
    return coefficients * np.exp(-1j * omega * dt)


def default_dt(sequence: PulseSequence, samples_per_cycle: int = 50) -> float:
    """Resolve the fastest carrier with the requested samples per cycle."""
    fastest = max(p.carrier for p in sequence.subpulses)
    return 2.0 * math.pi / fastest / samples_per_cycle


def _advance_cf4(psi, sequence, diag, cosmat, segments, dt_max):
    """March through contiguous in-window segments.

    segments is a list of (t_a, t_b); returns the final state and one state
    snapshot per segment end.  Every step applies two exact exponentials of
    0.5*diag - mu0*g*cosmat with the fourth-order weights.
    """
    if not segments:
        return psi, []
    mu0 = sequence.molecule.mu0_au
    counts = []
    g_first, g_second, dts = [], [], []
    for t_a, t_b in segments:
        n = max(1, int(math.ceil((t_b - t_a) / dt_max - 1e-12)))
        dt = (t_b - t_a) / n
        ts = t_a + dt * np.arange(n)
        f1 = sequence.field(ts + _NODE1 * dt)
        f2 = sequence.field(ts + _NODE2 * dt)
        g_first.append(_W2 * f1 + _W1 * f2)
        g_second.append(_W1 * f1 + _W2 * f2)
        dts.append(np.full(n, dt))
        counts.append(n)
    g1 = np.concatenate(g_first)
    g2 = np.concatenate(g_second)
    dt_all = np.concatenate(dts)

    # interleave the two exponentials of every step into one batched stream
    n_total = len(g1)
    gs = np.empty(2 * n_total)
    gs[0::2] = g1
    gs[1::2] = g2
    dt2 = np.repeat(dt_all, 2)

    boundaries = 2 * np.cumsum(counts)
    snapshots = []
    b_idx = 0
    for i0 in range(0, 2 * n_total, _EIGH_CHUNK):
        g = gs[i0 : i0 + _EIGH_CHUNK]
        hs = 0.5 * diag[None, :, :] - (mu0 * g)[:, None, None] * cosmat[None, :, :]
        w, v = np.linalg.eigh(hs)
        phases = np.exp(-1j * w * dt2[i0 : i0 + _EIGH_CHUNK, None])
        for k in range(len(g)):
            psi = v[k] @ (phases[k] * (v[k].T @ psi))
            while b_idx < len(boundaries) and i0 + k + 1 == boundaries[b_idx]:
                snapshots.append(psi.copy())
                b_idx += 1
    return psi, snapshots


def propagate_window(
    coefficients: np.ndarray,
    sequence: PulseSequence,
    basis,
    t_a: float,
    t_b: float,
    dt_max: float | None = None,
    record_times=None,
):
    """Propagate through an active window [t_a, t_b].

    Returns (final coefficients, list of WavefunctionState at record_times).
    """
    if t_b <= t_a:
        raise ValueError("t_b must exceed t_a")
    if dt_max is None:
        dt_max = default_dt(sequence)
    mol = sequence.molecule
    diag = np.diag(rotational_energies(mol, basis))
    cosmat = cos_operator_matrix(basis)
    marks = sorted(t for t in (record_times or ()) if t_a < t <= t_b)
    edges = [t_a] + marks
    if not marks or marks[-1] < t_b:
        edges.append(t_b)
    segments = list(zip(edges, edges[1:]))
    psi, snapshots = _advance_cf4(
        np.asarray(coefficients, complex), sequence, diag, cosmat, segments, dt_max
    )
    recorded = [
        WavefunctionState(coefficients=snap, time=end)
        for snap, (_, end) in zip(snapshots, segments)
        if end in marks
    ]
    return psi, recorded


def _check_leakage(psi, basis: RotationalBasis, t: float):
    n_guard = min(2, basis.j_buffer)
    if n_guard == 0:
        return
    leak = float(np.sum(np.abs(psi[-n_guard:]) ** 2))
    if leak > _LEAK_LIMIT:
        raise BasisTooSmallError(leakage=leak, time=t)


def run_experiment(
    sequence: PulseSequence,
    schedule: PropagationSchedule | None = None,
    basis: RotationalBasis | None = None,
    samples_per_cycle: int = 50,
    initial=None,
) -> Trajectory:
    """Full run: exact free evolution between windows, CF4 stepping inside.

    States are emitted on the uniform sampling grid of the schedule; the
    truncation guard raises if the top buffer states accumulate population.
    """
    if schedule is None:
        schedule = PropagationSchedule.from_sequence(sequence)
    if basis is None:
        basis = RotationalBasis(j_target=len(sequence.subpulses), j_buffer=8)
    if basis.size < len(sequence.subpulses) + 1:
        raise ValueError("basis cannot hold the targeted ladder")
    mol = sequence.molecule
    dt_max = default_dt(sequence, samples_per_cycle)
    diag = np.diag(rotational_energies(mol, basis))
    cosmat = cos_operator_matrix(basis)

    samples = schedule.sample_times()
    states = np.empty((len(samples), basis.size), dtype=complex)
    if initial is None:
        psi = np.zeros(basis.size, dtype=complex)
        psi[0] = 1.0
    else:
        psi = np.asarray(initial, dtype=complex).copy()
        if len(psi) != basis.size:
            raise ValueError("initial state size does not match the basis")

    # breakpoints: every sample time, plus window edges that fall between them
    points = [(t, i) for i, t in enumerate(samples)]
    for edge in [e for w in schedule.windows for e in w]:
        if schedule.t_start < edge < schedule.t_end and not np.any(
            np.abs(samples - edge) < 1e-9
        ):
            points.append((edge, -1))
    points.sort(key=lambda p: p[0])

    if points[0][1] >= 0:
        states[points[0][1]] = psi

    pending = []       # queued in-window segments
    pending_slots = [] # sample index recorded at each segment end (-1: none)

    def flush():
        nonlocal psi
        res, snapshots = _advance_cf4(psi, sequence, diag, cosmat, pending, dt_max)
        psi = res
        for snap, slot in zip(snapshots, pending_slots):
            if slot >= 0:
                states[slot] = snap
                _check_leakage(snap, basis, samples[slot])
        pending.clear()
        pending_slots.clear()

    for (t0, _), (t1, slot) in zip(points, points[1:]):
        if t1 <= t0:
            if slot >= 0:
                states[slot] = psi
            continue
        if schedule.in_window(0.5 * (t0 + t1)):
            pending.append((t0, t1))
            pending_slots.append(slot)
        else:
            flush()
            psi = free_evolution(psi, mol, t1 - t0)
            if slot >= 0:
                states[slot] = psi
                _check_leakage(psi, basis, samples[slot])
    flush()
    return Trajectory(times=samples, states=states, molecule=mol)
