"""Populations, orientation, alignment, peaks, and angular distributions.

All observables are quadratic forms of the state coefficients with the
cos(theta) / cos^2(theta) operator matrices; the angular density expands the
wave function in Y_J0 via a Clenshaw Legendre recurrence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import legval

from .model import Molecule, cos2_operator_matrix, cos_operator_matrix
from .units import UNITS

__all__ = [
    "Trajectory",
    "ObservableSeries",
    "AngularDistribution",
    "PeakStats",
    "orientation",
    "alignment",
    "series",
    "peak_statistics",
    "angular_distribution",
    "write_trajectory_csv",
]

_trapz = getattr(np, "trapezoid", np.trapz)


@dataclass(frozen=True)
class Trajectory:
    """Schroedinger-picture states sampled on a monotone time grid."""

    times: np.ndarray
    states: np.ndarray
    molecule: Molecule

    def __post_init__(self):
        if self.states.shape[0] != len(self.times):
            raise ValueError("one state per sampled time required")

    @property
    def size(self) -> int:
        return self.states.shape[1]

    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self.states) ** 2, axis=1))

    def state_at(self, i: int) -> np.ndarray:
        return self.states[i]


@dataclass(frozen=True)
class ObservableSeries:
    """One observable sampled along a trajectory."""

    times: np.ndarray
    values: np.ndarray
    label: str
    molecule: Molecule

    def to_csv(self, path):
        t_rot = self.molecule.t_rot_au
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t_ps,t_over_Trot,value\n")
            for t, v in zip(self.times, self.values):
                fh.write("%.12g,%.12g,%.12g\n" % (UNITS.au_to_ps(t), t / t_rot, v))


@lru_cache(maxsize=64)
def _cos_matrix(n: int) -> np.ndarray:
    return cos_operator_matrix(n)


@lru_cache(maxsize=64)
def _cos2_matrix(n: int) -> np.ndarray:
    return cos2_operator_matrix(n)


def orientation(coefficients) -> float:
    """<cos(theta)> of a normalized coefficient vector."""
    c = np.asarray(coefficients)
    return float(np.real(np.conj(c) @ (_cos_matrix(len(c)) @ c)))


def alignment(coefficients) -> float:
    """<cos^2(theta)> of a normalized coefficient vector."""
    c = np.asarray(coefficients)
    return float(np.real(np.conj(c) @ (_cos2_matrix(len(c)) @ c)))


def series(trajectory: Trajectory, which: str) -> ObservableSeries:
    """Extract one observable series from a trajectory.

    which: "orientation", "alignment", "norm", or "population:J".
    """
    if len(trajectory.times) == 0:
        raise ValueError("trajectory is empty")
    states = trajectory.states
    if which == "orientation":
        mat = _cos_matrix(trajectory.size)
        values = np.einsum("ti,ij,tj->t", np.conj(states), mat, states).real
    elif which == "alignment":
        mat = _cos2_matrix(trajectory.size)
        values = np.einsum("ti,ij,tj->t", np.conj(states), mat, states).real
    elif which == "norm":
        values = trajectory.norms()
    elif which.startswith("population:"):
        j = int(which.split(":", 1)[1])
        if not (0 <= j < trajectory.size):
            raise ValueError(f"population index {j} outside the basis")
        values = np.abs(states[:, j]) ** 2
    else:
        raise ValueError(f"unknown observable {which!r}")
    return ObservableSeries(
        times=trajectory.times, values=values, label=which, molecule=trajectory.molecule
    )


@dataclass(frozen=True)
class PeakStats:
    """Global maximum and revival-peak spacing of a series window."""

    t_star: float
    max_value: float
    peak_times: tuple
    spacings: tuple

    @property
    def mean_spacing(self) -> float:
        return float(np.mean(self.spacings)) if self.spacings else math.nan

    @property
    def spacing_spread(self) -> float:
        return float(np.ptp(self.spacings)) if self.spacings else 0.0

    def to_dict(self) -> dict:
        return {
            "t_star_ps": UNITS.au_to_ps(self.t_star),
            "max": self.max_value,
            "spacings_ps": [UNITS.au_to_ps(s) for s in self.spacings],
        }

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def _refine_peak(times, values, i):
    """Parabolic refinement through three samples around a local maximum."""
    h = times[i + 1] - times[i]
    denom = values[i - 1] - 2.0 * values[i] + values[i + 1]
    if denom >= 0 or abs(denom) < 1e-300:
        return times[i], values[i]
    delta = 0.5 * (values[i - 1] - values[i + 1]) / denom
    t_pk = times[i] + delta * h
    v_pk = values[i] - 0.25 * (values[i - 1] - values[i + 1]) * delta
    return t_pk, v_pk


def peak_statistics(obs: ObservableSeries, window=None) -> PeakStats:
    """Locate revival peaks: local maxima above half the window maximum."""
    t = np.asarray(obs.times)
    v = np.asarray(obs.values)
    if window is not None:
        lo, hi = window
        mask = (t >= lo) & (t <= hi)
        if not np.any(mask):
            raise ValueError("window does not overlap the series")
        t, v = t[mask], v[mask]
    if len(t) == 0:
        raise ValueError("empty series")
    vmax = v.max()
    peaks = []
    for i in range(1, len(t) - 1):
        if v[i] >= v[i - 1] and v[i] > v[i + 1] and v[i] > 0.5 * vmax:
            peaks.append(_refine_peak(t, v, i))
    if peaks:
        times_pk, vals_pk = zip(*peaks)
        best = int(np.argmax(vals_pk))
        t_star, max_value = times_pk[best], vals_pk[best]
        spacings = tuple(np.diff(times_pk)) if len(times_pk) > 1 else ()
    else:
        i = int(np.argmax(v))
        t_star, max_value = t[i], vmax
        times_pk, spacings = (), ()
    return PeakStats(
        t_star=float(t_star),
        max_value=float(max_value),
        peak_times=tuple(float(x) for x in times_pk),
        spacings=tuple(float(s) for s in spacings),
    )


@dataclass(frozen=True)
class AngularDistribution:
    """Probability density over the polar angle, sin(theta) weight included."""

    theta: np.ndarray
    density: np.ndarray

    def __post_init__(self):
        if np.any(self.density < -1e-12):
            raise ValueError("density must be non-negative")

    @property
    def normalization(self) -> float:
        return float(_trapz(self.density, self.theta))

    def forward_fraction(self) -> float:
        """Weight of the forward hemisphere theta <= pi/2."""
        mask = self.theta <= math.pi / 2
        return float(_trapz(self.density[mask], self.theta[mask]))

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("theta_rad,density\n")
            for th, d in zip(self.theta, self.density):
                fh.write("%.12g,%.12g\n" % (th, d))


def angular_distribution(coefficients, n_grid: int = 512) -> AngularDistribution:
    """Angular probability density rho(theta) = 2 pi sin(theta) |psi(theta)|^2.

    psi is expanded over Y_J0 = sqrt((2J+1)/4pi) P_J(cos theta); the Legendre
    sum is evaluated by the stable upward (Clenshaw) recurrence and the
    density is renormalized on the grid so its trapezoid integral is exactly 1.
    """
    if n_grid < 64:
        raise ValueError("n_grid must be >= 64")
    c = np.asarray(coefficients, dtype=complex)
    j = np.arange(len(c))
    weights = c * np.sqrt((2 * j + 1) / (4.0 * math.pi))
    theta = np.linspace(0.0, math.pi, n_grid)
    x = np.cos(theta)
    psi = legval(x, weights)
    density = 2.0 * math.pi * np.sin(theta) * np.abs(psi) ** 2
    density = density / _trapz(density, theta)
    return AngularDistribution(theta=theta, density=density)


def write_trajectory_csv(trajectory: Trajectory, path, include_coefficients: bool = False):
    """Trajectory CSV: t_ps, t_over_Trot, norm, optionally reJ/imJ per state."""
    t_rot = trajectory.molecule.t_rot_au
    norms = trajectory.norms()
    with open(path, "w", encoding="utf-8") as fh:
        header = ["t_ps", "t_over_Trot", "norm"]
        if include_coefficients:
            for j in range(trajectory.size):
                header += [f"re{j}", f"im{j}"]
        fh.write(",".join(header) + "\n")
        for i, t in enumerate(trajectory.times):
            row = ["%.12g" % UNITS.au_to_ps(t), "%.12g" % (t / t_rot), "%.12g" % norms[i]]
            if include_coefficients:
                for j in range(trajectory.size):
                    row += [
                        "%.12g" % trajectory.states[i, j].real,
                        "%.12g" % trajectory.states[i, j].imag,
                    ]
            fh.write(",".join(row) + "\n")
