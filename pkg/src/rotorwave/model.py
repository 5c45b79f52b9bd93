"""Rigid-rotor model: molecule constants, truncated |J> basis, operator matrices.

The basis is the m=0 ladder |0>, |1>, ..., |J_max + buffer> of a linear
molecule; cos(theta) couples adjacent J with matrix elements
M(J) = (J+1)/sqrt((2J+3)(2J+1)) and has zero diagonal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .units import UNITS

__all__ = [
    "Molecule",
    "RotationalBasis",
    "LIH",
    "load_molecule",
    "builtin_molecule",
    "rotational_energy",
    "rotational_energies",
    "transition_frequency",
    "cos_matrix_element",
    "transition_dipole",
    "cos_operator_matrix",
    "cos2_operator_matrix",
]


@dataclass(frozen=True)
class Molecule:
    """Linear polar molecule described by its spectroscopic constants.

    Attributes
    ----------
    name : label used in output files
    b_cm1 : rotational constant in cm^-1
    mu0_debye : permanent dipole moment in Debye
    """

    name: str
    b_cm1: float
    mu0_debye: float

    def __post_init__(self):
        if self.b_cm1 <= 0:
            raise ValueError(f"rotational constant must be positive, got {self.b_cm1}")
        if self.mu0_debye <= 0:
            raise ValueError(f"dipole moment must be positive, got {self.mu0_debye}")

    @property
    def b_au(self) -> float:
        """Rotational constant as atomic angular frequency."""
        return UNITS.cm1_to_au(self.b_cm1)

    @property
    def mu0_au(self) -> float:
        """Permanent dipole moment in atomic units."""
        return UNITS.debye_to_au(self.mu0_debye)

    @property
    def t_rot_au(self) -> float:
        """Full revival period pi/B in atomic time units."""
        return math.pi / self.b_au

    @property
    def t_rot_ps(self) -> float:
        return UNITS.au_to_ps(self.t_rot_au)

    def to_dict(self) -> dict:
        return {"name": self.name, "B_cm1": self.b_cm1, "mu0_debye": self.mu0_debye}

    @classmethod
    def from_dict(cls, data: dict) -> "Molecule":
        return cls(name=data["name"], b_cm1=data["B_cm1"], mu0_debye=data["mu0_debye"])


LIH = Molecule("LiH", b_cm1=7.513, mu0_debye=5.88)

_BUILTINS = {"LiH": LIH}


def builtin_molecule(name: str) -> Molecule:
    try:
        return _BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin molecule {name!r}; available: {sorted(_BUILTINS)}")


def load_molecule(path) -> Molecule:
    """Read a molecule definition file: {"name", "B_cm1", "mu0_debye"}."""
    with open(path, "r", encoding="utf-8") as fh:
        return Molecule.from_dict(json.load(fh))


@dataclass(frozen=True)
class RotationalBasis:
    """Truncated |J> ladder: states J = 0 .. j_target + j_buffer.

    j_target is the highest controlled state; j_buffer extra states sit above
    it purely to detect truncation leakage.
    """

    j_target: int
    j_buffer: int = 8

    def __post_init__(self):
        if self.j_target < 1:
            raise ValueError("j_target must be >= 1")
        if self.j_buffer < 0:
            raise ValueError("j_buffer must be >= 0")

    @property
    def size(self) -> int:
        return self.j_target + self.j_buffer + 1

    @property
    def j_values(self) -> np.ndarray:
        return np.arange(self.size)


def _basis_size(basis) -> int:
    return basis if isinstance(basis, (int, np.integer)) else basis.size


def rotational_energy(molecule: Molecule, j: int) -> float:
    """Eigenfrequency omega_J = B*J*(J+1) in atomic units."""
    if j < 0:
        raise ValueError(f"J must be >= 0, got {j}")
    return molecule.b_au * j * (j + 1)


def rotational_energies(molecule: Molecule, basis) -> np.ndarray:
    """Vector of omega_J over the basis."""
    j = np.arange(_basis_size(basis), dtype=float)
    return molecule.b_au * j * (j + 1.0)


def transition_frequency(molecule: Molecule, j: int) -> float:
    """omega_{J+1,J} = 2*B*(J+1) in atomic units."""
    if j < 0:
        raise ValueError(f"J must be >= 0, got {j}")
    return 2.0 * molecule.b_au * (j + 1)


def cos_matrix_element(j: int) -> float:
    """<J+1,0|cos(theta)|J,0> = (J+1)/sqrt((2J+3)(2J+1))."""
    if j < 0:
        raise ValueError(f"J must be >= 0, got {j}")
    return (j + 1) / math.sqrt((2 * j + 3) * (2 * j + 1))


def transition_dipole(molecule: Molecule, j: int) -> float:
    """Dipole matrix element mu0*M(J) between |J+1> and |J>, atomic units."""
    return molecule.mu0_au * cos_matrix_element(j)


def cos_operator_matrix(basis) -> np.ndarray:
    """cos(theta) on the truncated basis: symmetric tridiagonal, zero diagonal."""
    n = _basis_size(basis)
    mat = np.zeros((n, n))
    for j in range(n - 1):
        m = cos_matrix_element(j)
        mat[j, j + 1] = m
        mat[j + 1, j] = m
    return mat


def cos2_operator_matrix(basis) -> np.ndarray:
    """cos^2(theta) on the truncated basis.

    Built by squaring the cos(theta) matrix on a basis enlarged by two states
    and truncating back, so every retained entry is exact.
    """
    n = _basis_size(basis)
    big = cos_operator_matrix(n + 2)
    return (big @ big)[:n, :n]
