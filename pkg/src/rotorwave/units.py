"""Conversions between laboratory units and Hartree atomic units.

Everything inside the package runs in atomic units (hbar = 1); lab units
(cm^-1, Debye, femtoseconds, W/cm^2) appear only at the I/O boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "UnitContext",
    "UNITS",
    "cm1_to_au",
    "au_to_cm1",
    "debye_to_au",
    "au_to_debye",
    "fs_to_au",
    "au_to_fs",
    "ps_to_au",
    "au_to_ps",
    "field_to_intensity",
    "intensity_to_field",
    "field_au_to_kv_cm",
]


@dataclass(frozen=True)
class UnitContext:
    """Conversion constants (CODATA values).

    Attributes
    ----------
    wavenumber_to_au : cm^-1 to atomic angular frequency (= Hartree, hbar=1)
    dipole_debye_to_au : Debye to atomic dipole units
    fs_per_au : femtoseconds per atomic time unit
    field_sq_to_w_cm2 : intensity in W/cm^2 of a field of 1 au amplitude
    field_to_v_m : atomic field amplitude to V/m
    """

    wavenumber_to_au: float = 4.5563352529e-6
    dipole_debye_to_au: float = 0.3934302014
    fs_per_au: float = 2.4188843266e-2
    field_sq_to_w_cm2: float = 3.50944506e16
    field_to_v_m: float = 5.14220674763e11

    def cm1_to_au(self, x):
        return x * self.wavenumber_to_au

    def au_to_cm1(self, x):
        return x / self.wavenumber_to_au

    def debye_to_au(self, x):
        return x * self.dipole_debye_to_au

    def au_to_debye(self, x):
        return x / self.dipole_debye_to_au

    def fs_to_au(self, x):
        return x / self.fs_per_au

    def au_to_fs(self, x):
        return x * self.fs_per_au

    def ps_to_au(self, x):
        return x * 1e3 / self.fs_per_au

    def au_to_ps(self, x):
        return x * self.fs_per_au * 1e-3

    def field_to_intensity(self, e_au):
        """Cycle-averaged intensity in W/cm^2 of a field amplitude in au."""
        return self.field_sq_to_w_cm2 * e_au * e_au

    def intensity_to_field(self, i_w_cm2):
        return math.sqrt(i_w_cm2 / self.field_sq_to_w_cm2)

    def field_au_to_kv_cm(self, e_au):
        # 1 kV/cm = 1e5 V/m
        return e_au * self.field_to_v_m / 1e5


UNITS = UnitContext()

# module-level shorthands bound to the default context
cm1_to_au = UNITS.cm1_to_au
au_to_cm1 = UNITS.au_to_cm1
debye_to_au = UNITS.debye_to_au
au_to_debye = UNITS.au_to_debye
fs_to_au = UNITS.fs_to_au
au_to_fs = UNITS.au_to_fs
ps_to_au = UNITS.ps_to_au
au_to_ps = UNITS.au_to_ps
field_to_intensity = UNITS.field_to_intensity
intensity_to_field = UNITS.intensity_to_field
field_au_to_kv_cm = UNITS.field_au_to_kv_cm
