"""Physical constants and unit helpers shared across the package.

All internal computation is in SI units (farads, henries, meters, rad/s).
File formats and the CLI use the conventional lab units (fF, nH, mm, GHz);
the conversion factors live here so they are written down exactly once.
"""

from __future__ import annotations

import math

from scipy.constants import c as C_LIGHT
from scipy.constants import e as E_CHARGE
from scipy.constants import h as H_PLANCK
from scipy.constants import hbar as HBAR

__all__ = [
    "C_LIGHT",
    "E_CHARGE",
    "H_PLANCK",
    "HBAR",
    "PHI0",
    "TWO_PI",
    "FEMTO",
    "NANO",
    "MILLI",
    "GIGA",
    "omega_from_hz",
    "hz_from_omega",
    "charging_energy",
]

#: Reduced flux quantum hbar / 2e in webers.
PHI0 = HBAR / (2.0 * E_CHARGE)

TWO_PI = 2.0 * math.pi

FEMTO = 1e-15
NANO = 1e-9
MILLI = 1e-3
GIGA = 1e9


def omega_from_hz(f_hz: float) -> float:
    """Angular frequency (rad/s) from an ordinary frequency in Hz."""
    return TWO_PI * f_hz


def hz_from_omega(omega: float) -> float:
    """Ordinary frequency in Hz from an angular frequency (rad/s)."""
    return omega / TWO_PI


def charging_energy(c_farad: float) -> float:
    """Single-electron charging energy e^2 / (2C) in joules."""
    return E_CHARGE**2 / (2.0 * c_farad)
