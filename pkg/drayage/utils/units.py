from __future__ import annotations

import numpy as np

G = 9.80665  # m/s^2
R_DRY_AIR = 287.05  # J/(kg K)
P_ATM = 101_325.0  # Pa
KELVIN = 273.15

DIESEL_DENSITY_KG_PER_L = 0.835

S_PER_H = 3600.0
J_PER_KWH = 3.6e6
M_PER_KM = 1000.0
KMH_PER_MPS = 3.6
RAD_S_PER_RPM = np.pi / 30.0


def c_to_k(t_c: float) -> float:
    return t_c + KELVIN


def k_to_c(t_k: float) -> float:
    return t_k - KELVIN


def rpm_to_rad_s(rpm):
    return rpm * RAD_S_PER_RPM


def rad_s_to_rpm(omega):
    return omega / RAD_S_PER_RPM


def kmh_to_mps(kmh: float) -> float:
    return kmh / KMH_PER_MPS


def mps_to_kmh(v: float) -> float:
    return v * KMH_PER_MPS


def air_density(t_amb_k: float, pressure_pa: float = P_ATM) -> float:
    """Dry-air ideal gas density."""
    return pressure_pa / (R_DRY_AIR * t_amb_k)
