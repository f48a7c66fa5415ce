"""Per-slot latency and energy of local, BS and satellite processing.

All functions are linear in the task amount ``y`` (bits) and accept numpy
arrays.
"""

from __future__ import annotations

import numpy as np

from .scenario import Propulsion, UavKinematics


def latency_local(y, f_u: float, delta: float):
    if f_u <= 0:
        raise ValueError("f_u must be positive")
    return delta * np.asarray(y, dtype=float) / f_u


def energy_fly(propulsion: Propulsion, kinematics: UavKinematics, T: int) -> float:
    """Propulsion energy of a fixed-wing UAV on a circle, over T slots."""
    v, r = kinematics.speed_mps, kinematics.radius_m
    if v <= 0 or r <= 0:
        raise ValueError("speed and radius must be positive")
    c1, c2, g = propulsion.c1, propulsion.c2, propulsion.g
    power = (c1 + c2 / (g**2 * r**2)) * v**3 + c2 / v
    return power * T * kinematics.slot_duration_s


def _check_rate(y, *rates):
    y = np.asarray(y, dtype=float)
    if np.any(y > 0) and any(np.any(np.asarray(r) <= 0) for r in rates):
        raise ValueError("zero link rate with a positive task amount")
    return y


def bs_latency_per_bit(r_ub, r_bu, f_b, delta, ret):
    return 1.0 / r_ub + delta / f_b + ret / r_bu


def sat_latency_per_bit(r_us, r_su, r_sc, f_c, delta, ret):
    return 1.0 / r_us + (1.0 + ret) / r_sc + delta / f_c + ret / r_su


def latency_bs(y, r_ub, r_bu, f_b, delta, ret):
    y = _check_rate(y, r_ub, r_bu)
    if not np.any(y):
        return np.zeros_like(y) if y.ndim else 0.0
    return y / r_ub + delta * y / f_b + ret * y / r_bu


def energy_bs(y, r_ub, p_ub):
    y = _check_rate(y, r_ub)
    if not np.any(y):
        return np.zeros_like(y) if y.ndim else 0.0
    return p_ub * y / r_ub


def latency_sat(y, r_us, r_su, r_sc, f_c, delta, ret):
    y = _check_rate(y, r_us, r_su, r_sc)
    if not np.any(y):
        return np.zeros_like(y) if y.ndim else 0.0
    return y / r_us + y * (1.0 + ret) / r_sc + delta * y / f_c + ret * y / r_su


def energy_sat(y, r_us, r_sc, p_us, p_s):
    y = _check_rate(y, r_us, r_sc)
    if not np.any(y):
        return np.zeros_like(y) if y.ndim else 0.0
    return p_us * y / r_us + p_s * y / r_sc
