"""UAV trajectory and C-band / Ka-band link rates per slot."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import LinkBudgetParams, Position3D, Scenario, UavKinematics


def uav_position(kin: UavKinematics, t: int) -> Position3D:
    """Position at the end of slot ``t`` (1-based) on the circular trajectory."""
    angle = kin.angle0_rad + kin.speed_mps * kin.slot_duration_s * t / kin.radius_m
    return Position3D(
        kin.center.x + kin.radius_m * math.cos(angle),
        kin.center.y + kin.radius_m * math.sin(angle),
        kin.altitude_m,
    )


def pathloss_umi_db(distance_m: float, carrier_freq_hz: float) -> float:
    """UMi street-canyon LoS: 32.4 + 21 log10(d) + 20 log10(f_GHz)."""
    if distance_m <= 0:
        raise ValueError(f"distance must be positive, got {distance_m}")
    return 32.4 + 21.0 * math.log10(distance_m) + 20.0 * math.log10(carrier_freq_hz / 1e9)


def _shannon(bandwidth, power, gain_sq, noise_psd, antenna_gain=1.0):
    snr = power * antenna_gain * gain_sq / (noise_psd * bandwidth)
    return bandwidth * np.log2(1.0 + snr)


def rate_c_band(params: LinkBudgetParams, channel_gain_sq, direction: str = "up"):
    power = params.tx_power_up_w if direction == "up" else params.tx_power_down_w
    return _shannon(params.bandwidth_hz, power, channel_gain_sq, params.noise_psd_w_per_hz)


def rate_ka_band(params: LinkBudgetParams, channel_gain_sq, direction: str = "up"):
    power = params.tx_power_up_w if direction == "up" else params.tx_power_down_w
    return _shannon(params.bandwidth_hz, power, channel_gain_sq, params.noise_psd_w_per_hz,
                    params.antenna_gain_linear)


def channel_us(params: LinkBudgetParams, distance_m: float, nlos_sample: complex) -> complex:
    """Rician UAV-satellite coefficient: scaled LoS term plus scaled NLoS sample."""
    if distance_m <= 0:
        raise ValueError(f"distance must be positive, got {distance_m}")
    eta = params.rician_factor
    h_los = math.sqrt(distance_m ** -params.pathloss_exp_los) * np.exp(
        -2j * math.pi * distance_m / params.wavelength_m)
    return (math.sqrt(eta / (1.0 + eta)) * h_los
            + math.sqrt(distance_m ** -params.pathloss_exp_nlos / (1.0 + eta)) * nlos_sample)


def complex_gaussian(rng: np.random.Generator, size) -> np.ndarray:
    """CN(0, 1) samples."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)


@dataclass(frozen=True)
class ChannelRealization:
    rate_ub: np.ndarray  # (N, T) bits/s
    rate_bu: np.ndarray
    rate_us: np.ndarray  # (M, T)
    rate_su: np.ndarray
    rng_seed: int

    def __post_init__(self):
        for name in ("rate_ub", "rate_bu", "rate_us", "rate_su"):
            arr = getattr(self, name)
            if np.any(arr < 0) or not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite and non-negative")


def realize_rates(scenario: Scenario, seed: int) -> ChannelRealization:
    rng = np.random.default_rng(seed)
    N, M, T = scenario.N, scenario.M, scenario.T
    uav = [uav_position(scenario.kinematics, t) for t in range(1, T + 1)]

    h0 = complex_gaussian(rng, (N, T))
    rate_ub = np.zeros((N, T))
    rate_bu = np.zeros((N, T))
    for b, bs in enumerate(scenario.bs_list):
        for t in range(T):
            d = max(uav[t].distance(bs.position), 1.0)
            pl = 10.0 ** (-pathloss_umi_db(d, bs.link.carrier_freq_hz) / 10.0)
            g2 = abs(h0[b, t]) ** 2 * bs.link.shadow_fading_linear ** 2 * pl
            rate_ub[b, t] = rate_c_band(bs.link, g2, "up")
            rate_bu[b, t] = rate_c_band(bs.link, g2, "down")

    h_nl = complex_gaussian(rng, (M, T))
    rate_us = np.zeros((M, T))
    rate_su = np.zeros((M, T))
    for s, sat in enumerate(scenario.sat_list):
        for t in range(T):
            d = uav[t].distance(sat.positions[t])
            g2 = abs(channel_us(sat.link, d, h_nl[s, t])) ** 2
            rate_us[s, t] = rate_ka_band(sat.link, g2, "up")
            rate_su[s, t] = rate_ka_band(sat.link, g2, "down")
    return ChannelRealization(rate_ub, rate_bu, rate_us, rate_su, seed)
