import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sagin_dro.channel import (
    channel_us, complex_gaussian, pathloss_umi_db, rate_c_band, rate_ka_band, realize_rates,
    uav_position,
)
from sagin_dro.scenario import (
    LinkBudgetParams, Position3D, UavKinematics, c_band_link, default_scenario, ka_band_link,
)

KIN = UavKinematics(center=Position3D(1000.0, 0.0, 100.0), radius_m=1000.0, altitude_m=100.0,
                    speed_mps=16.667, slot_duration_s=60.0)


def test_position_after_one_slot():
    p = uav_position(KIN, 1)
    # arc angle 16.667 * 60 / 1000 = 1.00002 rad
    assert p.x == pytest.approx(1000 + 1000 * math.cos(1.00002), abs=1e-9)
    assert p.y == pytest.approx(1000 * math.sin(1.00002), abs=1e-9)
    assert p.x == pytest.approx(1540.2, abs=0.1)
    assert p.y == pytest.approx(841.5, abs=0.1)
    assert p.z == 100.0


def test_full_and_half_revolution():
    r = 1000.0
    # choose tau so one slot covers exactly half / all of the circle
    half = UavKinematics(radius_m=r, speed_mps=math.pi * r / 60.0, slot_duration_s=60.0)
    p = uav_position(half, 1)
    assert (p.x, p.y, p.z) == pytest.approx((0.0, 0.0, 100.0), abs=1e-9)
    full = UavKinematics(radius_m=r, speed_mps=2 * math.pi * r / 60.0, slot_duration_s=60.0)
    p = uav_position(full, 1)
    assert (p.x, p.y) == pytest.approx((2000.0, 0.0), abs=1e-9)


@given(st.integers(1, 500), st.floats(1.0, 50.0), st.floats(10.0, 5000.0))
def test_position_stays_on_circle(t, v, r):
    kin = UavKinematics(radius_m=r, speed_mps=v)
    p = uav_position(kin, t)
    assert math.hypot(p.x - kin.center.x, p.y - kin.center.y) == pytest.approx(r, rel=1e-9)


def test_pathloss_examples():
    assert pathloss_umi_db(1.0, 5e9) == pytest.approx(32.4 + 20 * math.log10(5), abs=1e-12)
    assert pathloss_umi_db(1.0, 5e9) == pytest.approx(46.38, abs=0.005)
    assert pathloss_umi_db(100.0, 5e9) == pytest.approx(88.38, abs=0.005)
    assert pathloss_umi_db(100.0, 5e9) - pathloss_umi_db(10.0, 5e9) == pytest.approx(21.0, abs=1e-12)


@pytest.mark.parametrize("d", [0.0, -3.0])
def test_pathloss_rejects_nonpositive_distance(d):
    with pytest.raises(ValueError):
        pathloss_umi_db(d, 5e9)


def test_c_band_rate_example():
    # the worked example states N0 directly as 10^-17.4 W/Hz
    params = LinkBudgetParams(bandwidth_hz=20e6, tx_power_up_w=1.6, tx_power_down_w=1.6,
                              noise_psd_w_per_hz=10 ** -17.4)
    noise = 10 ** -17.4 * 20e6
    assert noise == pytest.approx(7.962e-11, rel=1e-3)
    snr = 1.6 * 1e-10 / noise
    assert snr == pytest.approx(2.0096, rel=1e-4)
    r = rate_c_band(params, 1e-10, "up")
    assert r == pytest.approx(20e6 * math.log2(1 + snr), rel=1e-12)
    assert r == pytest.approx(3.179e7, rel=1e-3)
    assert rate_c_band(params, 0.0) == 0.0


def test_c_band_bandwidth_scaling():
    # doubling B and P together keeps the SNR fixed, so the rate doubles
    a = LinkBudgetParams(bandwidth_hz=10e6, tx_power_up_w=1.0, tx_power_down_w=1.0)
    b = LinkBudgetParams(bandwidth_hz=20e6, tx_power_up_w=2.0, tx_power_down_w=2.0)
    assert rate_c_band(b, 1e-12) == pytest.approx(2 * rate_c_band(a, 1e-12), rel=1e-12)


def test_ka_band_rate_example():
    g0 = 10 ** 4.33
    assert g0 == pytest.approx(21380, rel=1e-3)
    params = LinkBudgetParams(bandwidth_hz=400e6, tx_power_up_w=5.0, tx_power_down_w=5.0,
                              noise_psd_w_per_hz=10 ** -17.4, antenna_gain_linear=g0)
    snr = 5 * g0 * 1e-13 / (10 ** -17.4 * 4e8)
    assert snr == pytest.approx(6.713, rel=1e-3)
    r = rate_ka_band(params, 1e-13, "up")
    assert r == pytest.approx(4e8 * math.log2(1 + snr), rel=1e-12)
    assert r == pytest.approx(1.179e9, rel=1e-3)
    assert rate_ka_band(params, 0.0) == 0.0


@given(st.floats(1e-16, 1e-8), st.floats(1.01, 10.0))
def test_rates_increase_with_gain_and_power(g, factor):
    lo = c_band_link()
    hi = LinkBudgetParams(bandwidth_hz=lo.bandwidth_hz, tx_power_up_w=lo.tx_power_up_w * factor,
                          tx_power_down_w=lo.tx_power_down_w)
    assert rate_c_band(lo, g * factor) > rate_c_band(lo, g)
    assert rate_c_band(hi, g) > rate_c_band(lo, g)
    assert rate_ka_band(ka_band_link(), g * factor) > rate_ka_band(ka_band_link(), g)


def test_channel_us_example():
    p = LinkBudgetParams(bandwidth_hz=400e6, tx_power_up_w=5, tx_power_down_w=5, rician_factor=7.0,
                         pathloss_exp_los=2.0, pathloss_exp_nlos=2.0, wavelength_m=0.0107)
    d = 780e3
    h_l = math.sqrt(d ** -2) * cmath.exp(-2j * math.pi * d / 0.0107)
    expected = math.sqrt(7 / 8) * h_l + math.sqrt(d ** -2 / 8) * (1 + 0j)
    h = channel_us(p, d, 1 + 0j)
    assert abs(h - expected) <= 1e-12 * abs(expected)


def test_channel_us_limits():
    d = 1000.0
    nlos = 0.3 - 0.8j
    pure_los = LinkBudgetParams(bandwidth_hz=1, tx_power_up_w=1, tx_power_down_w=1, rician_factor=1e12)
    assert abs(channel_us(pure_los, d, nlos)) ** 2 == pytest.approx(d ** -2.0, rel=1e-5)
    pure_nlos = LinkBudgetParams(bandwidth_hz=1, tx_power_up_w=1, tx_power_down_w=1, rician_factor=0.0)
    assert channel_us(pure_nlos, d, nlos) == pytest.approx(math.sqrt(d ** -2.2) * nlos, rel=1e-12)
    with pytest.raises(ValueError):
        channel_us(pure_nlos, 0.0, nlos)


def test_realize_rates_shapes_and_determinism():
    sc = default_scenario()
    a = realize_rates(sc, 11)
    b = realize_rates(sc, 11)
    assert a.rate_ub.shape == (5, 2) and a.rate_bu.shape == (5, 2)
    assert a.rate_us.shape == (3, 2) and a.rate_su.shape == (3, 2)
    for name in ("rate_ub", "rate_bu", "rate_us", "rate_su"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    c = realize_rates(sc, 12)
    assert not np.array_equal(a.rate_ub, c.rate_ub)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rates_finite_nonnegative(seed):
    r = realize_rates(default_scenario(), seed)
    for arr in (r.rate_ub, r.rate_bu, r.rate_us, r.rate_su):
        assert np.all(np.isfinite(arr)) and np.all(arr >= 0)


def test_rayleigh_second_moment():
    h = complex_gaussian(np.random.default_rng(2024), 10**6)
    m = float(np.mean(np.abs(h) ** 2))
    assert 0.99 <= m <= 1.01
