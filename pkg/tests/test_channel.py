import itertools

import numpy as np
import pytest

from semvec.channel import (
    RadioConfig,
    RisPhaseConfig,
    cascade,
    cophase_indices,
    direct_gain,
    link_sinrs,
    phase_set,
    rician_los_gain,
    sinr_value,
    steering_vector,
)


def test_steering_angle_zero_all_ones():
    v = steering_vector(0.0, 5, 0.025, 0.05)
    np.testing.assert_allclose(v, np.ones(5))


def test_steering_unit_modulus_any_angle():
    rng = np.random.default_rng(0)
    for angle in rng.uniform(-np.pi / 2, np.pi / 2, size=20):
        v = steering_vector(angle, 8, 0.025, 0.05)
        np.testing.assert_allclose(np.abs(v), 1.0, atol=1e-12)


def test_steering_half_wavelength_broadside():
    lam = 0.0508
    v = steering_vector(np.pi / 2, 2, lam / 2, lam)
    np.testing.assert_allclose(v, [1.0, np.exp(-1j * np.pi)], atol=1e-12)
    np.testing.assert_allclose(v[1], -1.0, atol=1e-12)


def test_direct_gain_mean_power_matches_path_loss():
    # Monte-Carlo oracle: E|h|^2 = l * d^-eta, |h|^2 ~ Exp so std = mean
    rng = np.random.default_rng(42)
    n = 100_000
    l, d, eta = 1e-3, 10.0, 3.5
    h = direct_gain(np.full(n, d), eta, l, rng)
    power = np.abs(h) ** 2
    expect = l * d ** (-eta)
    assert expect == pytest.approx(3.1623e-7, rel=1e-3)
    assert abs(power.mean() - expect) < 3 * expect / np.sqrt(n)


def test_direct_gain_inverse_square_halves_twice():
    rng = np.random.default_rng(1)
    n = 200_000
    p1 = np.abs(direct_gain(np.full(n, 5.0), 2.0, 1e-2, rng)) ** 2
    p2 = np.abs(direct_gain(np.full(n, 10.0), 2.0, 1e-2, rng)) ** 2
    assert p1.mean() / p2.mean() == pytest.approx(4.0, rel=0.05)


def test_direct_gain_clamps_below_one_meter():
    rng1, rng2 = np.random.default_rng(3), np.random.default_rng(3)
    a = direct_gain(0.25, 3.5, 1e-3, rng1)
    b = direct_gain(1.0, 3.5, 1e-3, rng2)
    assert a == b


def test_rician_kappa_limits():
    s = steering_vector(0.3, 4, 0.025, 0.05)
    big = rician_los_gain(2.0, 2.2, 1e-3, 1e12, s)
    amp = np.sqrt(1e-3 * 2.0 ** -2.2)
    np.testing.assert_allclose(np.abs(big), amp, rtol=1e-6)
    zero = rician_los_gain(2.0, 2.2, 1e-3, 0.0, s)
    np.testing.assert_allclose(zero, 0.0)


def test_rician_unit_distance_plugin():
    s = steering_vector(0.0, 3, 0.025, 0.05)
    g = rician_los_gain(1.0, 2.2, 1.0, 1.0, s)
    np.testing.assert_allclose(np.abs(g), np.sqrt(0.5), atol=1e-12)


def test_cascade_ris_off_is_zero():
    n, q = 6, 2
    cfg = RisPhaseConfig(np.arange(n) % 4, np.zeros(n), q)
    rng = np.random.default_rng(5)
    h1 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    h2 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    assert cascade(h1, cfg, h2) == 0.0


def test_cascade_single_element_pi():
    cfg = RisPhaseConfig(np.array([2]), np.array([1.0]), 2)  # index 2 of 4 -> pi
    out = cascade(np.array([1.0 + 0j]), cfg, np.array([1.0 + 0j]))
    assert out == pytest.approx(-1.0)


def test_cascade_length_mismatch_raises():
    cfg = RisPhaseConfig.zeros(3, 2)
    with pytest.raises(ValueError):
        cascade(np.ones(3, complex), cfg, np.ones(4, complex))


def test_phase_config_validation():
    with pytest.raises(ValueError):
        RisPhaseConfig(np.array([4]), np.array([1.0]), 2)
    with pytest.raises(ValueError):
        RisPhaseConfig(np.array([0]), np.array([1.5]), 2)


def test_applied_phases_are_exact_members_of_phi():
    cfg = RisPhaseConfig(np.array([0, 1, 2, 3]), np.ones(4), 2)
    phi = phase_set(2)
    assert all(p in phi for p in cfg.phases)


def model_channel_draw(rng, n):
    """One channel draw at road-scenario geometry (the model's operating regime)."""
    lam = 0.0508
    d_kj = rng.uniform(30.0, 150.0)
    d_rj = rng.uniform(25.0, 60.0)
    d_kr = rng.uniform(30.0, 150.0)
    direct = complex(direct_gain(d_kj, 3.5, 1e-3, rng))
    a_rj = rng.uniform(-np.pi / 3, np.pi / 3)
    a_kr = rng.uniform(-np.pi / 3, np.pi / 3)
    h_rj = rician_los_gain(d_rj, 2.2, 1e-3, 3.0, steering_vector(a_rj, n, lam / 2, lam))
    h_kr = rician_los_gain(d_kr, 2.2, 1e-3, 3.0, steering_vector(a_kr, n, lam / 2, lam))
    return direct, h_rj, h_kr


def _exhaustive_best(direct, h_rj, h_kr, n, q):
    best = -1.0
    for combo in itertools.product(range(1 << q), repeat=n):
        cfg = RisPhaseConfig(np.array(combo), np.ones(n), q)
        v = abs(direct + cascade(h_rj, cfg, h_kr)) ** 2
        best = max(best, v)
    return best


def test_cophasing_attains_exhaustive_maximum():
    n, q = 4, 2
    rng = np.random.default_rng(77)
    for _ in range(8):
        direct, h_rj, h_kr = model_channel_draw(rng, n)
        idx = cophase_indices(direct, h_rj, h_kr, q)
        cfg = RisPhaseConfig(idx, np.ones(n), q)
        ours = abs(direct + cascade(h_rj, cfg, h_kr)) ** 2
        best = _exhaustive_best(direct, h_rj, h_kr, n, q)
        assert ours == pytest.approx(best, rel=1e-12)


def test_cophasing_refinement_never_hurts():
    n, q = 5, 2
    rng = np.random.default_rng(3)
    for _ in range(30):
        direct, h_rj, h_kr = model_channel_draw(rng, n)
        plain = cophase_indices(direct, h_rj, h_kr, q, refine=False)
        refined = cophase_indices(direct, h_rj, h_kr, q)
        v_plain = abs(direct + cascade(h_rj, RisPhaseConfig(plain, np.ones(n), q), h_kr)) ** 2
        v_ref = abs(direct + cascade(h_rj, RisPhaseConfig(refined, np.ones(n), q), h_kr)) ** 2
        assert v_ref >= v_plain - 1e-18


def test_cophasing_tie_breaks_to_smaller_phase():
    # target phase exactly midway between members 0 and pi/2
    q = 2
    direct = np.exp(1j * np.pi / 4)  # arg pi/4
    h_rj = np.array([1.0 + 0j])
    h_kr = np.array([1.0 + 0j])  # element target = pi/4, equidistant to 0 and pi/2
    idx = cophase_indices(direct, h_rj, h_kr, q)
    assert idx[0] == 0


def test_sinr_unity_at_matched_signal():
    p, noise = 0.2, 1.44e-10
    comp = np.sqrt(noise / p)
    assert sinr_value(p, comp, [], noise) == pytest.approx(1.0)


def test_sinr_interferer_strictly_decreases():
    p, noise = 0.2, 1.44e-10
    comp = 1e-5 + 0j
    clean = sinr_value(p, comp, [], noise)
    dirty = sinr_value(p, comp, [1e-5], noise)
    assert dirty < clean


def test_sinr_full_scale_spot_value():
    # p = 0.2 W, sigma^2 = 1.44e-10 W, |direct+cascade|^2 = 1e-9, no interference
    gamma = sinr_value(0.2, np.sqrt(1e-9), [], 1.44e-10)
    assert gamma == pytest.approx(1.3889, rel=1e-4)


def test_sinr_monotone_in_power_and_noise():
    comp = 3e-5 + 0j
    interf = [2e-5]
    g1 = sinr_value(0.1, comp, interf, 1.44e-10)
    g2 = sinr_value(0.2, comp, interf, 1.44e-10)
    assert g2 > g1
    g3 = sinr_value(0.1, comp, interf, 2.88e-10)
    assert g3 < g1


def test_link_sinrs_matches_scalar_definition():
    rng = np.random.default_rng(8)
    k = 4
    direct = (rng.standard_normal((k, 2)) + 1j * rng.standard_normal((k, 2))) * 1e-5
    casc = np.zeros((k, 2), complex)
    rb = np.arange(2 * k).reshape(k, 2) % 3
    active = np.ones((k, 2), dtype=bool)
    active[2] = False
    p, noise = 0.2, 1.44e-10
    got = link_sinrs(direct, casc, rb, active, p, noise)
    for i in range(k):
        for t in range(2):
            others = [
                direct[a, b]
                for a in range(k)
                for b in range(2)
                if (a, b) != (i, t) and active[a, b] and rb[a, b] == rb[i, t]
            ]
            want = sinr_value(p, direct[i, t] + casc[i, t], others, noise)
            assert got[i, t] == pytest.approx(want, rel=1e-12)


def test_ris_off_reduces_to_no_ris_bit_for_bit():
    rng = np.random.default_rng(9)
    k = 3
    direct = (rng.standard_normal((k, 2)) + 1j * rng.standard_normal((k, 2))) * 1e-5
    rb = np.zeros((k, 2), dtype=int)
    active = np.ones((k, 2), dtype=bool)
    off = link_sinrs(direct, np.zeros((k, 2), complex), rb, active, 0.2, 1.44e-10)
    base = link_sinrs(direct, np.zeros((k, 2), complex), rb, active, 0.2, 1.44e-10)
    assert np.array_equal(off, base)


def test_radio_config_validation():
    with pytest.raises(ValueError):
        RadioConfig(ref_loss=0.0)
    with pytest.raises(ValueError):
        RadioConfig(path_exp_direct=1.5)
    with pytest.raises(ValueError):
        RadioConfig(tx_power=-0.1)
    cfg = RadioConfig()
    assert cfg.wavelength == pytest.approx(0.0508, rel=1e-2)
    assert cfg.spacing == pytest.approx(cfg.wavelength / 2)
