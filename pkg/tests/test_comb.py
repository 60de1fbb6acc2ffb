"""Modal comb simulator: fixed points, invariances, integrator accuracy,
spectral metrics."""

import numpy as np
import pytest

from dualwg.comb import (CombError, CombParams, CombState, InstabilityError,
                         SpectralMap, TruncationError, classify_spectrum,
                         comb_bandwidth, dispersion_rates, rf_detuning_sweep,
                         simulate_comb, single_site_state)

SMALL = dict(mode_count=33, dt_ns=0.01)


def test_params_validation():
    with pytest.raises(CombError, match="odd"):
        CombParams(mode_count=8)
    with pytest.raises(CombError, match="> 0"):
        CombParams(gain=0.0)
    with pytest.raises(CombError, match=">= 0"):
        CombParams(mod_index=-1.0)
    with pytest.raises(CombError, match="dt"):
        CombParams(dt_ns=0.0)


def test_sites_and_spacing():
    p = CombParams(mode_count=257, f_rep_ghz=15.691)
    assert p.sites[0] == -128 and p.sites[-1] == 128
    assert p.line_spacing_cm == pytest.approx(0.5234, abs=2e-4)
    assert p.detuning_ghz == pytest.approx(0.0)


def test_single_mode_fixed_point():
    # without modulation a single lasing mode saturates at P_sat(g0/a - 1)
    p = CombParams(mod_index=0.0, gain=2.0, loss=1.0, sat_power=1.0, **SMALL)
    state = simulate_comb(p, t_end_ns=200.0, initial=single_site_state(p))
    assert state.power == pytest.approx(1.0, rel=1e-3)
    assert state.converged
    assert classify_spectrum(state.spectrum()) == "monochromatic"


def test_below_threshold_decays():
    p = CombParams(mod_index=0.0, gain=0.5, loss=1.0, **SMALL)
    state = simulate_comb(p, t_end_ns=100.0, initial=single_site_state(p))
    assert state.power < 1e-10


def test_gauge_invariance_global_phase():
    # multiplying the initial state by a global phase leaves |a_n| unchanged
    p = CombParams(mod_index=0.5, d3=1e-3, **SMALL)
    init = single_site_state(p, power=0.5)
    rot = CombState(a=init.a * np.exp(0.7j), b=init.b * np.exp(0.7j),
                    time_ns=0.0, converged=False)
    s1 = simulate_comb(p, t_end_ns=20.0, initial=init)
    s2 = simulate_comb(p, t_end_ns=20.0, initial=rot)
    assert np.allclose(np.abs(s1.a), np.abs(s2.a), atol=1e-12)


def test_lattice_parity_symmetry():
    # with d3 = 0 and zero detuning the dynamics are n -> -n symmetric, so a
    # site-symmetric initial state keeps a mirror-symmetric spectrum
    p = CombParams(mod_index=0.5, d2=5e-3, d3=0.0, **SMALL)
    s = simulate_comb(p, t_end_ns=50.0, initial=single_site_state(p, 0.5))
    spec = s.spectrum()
    assert np.allclose(spec, spec[::-1], rtol=1e-8, atol=1e-14)


def test_d3_sign_mirrors_spectrum():
    p_plus = CombParams(mod_index=0.5, d3=5e-3, **SMALL)
    p_minus = CombParams(mod_index=0.5, d3=-5e-3, **SMALL)
    init = single_site_state(p_plus, 0.5)
    s_plus = simulate_comb(p_plus, t_end_ns=50.0, initial=init)
    s_minus = simulate_comb(p_minus, t_end_ns=50.0, initial=init)
    assert np.allclose(s_plus.spectrum(), s_minus.spectrum()[::-1],
                       rtol=1e-8, atol=1e-14)


def test_rk4_step_halving_convergence():
    # smooth short run: halving dt must shrink the error by about 2^4
    base = dict(mode_count=33, mod_index=0.5, d3=1e-3, gain=2.0, loss=1.0)
    init = single_site_state(CombParams(**base), 0.5)

    def final(dt):
        p = CombParams(dt_ns=dt, **base)
        return simulate_comb(p, t_end_ns=5.0, initial=init).a

    ref = final(0.00125)
    e1 = np.abs(final(0.01) - ref).max()
    e2 = np.abs(final(0.005) - ref).max()
    assert e1 / e2 >= 16.0 * (1 - 0.25)   # allow reference contamination


def test_instability_detected():
    p = CombParams(mode_count=9, mod_index=0.0, gain=80.0, loss=1.0,
                   sat_power=1e-14, noise_floor=1e-2, dt_ns=0.5)
    with pytest.raises((InstabilityError, TruncationError)):
        simulate_comb(p, t_end_ns=500.0)


def test_truncation_guard():
    # a lattice far too small for the modulation-driven walk spills power
    # into the edge sites
    p = CombParams(mode_count=11, mod_index=5.0, gain=2.0, loss=1.0)
    with pytest.raises(TruncationError, match="edge sites"):
        simulate_comb(p, t_end_ns=100.0)


def test_backscatter_feeds_counter_direction():
    quiet = CombParams(mod_index=0.0, backscatter=0.0, **SMALL)
    noisy = CombParams(mod_index=0.0, backscatter=0.3, **SMALL)
    init = single_site_state(quiet, 0.5)
    s0 = simulate_comb(quiet, t_end_ns=50.0, initial=init)
    s1 = simulate_comb(noisy, t_end_ns=50.0, initial=init)
    assert np.sum(np.abs(s0.b) ** 2) == pytest.approx(0.0, abs=1e-20)
    assert np.sum(np.abs(s1.b) ** 2) > 1e-6


def test_seeded_noise_reproducible():
    p = CombParams(mod_index=0.5, noise_rate=1e-6, **SMALL)
    init = single_site_state(p, 0.5)
    s1 = simulate_comb(p, t_end_ns=10.0, seed=42, initial=init)
    s2 = simulate_comb(p, t_end_ns=10.0, seed=42, initial=init)
    s3 = simulate_comb(p, t_end_ns=10.0, seed=43, initial=init)
    assert np.array_equal(s1.a, s2.a)
    assert not np.array_equal(s1.a, s3.a)


# ---------------------------------------------------------------- metrics

def synthetic_comb(n_lines, n_sites=257, floor=1e-9):
    spec = np.full(n_sites, floor)
    c = n_sites // 2
    lo = c - (n_lines - 1) // 2
    spec[lo:lo + n_lines] = 1.0
    return spec


def test_comb_bandwidth_span():
    spec = synthetic_comb(58)
    bw = comb_bandwidth(spec, 0.5234)
    assert bw == pytest.approx(57 * 0.5234)


def test_comb_bandwidth_floor():
    spec = synthetic_comb(5)
    spec[10] = 1e-4   # below the default -30 dB floor
    assert comb_bandwidth(spec, 1.0) == pytest.approx(4.0)
    assert comb_bandwidth(spec, 1.0, floor_db=-50.0) > 4.0


def test_comb_bandwidth_validation():
    with pytest.raises(CombError, match="empty"):
        comb_bandwidth(np.array([]), 1.0)
    with pytest.raises(CombError, match="all-zero"):
        comb_bandwidth(np.zeros(5), 1.0)
    with pytest.raises(CombError, match="floor_db"):
        comb_bandwidth(np.ones(5), 1.0, floor_db=1.0)


def test_classify_monochromatic():
    spec = np.full(31, 1e-6)
    spec[15] = 1.0
    assert classify_spectrum(spec) == "monochromatic"


def test_classify_comb():
    x = np.arange(31) - 15.0
    spec = np.exp(-((x / 6.0) ** 2))
    assert classify_spectrum(spec) == "comb"


def test_classify_irregular_gap():
    spec = np.full(31, 1e-9)
    spec[10] = 1.0
    spec[20] = 0.8      # two strong lines with a gap
    assert classify_spectrum(spec) == "irregular"


def test_classify_irregular_nonmonotone_envelope():
    x = np.arange(31) - 15.0
    spec = np.exp(-((x / 6.0) ** 2))
    spec[12] = 0.05     # a deep notch inside the comb
    assert classify_spectrum(spec) == "irregular"


# ------------------------------------------------------------------ sweeps

def test_sweep_must_bracket_f_rep():
    p = CombParams(**SMALL)
    with pytest.raises(CombError, match="bracket"):
        rf_detuning_sweep(p, p.f_rep_ghz + 0.1, p.f_rep_ghz + 0.2, 3,
                          t_end_ns=1.0)


def test_sweep_shapes_and_direction():
    p = CombParams(mod_index=0.5, **SMALL)
    up = rf_detuning_sweep(p, p.f_rep_ghz - 0.05, p.f_rep_ghz + 0.05, 5,
                           t_end_ns=5.0)
    down = rf_detuning_sweep(p, p.f_rep_ghz + 0.05, p.f_rep_ghz - 0.05, 5,
                             t_end_ns=5.0)
    assert up.intensity.shape == (5, p.mode_count)
    assert np.all(np.diff(up.sweep_axis) > 0)
    assert np.all(np.diff(down.sweep_axis) < 0)
    assert up.intensity.max() == pytest.approx(1.0)   # normalized


def test_spectral_map_validation():
    with pytest.raises(CombError, match=">= 0"):
        SpectralMap(np.array([1.0, 2.0]), np.array([0.0, 1.0]),
                    np.array([[0.1, -0.2], [0.3, 0.4]]))
    with pytest.raises(CombError, match="monotone"):
        SpectralMap(np.array([1.0, 1.0]), np.array([0.0, 1.0]),
                    np.array([[0.1, 0.2], [0.3, 0.4]]))


# ------------------------------------------------- dispersion-rate conversion

def test_dispersion_rates_units():
    # beta2 = 1 fs^2/mm at f_rep = 15.691 GHz, 5.43 mm roundtrip:
    # D2 = -(2 pi)^2 f^3 L beta2 [rad/s] -> x 1e-9 rad/ns
    f = 15.691e9
    length = 5.43e-3
    d2, d3 = dispersion_rates(1.0, 0.0, 15.691, 5.43)
    expected = -(2 * np.pi) ** 2 * f ** 3 * length * 1e-27 * 1e-9
    assert d2 == pytest.approx(expected, rel=1e-12)
    assert d3 == 0.0


def test_dispersion_rates_linear_in_inputs():
    d2a, d3a = dispersion_rates(100.0, 2000.0, 10.0, 6.0)
    d2b, d3b = dispersion_rates(200.0, 4000.0, 10.0, 6.0)
    assert d2b == pytest.approx(2 * d2a)
    assert d3b == pytest.approx(2 * d3a)


def test_dispersion_rates_validation():
    with pytest.raises(CombError):
        dispersion_rates(1.0, 1.0, -1.0, 5.0)
