import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from kkplab.model import (LineWave, ModelParams, NoSolitonError, c_of_theta, c_of_theta_extremum,
                          dispersion_square, potential_profile, profile_derivative, profile_jet,
                          soliton_profile, speed_and_direction, stationary_angle, tail_bound,
                          tw_ode_residual, zero_background_nu)

neg_fracs = st.fractions(min_value=-40, max_value=Fraction(-1, 50), max_denominator=60)
fracs = st.fractions(min_value=-10, max_value=10, max_denominator=60)


def test_params_validation():
    with pytest.raises(ValueError, match="beta must be nonzero"):
        ModelParams(0)
    with pytest.raises(ValueError, match="sigma must be"):
        ModelParams(-1, 2)
    with pytest.raises(NoSolitonError):
        LineWave.zero_background(ModelParams(1.0))


def test_unit_scale_member():
    # beta = -13 gives r = 1, q = 105, and kappa = 0 puts the background at 36.
    w = LineWave.from_kappa(ModelParams(-13), 0)
    assert (w.r, w.q, w.p) == (1, 105, 36)
    assert soliton_profile(w.params, w, 0.0) == -69.0


def test_known_member_is_exact():
    w = LineWave(ModelParams(Fraction(-1)), 0, Fraction(36, 169))
    assert w.p == Fraction(72, 169)
    assert w.c == Fraction(36, 169)
    assert isinstance(w.p, Fraction) and isinstance(w.c, Fraction)


@given(neg_fracs, fracs, st.sampled_from([1, -1]))
def test_zero_background_exact_for_rationals(beta, mu, sigma):
    w = LineWave.zero_background(ModelParams(beta, sigma), mu)
    assert w.p == 0
    assert w.q == 105 * dispersion_square(beta) / 36


@given(neg_fracs, fracs, fracs, st.sampled_from([1, -1]))
def test_background_formula(beta, mu, kappa, sigma):
    w = LineWave.from_kappa(ModelParams(beta, sigma), kappa, mu)
    assert w.kappa == kappa
    assert w.p == kappa + Fraction(36, 169) * beta ** 2


def test_speed_direction_round_trip():
    p = ModelParams(-2.0, 1)
    w = LineWave.from_speed_direction(p, -0.7, 0.4)
    c, theta = speed_and_direction(w.mu, w.nu)
    assert c == pytest.approx(-0.7, rel=1e-14)
    assert theta == pytest.approx(0.4, rel=1e-14)
    with pytest.raises(ValueError):
        LineWave.from_speed_direction(p, 1.0, math.pi / 2)


@given(st.floats(-30, -0.05), st.floats(-1.5, 1.5), st.sampled_from([1, -1]))
def test_c_of_theta_matches_zero_background_wave(beta, theta, sigma):
    p = ModelParams(beta, sigma)
    w = LineWave.zero_background(p, math.tan(theta))
    assert c_of_theta(p, theta) == pytest.approx(float(w.c), rel=1e-10, abs=1e-12)


def test_c_of_theta_domain():
    with pytest.raises(ValueError):
        c_of_theta(ModelParams(-1.0), math.pi / 2)


def test_kinematic_maximum_d4():
    beta = -13.0 / 3.0  # (6 beta/13)^2 = 4
    theta, cmax = c_of_theta_extremum(ModelParams(beta, 1))
    assert abs(cmax + 2 * math.sqrt(3)) <= 1e-12
    assert abs(theta - math.atan(math.sqrt(2))) <= 1e-12


@given(st.floats(2.05, 30.0), st.floats(-1.5, 1.5))
def test_extremum_is_a_maximum(d, theta):
    p = ModelParams(-13 * math.sqrt(d) / 6, 1)
    th, cmax = c_of_theta_extremum(p)
    assert c_of_theta(p, theta) <= cmax + 1e-9 * abs(cmax)
    assert c_of_theta(p, th) == pytest.approx(cmax, rel=1e-12)


def test_no_interior_maximum_for_small_d():
    p = ModelParams(-13.0 / 6.0, 1)  # d = 1
    assert c_of_theta_extremum(p) is None
    th = np.linspace(0, 1.5, 200)
    assert np.all(np.diff(c_of_theta(p, th)) < 0)


@given(st.floats(-30, -0.05))
def test_stationary_angle_root(beta):
    p = ModelParams(beta, -1)
    th = stationary_angle(p)
    assert th == pytest.approx(math.atan(6 * abs(beta) / 13))
    assert abs(c_of_theta(p, th)) <= 1e-10 * max(1.0, dispersion_square(beta))
    assert stationary_angle(ModelParams(beta, 1)) is None


def test_derivatives_against_finite_differences():
    p = ModelParams(-3.0, 1)
    w = LineWave.from_kappa(p, 0.7, 0.3)
    xi = np.linspace(-9, 9, 41)
    h = 1e-3
    for k in range(1, 7):
        fd = (profile_derivative(p, w, k - 1, xi + h) - profile_derivative(p, w, k - 1, xi - h)) / (2 * h)
        scale = np.max(np.abs(profile_derivative(p, w, k, xi)))
        assert np.max(np.abs(fd - profile_derivative(p, w, k, xi))) <= 1e-5 * scale
    with pytest.raises(ValueError):
        profile_derivative(p, w, 7, 0.0)


def test_potential_is_antiderivative():
    p = ModelParams(-1.0, 1)
    w = LineWave.zero_background(p)
    for b in (-3.0, 2.0, 17.0):
        val, _ = quad(lambda s: soliton_profile(p, w, s), 0.0, b, epsabs=1e-13)
        assert potential_profile(p, w, b) == pytest.approx(val, abs=1e-11)
    assert potential_profile(p, w, 0.0) == 0.0


@given(st.floats(-30, -0.05), st.floats(-3, 3), st.floats(-2, 2))
def test_travelling_wave_ode(beta, kappa, mu):
    p = ModelParams(beta, 1)
    w = LineWave.from_kappa(p, kappa, mu)
    xi = np.linspace(-60, 60, 301) / float(w.r)
    scale = float(w.q) ** 2 * float(w.r) + abs(kappa) * float(w.q) * float(w.r)
    assert np.max(np.abs(tw_ode_residual(p, w, xi))) <= 1e-12 * scale


def test_tail_accuracy_and_bound():
    p = ModelParams(-1.0, 1)
    w = LineWave.zero_background(p)
    xi = np.array([50.0, 100.0, 200.0])
    u = soliton_profile(p, w, xi)
    # relative accuracy in the tail, against an independent evaluation
    exact = -float(w.q) / np.cosh(0.5 * float(w.r) * xi) ** 4
    assert np.allclose(u, exact, rtol=1e-12, atol=0)
    assert np.all(np.abs(u) <= tail_bound(w, xi))


def test_jet_and_scalar_return_types():
    p = ModelParams(-1.0)
    w = LineWave.zero_background(p)
    assert isinstance(soliton_profile(p, w, 0.5), float)
    assert len(profile_jet(p, w, np.zeros(3), 4)) == 5


def test_zero_background_nu_float_rounding():
    p = ModelParams(-1.0, 1)
    w = LineWave.zero_background(p, 0.3)
    assert w.nu == zero_background_nu(p, 0.3)
    assert abs(w.p) <= 1e-15
