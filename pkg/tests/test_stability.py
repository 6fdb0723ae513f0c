import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from kkplab.ansatz import fourier_symbol
from kkplab.diagnostics.stability import (SECH4_MASS, bilinear_form, sech4_grid,
                                          stability_integral)


def sech4_transform(k):
    if k == 0:
        return 4.0 / 3.0
    return np.pi * k * (k * k + 4.0) / (6.0 * np.sinh(0.5 * np.pi * k))


def oracle_I(speed):
    val, _ = quad(lambda k: sech4_transform(k) ** 2 / float(fourier_symbol(k, speed)),
                  0.0, 60.0, limit=400, epsabs=1e-13)
    return val / np.pi


def test_regularized_integral_matches_oracle():
    speed = 12.0 / 35.0
    rep = stability_integral(4096, 100.0, speed)
    assert rep.I == pytest.approx(oracle_I(speed), rel=1e-10)
    assert rep.I == pytest.approx(2.34994, rel=1e-5)
    assert not rep.regularized


def test_regularized_integral_independent_of_box():
    a = stability_integral(4096, 100.0, 12.0 / 35.0).I
    b = stability_integral(8192, 200.0, 12.0 / 35.0).I
    assert a == pytest.approx(b, rel=1e-12)


def test_unregularized_integral_grows_with_box():
    reps = [stability_integral(4096 * m, 100.0 * m) for m in (1, 2, 4)]
    assert all(r.regularized for r in reps)
    assert all(r.projected_mean == pytest.approx(SECH4_MASS, rel=1e-12) for r in reps)
    I = [r.I for r in reps]
    assert I[0] > 0 and I[1] > 1.9 * I[0] and I[2] > 1.9 * I[1]
    assert any("projected" in ln for ln in reps[0].lines())


def test_grid_doubling_converges():
    a = stability_integral(2048, 100.0).I
    b = stability_integral(4096, 100.0).I
    assert a == pytest.approx(b, rel=1e-12)


def test_bilinear_form_sign_and_symmetry():
    xi, U = sech4_grid(1024, 60.0)
    V = np.exp(-xi ** 2)
    assert bilinear_form(U, -U, 60.0, 0.1) == pytest.approx(-bilinear_form(U, U, 60.0, 0.1))
    assert bilinear_form(U, V, 60.0, 0.1) == pytest.approx(bilinear_form(V, U, 60.0, 0.1), rel=1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.one_of(st.just(0.0), st.floats(1e-6, 2.0)))
def test_form_is_nonnegative(seed, speed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(64)
    assert bilinear_form(a, a, 20.0, speed) >= -1e-12


def test_evenness():
    xi, U = sech4_grid(1024, 60.0)
    odd = xi * U
    assert abs(bilinear_form(U, odd, 60.0, 0.2)) < 1e-12


def test_validation():
    with pytest.raises(ValueError):
        stability_integral(7)
    with pytest.raises(ValueError):
        stability_integral(64, -1.0)
    with pytest.raises(ValueError):
        stability_integral(64, 10.0, -0.1)
