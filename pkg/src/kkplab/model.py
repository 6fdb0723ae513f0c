"""Closed-form line solitons of the scaled K-KP equation.

    u_t + u u_x + beta u_xxx + u_xxxxx = sigma dx^{-1} u_yy

A line wave u = U(xi), xi = x + mu*y - nu*t, of sech type has the profile

    U(xi) = p - q sech^4(r xi / 2),   r = sqrt(|beta|/13),
    q = 105 r^4,   p = sigma mu^2 + nu + 36 r^4,

which exists only for beta < 0.  Parameters may be given as floats or as
``fractions.Fraction``; in the latter case every derived quantity that is
rational (kappa, p, q, r^4) is kept exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np
from numpy.polynomial import polynomial as P

Real = Union[float, int, Fraction]

MAX_DERIVATIVE_ORDER = 6


class NoSolitonError(ValueError):
    """Raised when a sech-type soliton is requested for beta >= 0."""


def _exact_sqrt(x: Real) -> Real:
    """Square root that stays rational when *x* is a rational perfect square."""
    if isinstance(x, (Fraction, int)):
        x = Fraction(x)
        rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if rn * rn == x.numerator and rd * rd == x.denominator:
            return Fraction(rn, rd)
    return math.sqrt(x)


def dispersion_square(beta: Real) -> Real:
    """(6 beta / 13)^2, the background offset 36 r^4 of the soliton family."""
    if isinstance(beta, (Fraction, int)):
        return Fraction(36, 169) * Fraction(beta) ** 2
    return 36.0 * beta * beta / 169.0


@dataclass(frozen=True)
class ModelParams:
    beta: Real
    sigma: int = 1

    def __post_init__(self):
        if self.beta == 0:
            raise ValueError("beta must be nonzero")
        if self.sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")

    def require_soliton(self):
        if not self.beta < 0:
            raise NoSolitonError(
                "no sech-type soliton exists: the sech family requires beta < 0 "
                f"(got beta={self.beta})")


@dataclass(frozen=True)
class LineWave:
    """One line wave xi = x + mu*y - nu*t together with its derived constants."""

    params: ModelParams
    mu: Real
    nu: Real
    kappa: Real = field(init=False)
    r: Real = field(init=False)
    r4: Real = field(init=False)
    q: Real = field(init=False)
    p: Real = field(init=False)
    c: Real = field(init=False)
    theta: float = field(init=False)

    def __post_init__(self):
        beta, sigma = self.params.beta, self.params.sigma
        r4 = dispersion_square(beta) / 36
        kappa = sigma * self.mu ** 2 + self.nu
        c, theta = speed_and_direction(self.mu, self.nu)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "r4", r4)
        object.__setattr__(self, "r", _exact_sqrt(_exact_sqrt(r4)))
        object.__setattr__(self, "q", 105 * r4)
        object.__setattr__(self, "p", kappa + 36 * r4)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "theta", theta)

    @property
    def beta(self):
        return self.params.beta

    @property
    def sigma(self):
        return self.params.sigma

    @classmethod
    def zero_background(cls, params: ModelParams, mu: Real = 0) -> "LineWave":
        return cls(params, mu, zero_background_nu(params, mu))

    @classmethod
    def from_kappa(cls, params: ModelParams, kappa: Real, mu: Real = 0) -> "LineWave":
        return cls(params, mu, kappa - params.sigma * mu ** 2)

    @classmethod
    def from_speed_direction(cls, params: ModelParams, c: float, theta: float) -> "LineWave":
        if not abs(theta) < math.pi / 2:
            raise ValueError("direction angle must satisfy |theta| < pi/2")
        return cls(params, math.tan(theta), c / abs(math.cos(theta)))


def speed_and_direction(mu: Real, nu: Real) -> tuple[Real, float]:
    """Speed c = nu / sqrt(1 + mu^2) in the (x, y) plane and angle arctan(mu)."""
    root = _exact_sqrt(1 + mu ** 2)
    c = nu / root
    return c, math.atan(mu)


def zero_background_nu(params: ModelParams, mu: Real) -> Real:
    """The nu for which the line wave with slope *mu* has background p = 0."""
    params.require_soliton()
    return -params.sigma * mu ** 2 - dispersion_square(params.beta)


def c_of_theta(params: ModelParams, theta):
    """Speed of the zero-background wave travelling at angle *theta*.

    c(theta) = -(6 beta/13)^2 |cos theta| - sigma sin^2 theta / |cos theta|
    """
    params.require_soliton()
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) >= np.pi / 2):
        raise ValueError("c(theta) is defined only for |theta| < pi/2")
    d = float(dispersion_square(params.beta))
    cos = np.abs(np.cos(theta))
    out = -d * cos - params.sigma * np.sin(theta) ** 2 / cos
    return float(out) if out.ndim == 0 else out


def c_of_theta_extremum(params: ModelParams) -> tuple[float, float] | None:
    """Interior maximum (theta, c_max) of c(theta) for sigma = +1, if it exists.

    Only present when (6 beta/13)^2 > 2; otherwise c decreases monotonically
    in |theta| and None is returned.  For sigma = -1 there is no extremum.
    """
    params.require_soliton()
    d = float(dispersion_square(params.beta))
    if params.sigma != 1 or d <= 2:
        return None
    return math.atan(math.sqrt(d - 2)), -2.0 * math.sqrt(d - 1)


def stationary_angle(params: ModelParams) -> float | None:
    """Angle at which the zero-background wave is stationary (sigma = -1 only)."""
    params.require_soliton()
    if params.sigma != -1:
        return None
    return math.atan(6 * abs(float(params.beta)) / 13)


# Profile and its derivatives.
#
# With a = r/2, T = tanh(a xi) and s = sech^2(a xi) = 1 - T^2, one has
# d/dxi F(T) = a (1 - T^2) F'(T).  The depression -q s^2 is a polynomial in T;
# every derivative of it keeps a factor s, so U^(k) = -q a^k s Q_k(T) with
# integer polynomials Q_k.  Evaluating s directly keeps the tails accurate.

_ONE_MINUS_T2 = np.array([1.0, 0.0, -1.0])


def _derivative_polys(max_order: int) -> list[np.ndarray]:
    polys = [P.polymul(_ONE_MINUS_T2, _ONE_MINUS_T2)]
    for _ in range(max_order):
        polys.append(P.polymul(_ONE_MINUS_T2, P.polyder(polys[-1])))
    quotients = [np.array([1.0, 0.0, -1.0])]
    for poly in polys[1:]:
        quot, rem = P.polydiv(poly, _ONE_MINUS_T2)
        assert np.allclose(rem, 0.0)
        quotients.append(quot)
    return quotients


_QUOTIENTS = _derivative_polys(MAX_DERIVATIVE_ORDER)


def _tanh_sech2(z):
    e = np.exp(-2.0 * np.abs(z))
    tanh = np.sign(z) * (1.0 - e) / (1.0 + e)
    sech2 = 4.0 * e / (1.0 + e) ** 2
    return tanh, sech2


def profile_derivative(params: ModelParams, wave: LineWave, order: int, xi):
    """Exact *order*-th xi-derivative of the soliton profile U (0 <= order <= 6)."""
    params.require_soliton()
    if not 0 <= order <= MAX_DERIVATIVE_ORDER:
        raise ValueError(f"unsupported derivative order {order} (max {MAX_DERIVATIVE_ORDER})")
    xi = np.asarray(xi, dtype=float)
    a = float(wave.r) / 2.0
    tanh, sech2 = _tanh_sech2(a * xi)
    if order == 0:
        out = float(wave.p) - float(wave.q) * sech2 * sech2
    else:
        out = -float(wave.q) * a ** order * sech2 * P.polyval(tanh, _QUOTIENTS[order])
    return float(out) if out.ndim == 0 else out


def soliton_profile(params: ModelParams, wave: LineWave, xi):
    """U(xi) = p - q sech^4(r xi / 2)."""
    return profile_derivative(params, wave, 0, xi)


def profile_jet(params: ModelParams, wave: LineWave, xi, max_order: int = MAX_DERIVATIVE_ORDER):
    """List [U, U', ..., U^(max_order)] evaluated at *xi*."""
    return [profile_derivative(params, wave, k, xi) for k in range(max_order + 1)]


def potential_profile(params: ModelParams, wave: LineWave, xi):
    """Antiderivative V of the profile with V(0) = 0.

    V(xi) = p xi - (2q/r) (tanh(r xi/2) - tanh^3(r xi/2)/3)
    """
    params.require_soliton()
    xi = np.asarray(xi, dtype=float)
    r = float(wave.r)
    tanh = np.tanh(0.5 * r * xi)
    out = float(wave.p) * xi - (2.0 * float(wave.q) / r) * (tanh - tanh ** 3 / 3.0)
    return float(out) if out.ndim == 0 else out


def tail_bound(wave: LineWave, xi):
    """Upper bound 16 q exp(-2 r |xi|) on |U(xi) - p|."""
    return 16.0 * float(wave.q) * np.exp(-2.0 * float(wave.r) * np.abs(np.asarray(xi, dtype=float)))


def tw_ode_residual(params: ModelParams, wave: LineWave, xi):
    """Residual of U U' - kappa U' + beta U''' + U^(5) along the profile."""
    U = profile_jet(params, wave, xi, 5)
    beta, kappa = float(params.beta), float(wave.kappa)
    return U[0] * U[1] - kappa * U[1] + beta * U[3] + U[5]
