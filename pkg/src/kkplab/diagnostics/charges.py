"""Vanishing topological charges: loop integrals around rectangles.

    Q1 = oint A dy + sigma dx^{-1}u_y dx,
    Q2 = oint y A dy + sigma (y dx^{-1}u_y - dx^{-1}u) dx,
    A  = beta u_xx + u_xxxx + u^2/2 + dx^{-1}u_t.

By Green's theorem each loop integral is the area integral of (a multiple
of) the equation, so both vanish for every rectangle.  Rectangles are
traversed counter-clockwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kkplab.diagnostics.closed_form import LineSolitonField
from kkplab.diagnostics.integrals import dx_inv_hat
from kkplab.model import LineWave, ModelParams
from kkplab.spectral import Grid2D, SpectralState, ifft2, nonlinear_rhs, linear_symbol

CHARGES = (1, 2)


@dataclass(frozen=True)
class Rectangle:
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("rectangle needs x0 < x1 and y0 < y1")

    def shrunk(self, fraction: float) -> "Rectangle":
        """Concentric rectangle with sides scaled by 1 - fraction."""
        cx, cy = 0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1)
        hx, hy = 0.5 * (self.x1 - self.x0) * (1 - fraction), 0.5 * (self.y1 - self.y0) * (1 - fraction)
        return Rectangle(cx - hx, cx + hx, cy - hy, cy + hy)


def _check_id(charge_id):
    if charge_id not in CHARGES:
        raise ValueError(f"charge_id must be 1 or 2 (got {charge_id})")


def _loop(charge_id, sigma, rect, dy_side, dx_side):
    """Assemble the loop from side integrals.

    dy_side(x, weight) = int_{y0}^{y1} weight(y) A(x, y) dy, and
    dx_side(y) = int_{x0}^{x1} B(x, y) dx for the charge's dx integrand B.
    """
    weight = (lambda y: 1.0 + 0.0 * y) if charge_id == 1 else (lambda y: y)
    return (dx_side(rect.y0) + dy_side(rect.x1, weight)
            - dx_side(rect.y1) - dy_side(rect.x0, weight))


def _trapezoid(values, a, b):
    return float(np.trapezoid(values, dx=(b - a) / (len(values) - 1)))


def closed_form_charge(charge_id: int, params: ModelParams, wave: LineWave, rect: Rectangle,
                       t: float = 0.0, n: int = 200_001, x0: float = 0.0) -> float:
    """Charge of the closed-form line soliton on the plane, composite trapezoid
    with *n* nodes per side."""
    _check_id(charge_id)
    params.require_soliton()
    fld = LineSolitonField(params, wave, x0)
    beta, sigma = float(params.beta), params.sigma

    def a_on(x, y):
        U = fld.profile(fld.xi(x, y, t), 4)
        _, dxinv_ut, _ = fld.nonlocal_terms(x, y, t)
        return beta * U[2] + U[4] + 0.5 * U[0] ** 2 + dxinv_ut

    def b_on(x, y):
        dxinv_u, _, dxinv_uy = fld.nonlocal_terms(x, y, t)
        if charge_id == 1:
            return sigma * dxinv_uy
        return sigma * (y * dxinv_uy - dxinv_u)

    ys = np.linspace(rect.y0, rect.y1, n)
    xs = np.linspace(rect.x0, rect.x1, n)
    return _loop(charge_id, sigma, rect,
                 lambda x, w: _trapezoid(w(ys) * a_on(x, ys), rect.y0, rect.y1),
                 lambda y: _trapezoid(b_on(xs, y), rect.x0, rect.x1))


# Spectral (state) version

def _segment_integral(values: np.ndarray, origin: float, period: float, a: float, b: float) -> float:
    """Exact integral over [a, b] of the trigonometric interpolant of
    periodic samples values[j] at origin + j*period/n."""
    n = len(values)
    c = np.fft.fft(values) / n
    k = 2 * np.pi * np.fft.fftfreq(n, d=period / n)
    if n % 2 == 0:
        c[n // 2] = 0.0
    nz = k != 0
    ea = np.exp(1j * k[nz] * (a - origin))
    eb = np.exp(1j * k[nz] * (b - origin))
    return float((c[0] * (b - a) + np.sum(c[nz] * (eb - ea) / (1j * k[nz]))).real)


def _grid_index(coords: np.ndarray, value: float, what: str) -> int:
    i = int(np.argmin(np.abs(coords - value)))
    if abs(coords[i] - value) > 1e-9 * max(1.0, abs(value)):
        raise ValueError(f"rectangle {what}={value} is not on a grid line")
    return i


def state_charge(charge_id: int, state: SpectralState, params: ModelParams, rect: Rectangle) -> float:
    """Charge of a spectral state; rectangle edges must lie on grid lines
    strictly inside the box (the periodic seam is at x = -lx/2, y = -ly/2).

    dx^{-1} u_t uses the equation itself for u_t, so the identity is exact up
    to the constraint projection and quadrature.
    """
    _check_id(charge_id)
    grid: Grid2D = state.grid
    if grid.ny == 1:
        raise ValueError("topological charges need a 2D grid")
    if not (grid.x[0] < rect.x0 and rect.x1 < grid.x[0] + grid.lx
            and grid.y[0] < rect.y0 and rect.y1 < grid.y[0] + grid.ly):
        raise ValueError("rectangle crosses the periodic seam; choose an interior rectangle")
    ix = (_grid_index(grid.x, rect.x0, "x0"), _grid_index(grid.x, rect.x1, "x1"))
    iy = (_grid_index(grid.y, rect.y0, "y0"), _grid_index(grid.y, rect.y1, "y1"))

    kx, ky = grid.wavenumbers
    # The loop is exact for the Nyquist-free interpolant the solver evolves.
    uhat = np.array(state.uhat, dtype=complex)
    uhat[grid.nyquist_mask] = 0.0
    beta, sigma = float(params.beta), params.sigma
    ut_hat = 1j * linear_symbol(params, kx, ky) * uhat + nonlinear_rhs(grid, uhat, dealias=False)
    A = ifft2((beta * (1j * kx) ** 2 + (1j * kx) ** 4) * uhat).real
    A += 0.5 * ifft2(uhat).real ** 2 + ifft2(dx_inv_hat(grid, ut_hat)).real
    dxinv_uy = ifft2(dx_inv_hat(grid, 1j * ky * uhat)).real
    _, Y = grid.mesh
    if charge_id == 1:
        B = sigma * dxinv_uy
    else:
        B = sigma * (Y * dxinv_uy - ifft2(dx_inv_hat(grid, uhat)).real)

    # y A is not periodic in y, so the weight is applied to the interpolant of A.
    def dy_side(x, _w):
        col = A[ix[0] if x == rect.x0 else ix[1], :]
        if charge_id == 1:
            return _segment_integral(col, grid.y[0], grid.ly, rect.y0, rect.y1)
        return _weighted_segment(col, grid.y[0], grid.ly, rect.y0, rect.y1)

    def dx_side(y):
        j = iy[0] if y == rect.y0 else iy[1]
        row = B[:, j]
        return _segment_integral(row, grid.x[0], grid.lx, rect.x0, rect.x1)

    return _loop(charge_id, sigma, rect, dy_side, dx_side)


def _weighted_segment(values, origin, period, a, b) -> float:
    """Exact integral of y g(y) over [a, b] for the trigonometric interpolant g."""
    n = len(values)
    c = np.fft.fft(values) / n
    k = 2 * np.pi * np.fft.fftfreq(n, d=period / n)
    if n % 2 == 0:
        c[n // 2] = 0.0
    nz = k != 0
    total = c[0] * 0.5 * (b * b - a * a)
    kk = k[nz]

    def prim(y):
        # antiderivative of y e^{i k (y - origin)}
        e = np.exp(1j * kk * (y - origin))
        return e * (y / (1j * kk) + 1.0 / kk ** 2)

    total += np.sum(c[nz] * (prim(b) - prim(a)))
    return float(total.real)
