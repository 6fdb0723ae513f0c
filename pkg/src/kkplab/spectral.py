"""Fourier pseudospectral integrator for the scaled K-KP equation.

In Fourier space the equation reads

    d uhat/dt = L(k) uhat - (i kx / 2) FFT(u^2),
    L(k) = i (beta kx^3 - kx^5 + sigma ky^2 / kx),

with L purely imaginary.  Time stepping is integrating-factor RK4: the
linear part is propagated exactly by exp(L dt) and classical RK4 acts on
the transformed nonlinearity.  Modes with kx = 0, ky != 0 are incompatible
with the dx^{-1} u_yy term and are projected out.

Fields are stored as arrays of shape (nx, ny) indexed u[ix, iy], with
x = -lx/2 + ix*lx/nx and y = -ly/2 + iy*ly/ny.
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterator

import numpy as np
import scipy.fft

from kkplab.model import LineWave, ModelParams, soliton_profile

log = logging.getLogger(__name__)

MODES = ("kkp2d", "kawahara1d")


class SolverDivergence(RuntimeError):
    pass


class ConstraintError(ValueError):
    pass


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("KKP_THREADS", "1")))
    except ValueError:
        return 1


def fft2(u):
    return scipy.fft.fft2(u, workers=_workers())


def ifft2(uhat):
    return scipy.fft.ifft2(uhat, workers=_workers())


@dataclass(frozen=True)
class Grid2D:
    nx: int
    ny: int
    lx: float
    ly: float

    def __post_init__(self):
        if self.nx < 2 or self.nx % 2:
            raise ValueError("nx must be a positive even integer")
        if self.ny < 1 or (self.ny > 1 and self.ny % 2):
            raise ValueError("ny must be 1 or a positive even integer")
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError("box lengths must be positive")

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def area(self) -> float:
        return self.lx * self.ly

    @cached_property
    def x(self) -> np.ndarray:
        return -0.5 * self.lx + self.dx * np.arange(self.nx)

    @cached_property
    def y(self) -> np.ndarray:
        return -0.5 * self.ly + self.dy * np.arange(self.ny)

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        kx = 2 * np.pi * np.fft.fftfreq(self.nx, d=self.dx)
        ky = 2 * np.pi * np.fft.fftfreq(self.ny, d=self.dy)
        return np.meshgrid(kx, ky, indexing="ij")

    @cached_property
    def constraint_mask(self) -> np.ndarray:
        """True on the kx = 0, ky != 0 modes."""
        kx, ky = self.wavenumbers
        return (kx == 0) & (ky != 0)

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        jx = np.fft.fftfreq(self.nx, d=1.0 / self.nx)
        jy = np.fft.fftfreq(self.ny, d=1.0 / self.ny)
        JX, JY = np.meshgrid(jx, jy, indexing="ij")
        mask = JX == -self.nx // 2
        if self.ny > 1:
            mask |= JY == -self.ny // 2
        return mask

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Modes kept by the 2/3 rule: |jx| < nx/3 and |jy| < ny/3."""
        jx = np.abs(np.fft.fftfreq(self.nx, d=1.0 / self.nx))
        jy = np.abs(np.fft.fftfreq(self.ny, d=1.0 / self.ny))
        JX, JY = np.meshgrid(jx, jy, indexing="ij")
        keep = 3 * JX < self.nx
        if self.ny > 1:
            keep &= 3 * JY < self.ny
        return keep


@dataclass(frozen=True)
class SpectralState:
    grid: Grid2D
    uhat: np.ndarray
    t: float = 0.0

    @classmethod
    def from_physical(cls, grid: Grid2D, u, t: float = 0.0) -> "SpectralState":
        return cls(grid, fft2(np.asarray(u, dtype=float)), t)

    @property
    def u(self) -> np.ndarray:
        return ifft2(self.uhat).real

    def imag_residue(self) -> float:
        return float(np.abs(ifft2(self.uhat).imag).max())

    def constraint_norm(self) -> float:
        return float(np.linalg.norm(self.uhat[self.grid.constraint_mask])) / self.uhat.size


@dataclass(frozen=True)
class SolverConfig:
    params: ModelParams
    dt: float
    t_end: float
    dealias: bool = True
    snapshot_every: int = 1
    mode: str = "kkp2d"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end >= 0:
            raise ValueError("t_end must be non-negative")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be a positive integer")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


def linear_symbol(params: ModelParams, kx, ky, *, transverse: bool = True):
    """Imaginary part of L(k); L = i(beta kx^3 - kx^5 + sigma ky^2/kx), 0 at kx = 0."""
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    beta = float(params.beta)
    out = beta * kx ** 3 - kx ** 5
    if transverse:
        safe = np.where(kx == 0, 1.0, kx)
        out = out + np.where(kx == 0, 0.0, params.sigma * ky ** 2 / safe)
    out = np.where(kx == 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def project_constraint(grid: Grid2D, uhat: np.ndarray) -> float:
    """Zero the kx = 0, ky != 0 modes in place; return the removed l2 norm
    (normalised by the mode count, i.e. in physical amplitude units)."""
    mask = grid.constraint_mask
    removed = float(np.linalg.norm(uhat[mask])) / uhat.size
    uhat[mask] = 0.0
    return removed


def nonlinear_rhs(grid: Grid2D, uhat: np.ndarray, dealias: bool = True) -> np.ndarray:
    """Fourier coefficients of -(1/2)(u^2)_x."""
    if not np.all(np.isfinite(uhat)):
        raise SolverDivergence("non-finite Fourier coefficients in nonlinear term")
    kx, _ = grid.wavenumbers
    if dealias:
        uhat = uhat * grid.dealias_mask
    u = ifft2(uhat).real
    out = -0.5j * kx * fft2(u * u)
    if dealias:
        out *= grid.dealias_mask
    out[grid.nyquist_mask] = 0.0
    out[grid.constraint_mask] = 0.0
    return out


class Integrator:
    """IFRK4 stepper for one (params, grid) pair; caches the propagators."""

    def __init__(self, params: ModelParams, grid: Grid2D, *, dealias: bool = True,
                 nonlinear: bool = True, mode: str = "kkp2d"):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if mode == "kawahara1d" and grid.ny != 1:
            raise ValueError("kawahara1d mode requires ny = 1")
        self.params = params
        self.grid = grid
        self.dealias = dealias
        self.nonlinear = nonlinear
        self.mode = mode
        kx, ky = grid.wavenumbers
        self.omega = linear_symbol(params, kx, ky, transverse=(mode == "kkp2d"))
        self._prop: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def propagators(self, dt: float):
        if dt not in self._prop:
            half = np.exp(0.5j * dt * self.omega)
            self._prop[dt] = (half, half * half)
        return self._prop[dt]

    def rhs(self, uhat):
        if not self.nonlinear:
            return np.zeros_like(uhat)
        return nonlinear_rhs(self.grid, uhat, self.dealias)

    def prepare(self, uhat: np.ndarray) -> np.ndarray:
        """Copy of *uhat* restricted to the modes the scheme evolves."""
        uhat = np.array(uhat, dtype=complex)
        uhat[self.grid.nyquist_mask] = 0.0
        if self.dealias:
            uhat *= self.grid.dealias_mask
        removed = project_constraint(self.grid, uhat)
        if removed > 0:
            log.info("projected kx=0, ky!=0 modes of initial data (norm %.3e)", removed)
        return uhat

    def step(self, state: SpectralState, dt: float, step_index: int | None = None) -> SpectralState:
        if not dt > 0:
            raise ValueError("dt must be positive")
        E, E2 = self.propagators(dt)
        u = state.uhat
        a = dt * self.rhs(u)
        b = dt * self.rhs(E * (u + 0.5 * a))
        c = dt * self.rhs(E * u + 0.5 * b)
        d = dt * self.rhs(E2 * u + E * c)
        new = E2 * u + (E2 * a + 2.0 * E * (b + c) + d) / 6.0
        new[self.grid.constraint_mask] = 0.0
        if not np.all(np.isfinite(new)):
            where = "" if step_index is None else f" at step {step_index}"
            peak = np.nanmax(np.abs(np.where(np.isfinite(new), new, np.nan))) if np.isfinite(new).any() else float("inf")
            raise SolverDivergence(f"solver diverged{where} (t={state.t + dt:.6g}, max|uhat|={peak:.3e})")
        return SpectralState(state.grid, new, state.t + dt)


def step_ifrk4(state: SpectralState, dt: float, params: ModelParams, *, dealias: bool = True,
               nonlinear: bool = True, mode: str = "kkp2d") -> SpectralState:
    """One integrating-factor RK4 step (convenience wrapper around Integrator)."""
    return Integrator(params, state.grid, dealias=dealias, nonlinear=nonlinear, mode=mode).step(state, dt)


def step_schedule(dt: float, t_end: float) -> list[float]:
    """Times after each step: n*dt up to t_end, with a shortened final step if needed."""
    n = int(math.floor(t_end / dt + 1e-9))
    times = [k * dt for k in range(1, n + 1)]
    if t_end - n * dt > 1e-12 * max(1.0, t_end):
        times.append(t_end)
    elif times:
        times[-1] = t_end
    return times


def simulate(config: SolverConfig, grid: Grid2D, initial, *,
             nonlinear: bool = True) -> Iterator[SpectralState]:
    """Yield the initial state and every snapshot_every-th state up to t_end.

    The final state is always yielded.  *initial* is a physical field.
    """
    if config.mode == "kawahara1d" and grid.ny != 1:
        raise ValueError("kawahara1d mode requires ny = 1")
    integ = Integrator(config.params, grid, dealias=config.dealias, nonlinear=nonlinear,
                       mode=config.mode)
    state = SpectralState(grid, integ.prepare(fft2(np.asarray(initial, dtype=float))), 0.0)
    yield state
    t_prev = 0.0
    times = step_schedule(config.dt, config.t_end)
    for n, t in enumerate(times, start=1):
        state = integ.step(state, t - t_prev, step_index=n)
        state = replace(state, t=t)
        t_prev = t
        if n % config.snapshot_every == 0 or n == len(times):
            yield state


def wrap(xi, period: float):
    return np.mod(np.asarray(xi) + 0.5 * period, period) - 0.5 * period


def line_soliton_field(grid: Grid2D, params: ModelParams, wave: LineWave, x0: float = 0.0,
                       t: float = 0.0) -> np.ndarray:
    """Closed-form U(x + mu y - nu t - x0) sampled on the grid, periodised in x."""
    X, Y = grid.mesh
    xi = wrap(X + float(wave.mu) * Y - float(wave.nu) * t - x0, grid.lx)
    return soliton_profile(params, wave, xi)


def check_commensurate(grid: Grid2D, mu: float, tol: float = 1e-9):
    if mu == 0 or grid.ny == 1:
        return
    turns = float(mu) * grid.ly / grid.lx
    if abs(turns - round(turns)) > tol:
        raise ValueError("line soliton not periodic on this box: require mu*ly/lx in Z "
                         f"(mu*ly/lx = {turns:.6g})")


def init_line_soliton(grid: Grid2D, params: ModelParams, wave: LineWave, x0: float = 0.0,
                      background: str = "zero") -> np.ndarray:
    """Initial field for a line soliton; kx = 0, ky != 0 content is projected out.

    background="zero" insists on p = 0; "free" accepts a constant offset.
    """
    if background not in ("zero", "free"):
        raise ValueError("background must be 'zero' or 'free'")
    if background == "zero" and abs(float(wave.p)) > 1e-12 * max(1.0, float(wave.q)):
        raise ValueError(f"wave has background p={float(wave.p):.6g}; use background='free' "
                         "to accept a nonzero offset")
    check_commensurate(grid, float(wave.mu))
    u = line_soliton_field(grid, params, wave, x0)
    uhat = fft2(u)
    removed = project_constraint(grid, uhat)
    log.info("line soliton initial data: projected constraint norm %.3e", removed)
    return ifft2(uhat).real
