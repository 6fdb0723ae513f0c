"""Closed-form line-soliton fields u(x, y, t) and potentials v with exact derivatives."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kkplab.model import LineWave, ModelParams, potential_profile, profile_jet


@dataclass(frozen=True)
class VJet:
    """Partial derivatives of the potential v at a set of points."""

    v: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    vt: np.ndarray
    vxx: np.ndarray
    vxxx: np.ndarray
    vxxxx: np.ndarray
    vxxxxx: np.ndarray
    vtx: np.ndarray
    vtxx: np.ndarray
    vxy: np.ndarray
    vxxy: np.ndarray


@dataclass(frozen=True)
class LineSolitonField:
    """u = U(x + mu y - nu t - x0) on the whole plane (no periodisation)."""

    params: ModelParams
    wave: LineWave
    x0: float = 0.0

    def xi(self, x, y, t):
        w = self.wave
        return (np.asarray(x, dtype=float) + float(w.mu) * np.asarray(y, dtype=float)
                - float(w.nu) * np.asarray(t, dtype=float) - self.x0)

    def profile(self, xi, order_max: int = 6):
        return profile_jet(self.params, self.wave, xi, order_max)

    def u(self, x, y, t):
        return self.profile(self.xi(x, y, t), 0)[0]

    def v_jet(self, x, y, t) -> VJet:
        """Derivatives of v = V(xi), V' = U, V(0) = 0."""
        xi = self.xi(x, y, t)
        U = self.profile(xi, 4)
        mu, nu = float(self.wave.mu), float(self.wave.nu)
        V = potential_profile(self.params, self.wave, xi)
        return VJet(v=V, vx=U[0], vy=mu * U[0], vt=-nu * U[0], vxx=U[1], vxxx=U[2], vxxxx=U[3],
                    vxxxxx=U[4], vtx=-nu * U[1], vtxx=-nu * U[2], vxy=mu * U[1], vxxy=mu * U[2])

    def nonlocal_terms(self, x, y, t):
        """(dx^{-1} u, dx^{-1} u_t, dx^{-1} u_y) with the decaying convention."""
        xi = self.xi(x, y, t)
        U = self.profile(xi, 0)[0]
        V = potential_profile(self.params, self.wave, xi)
        return V, -float(self.wave.nu) * U, float(self.wave.mu) * U
