"""The quadratic integral I = int U psi with L psi = U for the rescaled profile U = sech^4.

L = (1/1680) d^4 - (13/420) d^2 (+ speed) has symbol
s(k) = k^4/1680 + 13 k^2/420 (+ speed).  Without the speed term s(0) = 0
while int U = 4/3, so L psi = U has no L^2 solution; the k = 0 mode is
projected out and the result grows linearly with the box length.  With
speed > 0 the symbol is bounded below and I converges.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kkplab.ansatz import fourier_symbol

SECH4_MASS = 4.0 / 3.0


@dataclass
class StabilityReport:
    L: float
    n: int
    speed: float
    I: float
    projected_mean: float
    symbol_min: float
    regularized: bool

    def lines(self) -> list[str]:
        out = [f"grid n={self.n} L={self.L!r} speed={self.speed!r}",
               f"min s(k) over k != 0: {self.symbol_min!r}",
               f"I = {self.I!r}"]
        if self.regularized:
            out.append(f"note: s(0) = 0, k = 0 mode of U (int U = {self.projected_mean!r}) "
                       "projected out; I is a mean-projected surrogate that grows with L")
        return out


def sech4_grid(n: int, L: float):
    xi = -0.5 * L + L * np.arange(n) / n
    return xi, np.cosh(xi) ** -4


def _spectral_weights(n: int, L: float, speed: float):
    k = 2 * np.pi * np.fft.fftfreq(n, d=L / n)
    s = fourier_symbol(k, speed)
    return k, s


def bilinear_form(a, b, L: float, speed: float = 0.0) -> float:
    """B(a, b) = int a (L^{-1} b), with the k = 0 mode dropped when s(0) = 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = len(a)
    k, s = _spectral_weights(n, L, speed)
    ah, bh = np.fft.fft(a), np.fft.fft(b)
    keep = s > 0
    psi_h = np.zeros_like(bh)
    psi_h[keep] = bh[keep] / s[keep]
    # Parseval: int a psi = (L / n^2) sum conj(ah) psi_h
    return float((L / n ** 2) * np.sum(np.conj(ah) * psi_h).real)


def stability_integral(n: int = 4096, L: float = 100.0, speed: float = 0.0) -> StabilityReport:
    if n < 8 or n % 2:
        raise ValueError("n must be even and >= 8")
    if not L > 0:
        raise ValueError("L must be positive")
    if speed < 0:
        raise ValueError("speed must be >= 0")
    _, U = sech4_grid(n, L)
    k, s = _spectral_weights(n, L, speed)
    I = bilinear_form(U, U, L, speed)
    return StabilityReport(L=L, n=n, speed=float(speed), I=I,
                           projected_mean=float(np.mean(U) * L) if speed == 0 else 0.0,
                           symbol_min=float(np.min(s[k != 0])), regularized=speed == 0)
