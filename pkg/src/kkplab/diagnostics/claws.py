"""The five Noether conservation laws of the potential K-KP equation.

    v_tx + v_x v_xx + beta v_xxxx + v_xxxxxx = sigma v_yy,   u = v_x.

Each law is a density T and flux (Phi^x, Phi^y) with
D_t T + D_x Phi^x + D_y Phi^y = 0 on solutions.  The checker evaluates
T and Phi exactly on a closed-form line soliton and takes the outer
divergence with fourth-order central differences, so the residual is pure
truncation error and must fall off like h^4.

Two flux terms differ from the reference display, which does not satisfy
the identity: Phi^x_1 carries -v_t^2/2 (reference form -v_x^2/2) and the f''
part of Phi^x_2 carries v_x^2/2 (reference form v_x^2).  ``variant="reference"``
reproduces the display for comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from kkplab.diagnostics.closed_form import LineSolitonField, VJet
from kkplab.diagnostics.integrals import F_ONE, FTriple
from kkplab.model import LineWave, ModelParams

VARIANTS = ("corrected", "reference")


def law1(j: VJet, x, y, fv, beta, sigma, variant="corrected"):
    T = 0.5 * (j.vxxx ** 2 - beta * j.vxx ** 2 + j.vx ** 3 / 3.0 - sigma * j.vy ** 2)
    quad = j.vx ** 2 if variant == "reference" else j.vt ** 2
    Phx = ((beta * j.vxx + j.vxxxx) * j.vtx - 0.5 * quad
           - (beta * j.vxxx + j.vxxxxx + 0.5 * j.vx ** 2) * j.vt - j.vtxx * j.vxxx)
    Phy = sigma * j.vt * j.vy
    return T, Phx, Phy


def _flux_core(j: VJet, beta):
    """beta v_xxx + v_xxxxx + v_x^2/2 + v_t, which vanishes on line solitons up to C1."""
    return beta * j.vxxx + j.vxxxxx + 0.5 * j.vx ** 2 + j.vt


def _lagrangian_x(j: VJet, beta):
    return (beta * j.vx * j.vxxx - 0.5 * beta * j.vxx ** 2 + j.vx ** 3 / 3.0
            + j.vxxxxx * j.vx - j.vxx * j.vxxxx + 0.5 * j.vxxx ** 2)


def law2(j: VJet, x, y, fv, beta, sigma, variant="corrected"):
    f, f1, f2, _ = fv
    T = 0.5 * j.vx ** 2 * f + j.v * f1
    quad = j.vx ** 2 if variant == "reference" else 0.5 * j.vx ** 2
    Phx = ((0.5 * sigma * j.vy ** 2 + _lagrangian_x(j, beta)) * f
           - (x * _flux_core(j, beta) - (beta * j.vxx + j.vxxxx)) * f1
           - y ** 2 * (beta * j.vxxx + j.vxxxxx + quad + j.vt) * f2 / (2.0 * sigma))
    Phy = -sigma * f * j.vx * j.vy + sigma * x * f1 * j.vy + (0.5 * y ** 2 * j.vy - y * j.v) * f2
    return T, Phx, Phy


def law3(j: VJet, x, y, fv, beta, sigma, variant="corrected"):
    f, f1, f2, f3 = fv
    core = _flux_core(j, beta)
    T = 0.5 * (j.vx * j.vy * f + y * j.vx ** 2 * f1 / (2.0 * sigma) + y * j.v * f2 / sigma)
    Phx = ((0.5 * j.vt * j.vy + (beta * j.vxxx + 0.5 * j.vx ** 2 + j.vxxxxx) * j.vy
            - (beta * j.vxx + j.vxxxx) * j.vxy + j.vxxx * j.vxxy) * f
           + y * (0.25 * j.vy ** 2 + _lagrangian_x(j, beta) / (2.0 * sigma)) * f1
           - (x * y * core - y * (beta * j.vxx + j.vxxxx)) * f2 / (2.0 * sigma)
           - y ** 3 * core * f3 / (12.0 * sigma ** 2))
    Phy = -0.5 * ((j.vx * j.vt + sigma * j.vy ** 2 - beta * j.vxx ** 2 + j.vx ** 3 / 3.0
                   + j.vxxx ** 2) * f
                  + y * f1 * j.vx * j.vy - x * (y * j.vy - j.v) * f2
                  - (y ** 3 * j.vy / 3.0 - y ** 2 * j.v) * f3 / (2.0 * sigma))
    return T, Phx, Phy


def law4(j: VJet, x, y, fv, beta, sigma, variant="corrected"):
    f = fv[0]
    return 0.0 * j.v, _flux_core(j, beta) * f, -sigma * j.vy * f


def law5(j: VJet, x, y, fv, beta, sigma, variant="corrected"):
    f = fv[0]
    return 0.0 * j.v, y * _flux_core(j, beta) * f, sigma * (j.v - y * j.vy) * f


LAWS = {1: law1, 2: law2, 3: law3, 4: law4, 5: law5}
# Law 1 (time translation) has no free function.
USES_F = {1: False, 2: True, 3: True, 4: True, 5: True}

_STENCIL = (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([1.0, -8.0, 8.0, -1.0]) / 12.0)


def density_flux(claw_id: int, f: FTriple, field_: LineSolitonField, x, y, t,
                 variant: str = "corrected"):
    if claw_id not in LAWS:
        raise ValueError(f"claw_id must be in 1..5 (got {claw_id})")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    jet = field_.v_jet(x, y, t)
    return LAWS[claw_id](jet, np.asarray(x, float), np.asarray(y, float), f(np.asarray(t, float)),
                         float(field_.params.beta), field_.params.sigma, variant)


def claw_divergence_residual(claw_id: int, f: FTriple, params: ModelParams, wave: LineWave,
                             point: tuple[float, float, float], h: float,
                             variant: str = "corrected", x0: float = 0.0) -> float:
    """D_t T + D_x Phi^x + D_y Phi^y at *point*, outer derivatives by 4th-order
    central differences of step *h* over exactly evaluated T and Phi."""
    if claw_id not in LAWS:
        raise ValueError(f"claw_id must be in 1..5 (got {claw_id})")
    if not h > 0:
        raise ValueError("h must be positive")
    params.require_soliton()
    fld = LineSolitonField(params, wave, x0)
    x, y, t = (float(c) for c in point)
    offsets, weights = _STENCIL
    d = offsets * h
    T = density_flux(claw_id, f, fld, x, y, t + d, variant)[0]
    Phx = density_flux(claw_id, f, fld, x + d, y, t, variant)[1]
    Phy = density_flux(claw_id, f, fld, x, y + d, t, variant)[2]
    return float((weights @ np.broadcast_to(T, d.shape) + weights @ Phx + weights @ Phy) / h)


# Residuals below this are indistinguishable from roundoff in the stencil.
ROUNDOFF_FLOOR = 1e-12


@dataclass
class ConvergenceStudy:
    claw_id: int
    f_name: str
    steps: list[float]
    residuals: list[float]
    orders: list[float] = field(default_factory=list)
    plateau_at: int | None = None

    @property
    def exact(self) -> bool:
        """The stencil is exact on this law (residual at roundoff from the start)."""
        return abs(self.residuals[0]) <= ROUNDOFF_FLOOR

    @property
    def observed_order(self) -> float:
        """Least-squares slope of log|R| against log h over the asymptotic range;
        inf when the stencil is already exact at the coarsest step."""
        if self.exact:
            return float("inf")
        stop = len(self.steps) if self.plateau_at is None else self.plateau_at
        if stop < 2:
            return float("nan")
        h = np.log(self.steps[:stop])
        r = np.log(np.abs(self.residuals[:stop]))
        return float(np.polyfit(h, r, 1)[0])

    @property
    def best_residual(self) -> float:
        return float(np.min(np.abs(self.residuals)))

    def passed(self, min_order: float = 3.5, max_residual: float = 1e-7) -> bool:
        return self.observed_order >= min_order and self.best_residual <= max_residual


def default_h0(params: ModelParams) -> float:
    """Coarsest step: a tenth of the soliton width 1/r."""
    return 0.1 / float(np.sqrt(abs(float(params.beta)) / 13.0))


def convergence_study(claw_id: int, f: FTriple, params: ModelParams, wave: LineWave,
                      point: tuple[float, float, float], h0: float | None = None,
                      max_levels: int = 12, variant: str = "corrected",
                      plateau_ratio: float = 4.0, plateau_level: float = 1e-9) -> ConvergenceStudy:
    """Residuals at h0, h0/2, ... until the roundoff plateau or *max_levels*.

    The plateau starts at the first halving that shrinks the residual by
    less than *plateau_ratio* (a clean fourth-order step shrinks it by ~16)
    once the residual is below *plateau_level*; above it a stalled halving is
    a preasymptotic sign change of the error, not roundoff.  Two further levels are taken past the plateau to show it.
    """
    if h0 is None:
        h0 = default_h0(params)
    steps, res = [], []
    study = ConvergenceStudy(claw_id, f.name if USES_F[claw_id] else F_ONE.name, steps, res)
    for k in range(max_levels):
        h = h0 / 2 ** k
        steps.append(h)
        res.append(claw_divergence_residual(claw_id, f, params, wave, point, h, variant))
        if k == 0:
            if study.exact:
                break
            continue
        a, b = abs(res[k - 1]), abs(res[k])
        study.orders.append(float(np.log2(a / b)) if a > 0 and b > 0 else float("inf"))
        if study.plateau_at is None and (
                b == 0 or (a / b < plateau_ratio and b < plateau_level)):
            study.plateau_at = k
        if study.plateau_at is not None and k >= study.plateau_at + 1:
            break
    return study


def all_studies(params: ModelParams, wave: LineWave, point, fs: Sequence[FTriple],
                claws: Sequence[int] = (1, 2, 3, 4, 5), **kw) -> list[ConvergenceStudy]:
    out = []
    for cid in claws:
        for f in (fs if USES_F[cid] else [F_ONE]):
            out.append(convergence_study(cid, f, params, wave, point, **kw))
    return out
