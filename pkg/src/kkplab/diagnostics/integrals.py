"""Conserved integrals, centres and Galilean relations on spectral states.

All integrals are spectral quadratures (grid mean times box area), which are
exact for band-limited periodic integrands.  The antiderivative dx^{-1} is
the zero-mean one: Fourier division by i kx with the kx = 0 column zeroed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from kkplab.model import ModelParams
from kkplab.spectral import Grid2D, SpectralState, fft2, ifft2


class ConstraintViolation(ValueError):
    pass


@dataclass(frozen=True)
class FTriple:
    """f(t) with its first three derivatives."""

    name: str
    f: Callable[[float], float]
    df: Callable[[float], float]
    d2f: Callable[[float], float]
    d3f: Callable[[float], float]

    def __call__(self, t):
        return self.f(t), self.df(t), self.d2f(t), self.d3f(t)


_zero = lambda t: 0.0 * t  # noqa: E731

F_ONE = FTriple("1", lambda t: 1.0 + 0.0 * t, _zero, _zero, _zero)
F_T = FTriple("t", lambda t: t, lambda t: 1.0 + 0.0 * t, _zero, _zero)
F_T2 = FTriple("t2", lambda t: t * t, lambda t: 2.0 * t, lambda t: 2.0 + 0.0 * t, _zero)
BUILTIN_F = {"1": F_ONE, "t": F_T, "t2": F_T2}


def parse_f(names: str | Sequence[str]) -> list[FTriple]:
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",") if n.strip()]
    try:
        return [BUILTIN_F[n] for n in names]
    except KeyError as exc:
        raise ValueError(f"unknown f {exc.args[0]!r}; choose from {sorted(BUILTIN_F)}") from None


def spectral_derivative(grid: Grid2D, uhat: np.ndarray, nx: int = 0, ny: int = 0) -> np.ndarray:
    kx, ky = grid.wavenumbers
    return ifft2((1j * kx) ** nx * (1j * ky) ** ny * uhat).real


def dx_inv_hat(grid: Grid2D, uhat: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    mask = grid.constraint_mask
    if mask.any():
        bad = float(np.linalg.norm(uhat[mask]))
        total = float(np.linalg.norm(uhat))
        if total > 0 and bad > tol * total:
            raise ConstraintViolation(
                f"dx^-1 undefined: ||uhat(kx=0, ky!=0)|| = {bad:.3e} "
                f"({bad / total:.3e} relative, tolerance {tol:g})")
    kx, _ = grid.wavenumbers
    out = np.zeros_like(uhat, dtype=complex)
    nz = kx != 0
    out[nz] = uhat[nz] / (1j * kx[nz])
    return out


def dx_inv(grid: Grid2D, field_values, tol: float = 1e-8) -> np.ndarray:
    """Zero-x-mean antiderivative of a periodic field."""
    return ifft2(dx_inv_hat(grid, fft2(np.asarray(field_values, dtype=float)), tol)).real


def integrate(grid: Grid2D, values) -> float:
    return float(np.mean(values)) * grid.area


@dataclass
class DiagnosticsRecord:
    t: float
    M: float
    My: float
    Px: float
    Py: float
    E: float
    chi_M: float | None
    Pxy: float
    Mx: float
    auxiliary: dict[str, float] = field(default_factory=dict)

    COLUMNS = ("t", "M", "My", "Px", "Py", "E", "chi_M", "Pxy")

    def row(self) -> dict[str, float | None]:
        out = {name: getattr(self, name) for name in self.COLUMNS}
        out["Mx"] = self.Mx
        out.update(self.auxiliary)
        return out


class _Fields:
    """Physical fields derived once per state."""

    def __init__(self, state: SpectralState):
        grid, uhat = state.grid, state.uhat
        self.grid = grid
        self.u = ifft2(uhat).real
        self.X, self.Y = grid.mesh
        self.w = ifft2(dx_inv_hat(grid, (1j * grid.wavenumbers[1]) * uhat)).real
        self._uhat = uhat

    def derivative(self, nx=0, ny=0):
        return spectral_derivative(self.grid, self._uhat, nx, ny)


def _gen_momenta(fl: _Fields, params: ModelParams, f: FTriple, t: float):
    f0, f1, f2, _ = f(t)
    u, X, Y, w, sigma = fl.u, fl.X, fl.Y, fl.w, params.sigma
    px_terms = (0.5 * f0 * u * u, -f1 * X * u)
    py_terms = (0.5 * f0 * u * w, 0.25 * f1 * Y * u * u / sigma, -0.5 * f2 * X * Y * u / sigma)
    grid = fl.grid
    pxf = sum(integrate(grid, term) for term in px_terms)
    pyf = sum(integrate(grid, term) for term in py_terms)
    px_scale = sum(integrate(grid, np.abs(term)) for term in px_terms)
    py_scale = sum(integrate(grid, np.abs(term)) for term in py_terms)
    return pxf, pyf, px_scale, py_scale


def generalized_momenta(state: SpectralState, params: ModelParams, f: FTriple) -> tuple[float, float]:
    """P^x[f] = int (f u^2/2 - f' x u),
    P^y[f] = int (f u w + (y/sigma)(f' u^2/2 - f'' x u)) / 2,  w = dx^{-1} u_y."""
    pxf, pyf, _, _ = _gen_momenta(_Fields(state), params, f, state.t)
    return pxf, pyf


def conserved_integrals(state: SpectralState, params: ModelParams,
                        fs: Sequence[FTriple] = (F_T, F_T2)) -> DiagnosticsRecord:
    """Every conserved integral of the state, plus the generalized momenta for *fs*.

    For each f the auxiliary map holds PxF_<f>, PyF_<f> and the matching
    absolute-integrand magnitudes PxF_<f>_scale, PyF_<f>_scale, which serve as
    the denominators of relative drift.
    """
    fl = _Fields(state)
    grid, u, X, Y = fl.grid, fl.u, fl.X, fl.Y
    beta, sigma = float(params.beta), params.sigma
    ux, uxx = fl.derivative(1), fl.derivative(2)
    M = integrate(grid, u)
    Mx = integrate(grid, X * u)
    rec = DiagnosticsRecord(
        t=state.t,
        M=M,
        My=integrate(grid, Y * u),
        Px=integrate(grid, 0.5 * u * u),
        Py=integrate(grid, 0.5 * u * fl.w),
        E=integrate(grid, 0.5 * (uxx * uxx - beta * ux * ux - sigma * fl.w * fl.w + u ** 3 / 3.0)),
        chi_M=(Mx / M) if M != 0 else None,
        Pxy=integrate(grid, 0.5 * Y * u * u),
        Mx=Mx,
    )
    for f in fs:
        pxf, pyf, pxs, pys = _gen_momenta(fl, params, f, state.t)
        rec.auxiliary[f"PxF_{f.name}"] = pxf
        rec.auxiliary[f"PyF_{f.name}"] = pyf
        rec.auxiliary[f"PxF_{f.name}_scale"] = pxs
        rec.auxiliary[f"PyF_{f.name}_scale"] = pys
    return rec


def relative_drift(values: Sequence[float], scale: float | None = None) -> float:
    """max |Q(t) - Q(0)| / max(|Q| over the series, scale); 0 for an all-zero series."""
    v = np.asarray(values, dtype=float)
    denom = float(np.max(np.abs(v)))
    if scale is not None:
        denom = max(denom, float(scale))
    num = float(np.max(np.abs(v - v[0])))
    if num == 0.0:
        return 0.0
    return num / denom if denom > 0 else float("inf")


def series(records: Sequence[DiagnosticsRecord], name: str) -> np.ndarray:
    def get(rec):
        if name in rec.auxiliary:
            return rec.auxiliary[name]
        value = getattr(rec, name)
        return np.nan if value is None else value
    return np.array([get(r) for r in records], dtype=float)


# Galilean relations

@dataclass
class LinearFit:
    slope: float
    intercept: float
    max_residual: float
    value_range: float

    @property
    def relative_residual(self) -> float:
        if self.value_range == 0:
            return 0.0 if self.max_residual == 0 else float("inf")
        return self.max_residual / self.value_range


def linear_fit(t, values) -> LinearFit:
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    A = np.vstack([t, np.ones_like(t)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, values, rcond=None)
    resid = values - (slope * t + intercept)
    return LinearFit(float(slope), float(intercept), float(np.abs(resid).max()),
                     float(values.max() - values.min()))


def _rel(measured: float, predicted: float) -> float:
    if predicted == 0:
        return abs(measured)
    return abs(measured - predicted) / abs(predicted)


@dataclass
class GalileanReport:
    chi_M_fit: LinearFit
    chi_M_predicted: float
    chi_Px_fit: LinearFit
    chi_Px_predicted: float

    @property
    def chi_M_deviation(self) -> float:
        """Relative deviation of the fitted x-centre-of-mass speed from Px/M."""
        return _rel(self.chi_M_fit.slope, self.chi_M_predicted)

    @property
    def chi_Px_deviation(self) -> float:
        """Relative deviation of the fitted y-centre-of-x-momentum speed from
        -2 sigma Py/Px (absolute when the prediction is zero)."""
        return _rel(self.chi_Px_fit.slope, self.chi_Px_predicted)


def galilean_relations(records: Sequence[DiagnosticsRecord], sigma: int) -> GalileanReport:
    """Fit chi_M(t) = Mx/M and chi_Px(t) = Pxy/Px against their predicted speeds."""
    if len(records) < 3:
        raise ValueError("galilean_relations needs at least 3 samples")
    t = series(records, "t")
    if np.ptp(t) == 0:
        raise ValueError("degenerate time series")
    M, Px, Py = series(records, "M"), series(records, "Px"), series(records, "Py")
    if np.any(M == 0) or np.any(Px == 0):
        raise ValueError("galilean_relations needs M != 0 and Px != 0")
    chi_M = series(records, "Mx") / M
    chi_Px = series(records, "Pxy") / Px
    return GalileanReport(
        chi_M_fit=linear_fit(t, chi_M),
        chi_M_predicted=float(np.mean(Px / M)),
        chi_Px_fit=linear_fit(t, chi_Px),
        chi_Px_predicted=float(np.mean(-2.0 * sigma * Py / Px)),
    )
