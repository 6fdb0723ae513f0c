"""Run configuration, deterministic CSV/text output and binary snapshots.

Config files are flat ``key = value`` lines; ``#`` starts a comment.  Floats
are written in shortest round-trip form (``repr``), so identical runs give
byte-identical files.  Every file is written to a temporary sibling and
renamed into place.
"""
from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from kkplab.model import LineWave, ModelParams, NoSolitonError
from kkplab.spectral import MODES, Grid2D, SolverConfig

SNAPSHOT_MAGIC = "KKP1"
WAVE_KINDS = ("zero_background", "kappa", "explicit")


class ConfigError(ValueError):
    pass


# Formatting and atomic writes

def format_value(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def atomic_write_bytes(path, data: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def atomic_write_text(path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    return atomic_write_text(path, csv_text(header, rows))


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text().splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


# Snapshots

def snapshot_bytes(u: np.ndarray, grid: Grid2D, t: float) -> bytes:
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.nx, grid.ny):
        raise ValueError(f"field shape {u.shape} does not match grid ({grid.nx}, {grid.ny})")
    header = f"{SNAPSHOT_MAGIC} {grid.nx} {grid.ny} {grid.lx!r} {grid.ly!r} {float(t)!r}\n"
    return header.encode("ascii") + np.ascontiguousarray(u, dtype="<f8").tobytes(order="C")


def write_snapshot(path, u, grid: Grid2D, t: float) -> Path:
    """Header line then u[ix, iy] row-major (iy fastest) as little-endian float64."""
    return atomic_write_bytes(path, snapshot_bytes(u, grid, t))


def read_snapshot(path) -> tuple[np.ndarray, Grid2D, float]:
    data = Path(path).read_bytes()
    nl = data.find(b"\n")
    if nl < 0:
        raise ValueError("snapshot header is not newline-terminated")
    parts = data[:nl].decode("ascii").split()
    if len(parts) != 6 or parts[0] != SNAPSHOT_MAGIC:
        raise ValueError(f"not a {SNAPSHOT_MAGIC} snapshot")
    nx, ny = int(parts[1]), int(parts[2])
    lx, ly, t = float(parts[3]), float(parts[4]), float(parts[5])
    payload = data[nl + 1:]
    if len(payload) != nx * ny * 8:
        raise ValueError(f"payload is {len(payload)} bytes, expected {nx * ny * 8}")
    u = np.frombuffer(payload, dtype="<f8").reshape(nx, ny).astype(float)
    return u, Grid2D(nx, ny, lx, ly), t


# Run configuration

def _parse_number(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        return float(text)


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_list(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


_PARSERS = {int: int, float: _parse_number, bool: _parse_bool, str: str, tuple: _parse_list}


@dataclass(frozen=True)
class RunConfig:
    beta: float
    sigma: int
    nx: int
    ny: int
    lx: float
    ly: float
    dt: float
    t_end: float
    mode: str = "kkp2d"
    dealias: bool = True
    snapshot_every: int = 1
    wave: str = "zero_background"
    mu: float = 0.0
    nu: float | None = None
    kappa: float | None = None
    x0: float = 0.0
    momenta: tuple = ("t", "t2")

    REQUIRED = ("beta", "sigma", "nx", "ny", "lx", "ly", "dt", "t_end")
    TYPES = {"beta": float, "sigma": int, "nx": int, "ny": int, "lx": float, "ly": float,
             "dt": float, "t_end": float, "mode": str, "dealias": bool, "snapshot_every": int,
             "wave": str, "mu": float, "nu": float, "kappa": float, "x0": float, "momenta": tuple}

    def __post_init__(self):
        # Build every derived object once so that any invalid value fails here.
        self.params
        self.grid
        self.solver_config
        if self.wave not in WAVE_KINDS:
            raise ConfigError(f"wave must be one of {WAVE_KINDS}")
        if self.wave == "kappa" and self.kappa is None:
            raise ConfigError("wave = kappa requires the key kappa")
        if self.wave == "explicit" and self.nu is None:
            raise ConfigError("wave = explicit requires the key nu")
        self.params.require_soliton()
        self.line_wave

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.beta, self.sigma)

    @property
    def grid(self) -> Grid2D:
        return Grid2D(self.nx, self.ny, self.lx, self.ly)

    @property
    def solver_config(self) -> SolverConfig:
        return SolverConfig(self.params, self.dt, self.t_end, self.dealias, self.snapshot_every,
                            self.mode)

    @property
    def line_wave(self) -> LineWave:
        if self.wave == "zero_background":
            return LineWave.zero_background(self.params, self.mu)
        if self.wave == "kappa":
            return LineWave.from_kappa(self.params, self.kappa, self.mu)
        return LineWave(self.params, self.mu, self.nu)

    def items(self) -> list[tuple[str, object]]:
        return [(f.name, getattr(self, f.name)) for f in fields(self)]

    def manifest_lines(self) -> list[str]:
        out = []
        for k, v in self.items():
            if v is None:
                continue
            out.append(f"{k} = {','.join(v) if isinstance(v, tuple) else format_value(v)}")
        w = self.line_wave
        for k in ("nu", "kappa", "r", "p", "q"):
            out.append(f"derived.{k} = {format_value(float(getattr(w, k)))}")
        return out


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    values: dict[str, object] = {}
    lines_of: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in RunConfig.TYPES:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r} (first on line {lines_of[key]})")
        typ = RunConfig.TYPES[key]
        try:
            values[key] = _PARSERS[typ](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: expected {typ.__name__}, got {value!r}"
                              f" ({exc})") from None
        lines_of[key] = lineno
    missing = [k for k in RunConfig.REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"{source}: missing required key(s): {', '.join(missing)}")
    if values.get("mode", "kkp2d") not in MODES:
        raise ConfigError(f"{source}:{lines_of['mode']}: mode must be one of {MODES}")
    try:
        return RunConfig(**values)
    except (ValueError, NoSolitonError) as exc:
        msg = str(exc)
        where = next((lines_of[k] for k in lines_of if msg.startswith(k)), None)
        if where is None:
            where = next((lines_of[k] for k in ("sigma", "beta") if k in msg and k in lines_of), None)
        prefix = f"{source}:{where}" if where else source
        raise ConfigError(f"{prefix}: {msg}") from None


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text, str(path))
