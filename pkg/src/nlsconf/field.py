"""Uniform periodic grids, sampled complex fields and spectral utilities."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError

# points per block in direct trigonometric sums; bounds memory at ~chunk*n complex
_RESAMPLE_CHUNK = 256


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


@dataclass(frozen=True)
class Grid1D:
    """Periodic grid on [x_min, x_max); x_max itself is not a sample."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise ConfigurationError(f"n_points must be an integer, got {n!r}")
        if n < 8 or n & (n - 1):
            raise ConfigurationError(f"n_points must be a power of two >= 8, got {n}")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ConfigurationError("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise ConfigurationError(f"degenerate interval [{self.x_min}, {self.x_max})")
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))
        object.__setattr__(self, "n_points", int(n))

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_points) * self.spacing

    @property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers 2*pi*k/L in FFT order."""
        return 2 * np.pi / self.length * np.fft.fftfreq(self.n_points, d=1.0 / self.n_points)

    @property
    def mode_indices(self) -> np.ndarray:
        """Integer wavenumbers -n/2 .. n/2-1 (ascending, i.e. fftshifted)."""
        n = self.n_points
        return np.arange(-n // 2, n // 2)


def make_grid(x_min: float, x_max: float, n_points: int) -> Grid1D:
    return Grid1D(x_min, x_max, n_points)


@dataclass(frozen=True)
class ComplexField:
    grid: Grid1D
    time: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.n_points,):
            raise ConfigurationError(
                f"field has {vals.shape} samples, grid expects ({self.grid.n_points},)"
            )
        if not np.all(np.isfinite(vals)):
            raise ConfigurationError("field values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "time", float(self.time))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def with_values(self, values, time: float | None = None) -> "ComplexField":
        return ComplexField(self.grid, self.time if time is None else time, values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class Spectrum:
    """Fourier modes indexed by integer wavenumber k in {-n/2, ..., n/2-1}.

    ``modes[j]`` is the coefficient of exp(2*pi*i*k_j*(x - x_min)/L) with
    ``k_j = grid.mode_indices[j]``, normalised so that the field is the plain sum.
    """

    grid: Grid1D
    time: float
    modes: np.ndarray = field(repr=False)

    @property
    def k(self) -> np.ndarray:
        return self.grid.mode_indices


def to_spectrum(f: ComplexField) -> Spectrum:
    modes = np.fft.fftshift(np.fft.fft(f.values)) / f.grid.n_points
    return Spectrum(f.grid, f.time, modes)


def to_field(s: Spectrum) -> ComplexField:
    values = np.fft.ifft(np.fft.ifftshift(s.modes)) * s.grid.n_points
    return ComplexField(s.grid, s.time, values)


def spectral_derivative(f: ComplexField, order: int) -> ComplexField:
    if order not in (1, 2):
        raise ConfigurationError(f"derivative order must be 1 or 2, got {order}")
    return f.with_values(_dx(f.values, f.grid, order))


def _dx(values: np.ndarray, grid: Grid1D, order: int) -> np.ndarray:
    """Spectral x-derivative of raw samples; Nyquist mode dropped for odd orders."""
    k = grid.wavenumbers
    mult = (1j * k) ** order
    if order % 2:
        mult[grid.n_points // 2] = 0.0
    return np.fft.ifft(mult * np.fft.fft(values))


def l2_norm_squared(f: ComplexField) -> float:
    return float(f.grid.spacing * np.sum(np.abs(f.values) ** 2))


def spectral_l2_norm_squared(f: ComplexField) -> float:
    """Mass computed from Fourier modes (Parseval)."""
    s = to_spectrum(f)
    return float(f.grid.length * np.sum(np.abs(s.modes) ** 2))


def resample(f: ComplexField, points) -> np.ndarray:
    """Band-limited trigonometric interpolation of ``f`` at arbitrary points.

    Points are reduced modulo the period. The Nyquist mode is split evenly
    between +n/2 and -n/2 so the interpolant of real data stays real.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    grid = f.grid
    n = grid.n_points
    coeffs = np.fft.fft(f.values) / n
    kint = np.fft.fftfreq(n, d=1.0 / n)
    nyq = n // 2
    coeffs_main = coeffs.copy()
    coeffs_main[nyq] = 0.0
    theta = 2 * np.pi * np.mod(pts - grid.x_min, grid.length) / grid.length
    out = np.empty(pts.shape, dtype=np.complex128)
    flat_theta = theta.ravel()
    flat_out = out.ravel()
    for start in range(0, flat_theta.size, _RESAMPLE_CHUNK):
        th = flat_theta[start:start + _RESAMPLE_CHUNK]
        phase = np.exp(1j * np.outer(th, kint))
        flat_out[start:start + _RESAMPLE_CHUNK] = (
            phase @ coeffs_main + coeffs[nyq] * np.cos(nyq * th)
        )
    out = flat_out.reshape(pts.shape)
    return out if np.ndim(points) else out[0]


def write_field_csv(f: ComplexField, path=None) -> str:
    """Serialise a field; returns the text and writes it when ``path`` is given."""
    buf = io.StringIO()
    g = f.grid
    buf.write(
        f"# time={_fmt(f.time)} x_min={_fmt(g.x_min)} x_max={_fmt(g.x_max)} "
        f"n_points={g.n_points}\n"
    )
    buf.write("x,re_u,im_u,abs_u_sq\n")
    for xi, v in zip(g.x, f.values):
        buf.write(
            f"{_fmt(xi)},{_fmt(v.real)},{_fmt(v.imag)},{_fmt(v.real**2 + v.imag**2)}\n"
        )
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_field_csv(path) -> ComplexField:
    lines = Path(path).read_text().splitlines()
    if len(lines) < 2 or not lines[0].startswith("#"):
        raise ConfigurationError(f"{path}: missing field header line")
    meta = {}
    for tok in lines[0][1:].split():
        key, _, val = tok.partition("=")
        meta[key] = val
    try:
        grid = Grid1D(float(meta["x_min"]), float(meta["x_max"]), int(meta["n_points"]))
        time = float(meta["time"])
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"{path}: bad field header: {exc}") from exc
    if lines[1].strip() != "x,re_u,im_u,abs_u_sq":
        raise ConfigurationError(f"{path}: unexpected column header {lines[1]!r}")
    rows = np.array([[float(c) for c in ln.split(",")] for ln in lines[2:] if ln.strip()])
    if rows.shape != (grid.n_points, 4):
        raise ConfigurationError(f"{path}: expected {grid.n_points} data rows")
    return ComplexField(grid, time, rows[:, 1] + 1j * rows[:, 2])
