"""PDE residuals, field comparison and intertwining checks."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .equations import EquationSpec
from .errors import ConfigurationError
from .field import ComplexField, Grid1D, _dx
from .solutions import SolutionFamily

DEFAULT_THRESHOLD = 1e-6
# relative t-step for the 5-point stencil; step = H_REL * (|t| + 1)
H_REL = 1e-5


@dataclass(frozen=True)
class ResidualReport:
    equation_label: str
    times_checked: list
    max_residual: float
    l2_residual: float
    relative_residual: float
    method: str
    threshold: float = DEFAULT_THRESHOLD

    @property
    def passed(self) -> bool:
        return self.relative_residual <= self.threshold

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _pointwise_residual(u, u_t, grid: Grid1D, eq: EquationSpec, t: float):
    x = grid.x
    u_xx = _dx(u, grid, 2)
    F = np.broadcast_to(eq.F(t, x), x.shape)
    V = np.broadcast_to(eq.V(t, x), x.shape)
    nonlin = F * np.abs(u) ** 2 * u
    R = 1j * u_t + u_xx + nonlin - V * u
    scale = max(float(np.max(np.abs(nonlin))), float(np.max(np.abs(u_xx))))
    return R, scale


def _summarise(label, times, residuals, scales, grid, method, threshold):
    maxes = [float(np.max(np.abs(R))) for R in residuals]
    rel = [m / s if s > 0 else (0.0 if m == 0 else math.inf) for m, s in zip(maxes, scales)]
    l2 = math.sqrt(sum(grid.spacing * float(np.sum(np.abs(R) ** 2)) for R in residuals))
    return ResidualReport(
        equation_label=label,
        times_checked=[float(t) for t in times],
        max_residual=max(maxes) if maxes else 0.0,
        l2_residual=l2,
        relative_residual=max(rel) if rel else 0.0,
        method=method,
        threshold=threshold,
    )


def time_derivative(s: SolutionFamily, t: float, x: np.ndarray, h: float | None = None):
    """Fourth-order central difference of an exact family in t."""
    if h is None:
        h = H_REL * (abs(t) + 1.0)
    f = s.evaluate
    return (-f(t + 2 * h, x) + 8 * f(t + h, x) - 8 * f(t - h, x) + f(t - 2 * h, x)) / (12 * h)


def residual_of_family(s: SolutionFamily, eq: EquationSpec, grid: Grid1D, times,
                       h: float | None = None,
                       threshold: float = DEFAULT_THRESHOLD) -> ResidualReport:
    """R = i u_t + u_xx + F|u|^2 u - V u for an exact family, sampled on ``grid``.

    u_xx is spectral; u_t uses a 5-point stencil with step ``h`` (default
    1e-5 * (|t| + 1)). The relative figure divides max|R| by
    max(max|F|u|^2 u|, max|u_xx|) at each time.
    """
    x = grid.x
    residuals, scales = [], []
    for t in times:
        t = float(t)
        eq.check_time(t)
        u = s.evaluate(t, x)
        u_t = time_derivative(s, t, x, h)
        R, scale = _pointwise_residual(u, u_t, grid, eq, t)
        residuals.append(R)
        scales.append(scale)
    return _summarise(eq.label, times, residuals, scales, grid, "spectral_x_fd_t", threshold)


def residual_of_trajectory(tr, eq: EquationSpec,
                           threshold: float = DEFAULT_THRESHOLD) -> ResidualReport:
    """Residual at interior snapshots with centred snapshot-to-snapshot t-differences."""
    snaps, times = tr.snapshots, list(tr.times)
    if len(snaps) < 3:
        raise ConfigurationError("residual_of_trajectory needs at least 3 snapshots")
    grid = snaps[0].grid
    residuals, scales = [], []
    for j in range(1, len(snaps) - 1):
        t0, t1, t2 = times[j - 1], times[j], times[j + 1]
        h0, h1 = t1 - t0, t2 - t1
        u0, u1, u2 = snaps[j - 1].values, snaps[j].values, snaps[j + 1].values
        # second-order three-point derivative on a possibly nonuniform stencil
        u_t = (-h1 / (h0 * (h0 + h1)) * u0 + (h1 - h0) / (h0 * h1) * u1
               + h0 / (h1 * (h0 + h1)) * u2)
        eq.check_time(t1)
        R, scale = _pointwise_residual(u1, u_t, grid, eq, t1)
        residuals.append(R)
        scales.append(scale)
    return _summarise(eq.label, times[1:-1], residuals, scales, grid,
                      "spectral_x_fd_t", threshold)


def compare_fields(a: ComplexField, b: ComplexField, mod_global_phase: bool = False) -> float:
    """Max-norm difference, optionally minimised over one global phase e^{i theta}."""
    if a.grid != b.grid:
        raise ConfigurationError("compare_fields: grids differ")
    if abs(a.time - b.time) > 1e-12 * max(1.0, abs(a.time)):
        raise ConfigurationError(f"compare_fields: times differ ({a.time!r} vs {b.time!r})")
    va, vb = a.values, b.values
    if not mod_global_phase:
        return float(np.max(np.abs(va - vb)))
    overlap = np.vdot(vb, va)
    theta0 = float(np.angle(overlap)) if overlap != 0 else 0.0

    def err(theta):
        return float(np.max(np.abs(va - np.exp(1j * theta) * vb)))

    best = err(theta0)
    res = minimize_scalar(err, bracket=(theta0 - 1e-3, theta0, theta0 + 1e-3),
                          options={"xtol": 1e-14})
    if res.success and res.fun < best:
        best = float(res.fun)
    return best


def intertwining_reports(tr, source: SolutionFamily, grid_in: Grid1D, times_in,
                         grid_out: Grid1D, times_out, threshold: float = DEFAULT_THRESHOLD):
    """Check both directions of an intertwining claim.

    The pullback of ``source`` must solve ``tr.equation_in``; pulling that back
    again through the inverse transform must solve ``tr.equation_out``.
    """
    from .transforms import pull_back_solution

    forward = pull_back_solution(tr, source)
    rep_in = residual_of_family(forward, tr.equation_in, grid_in, times_in, threshold=threshold)
    back = pull_back_solution(tr.inverse(), forward)
    rep_out = residual_of_family(back, tr.equation_out, grid_out, times_out, threshold=threshold)
    return rep_in, rep_out
