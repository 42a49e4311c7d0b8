"""Closed-form solution families, exactly evaluable at any (t, x)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import equations as eqs
from .equations import EquationSpec
from .errors import DomainError, ParameterError
from .field import ComplexField, Grid1D

SQRT2 = math.sqrt(2.0)


def _always(t):
    return np.ones(np.shape(t), dtype=bool)


@dataclass(frozen=True)
class SolitonParams:
    x0: float = 0.0
    k: float = 0.0
    v: float = 1.0

    def __post_init__(self):
        if not self.k * self.k + self.v > 0:
            raise ParameterError(f"need k^2 + v > 0, got k={self.k}, v={self.v}")

    @property
    def a(self) -> float:
        return math.sqrt(self.k * self.k + self.v)


@dataclass(frozen=True)
class SolutionFamily:
    """A closed-form u(t, x) together with the equation it is claimed to solve.

    ``valid(t)`` returns a boolean mask; :meth:`evaluate` raises
    :class:`DomainError` when any requested time falls outside it.
    """

    kind: str
    params: dict
    formula: Callable = field(repr=False, compare=False)
    equation: EquationSpec = field(compare=False)
    valid: Callable = field(default=_always, repr=False, compare=False)
    domain: str = "all t"

    def evaluate(self, t, x):
        t_arr = np.asarray(t, dtype=float)
        if not np.all(self.valid(t_arr)):
            bad = t_arr[~np.asarray(self.valid(t_arr))] if t_arr.ndim else t_arr
            raise DomainError(
                f"{self.kind}: t={np.ravel(bad)[0]!r} outside validity domain ({self.domain})"
            )
        return self.formula(t_arr, np.asarray(x, dtype=float))

    __call__ = evaluate

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "params": dict(self.params),
            "equation": self.equation.label,
            "domain": self.domain,
        }


def standing_soliton(x0: float = 0.0, coupling: float = 1.0) -> SolutionFamily:
    """sqrt(2/c) e^{it} / cosh(x - x0), a solution of the NLS with F = c."""
    x0, c = float(x0), float(coupling)
    if not c > 0:
        raise ParameterError("standing soliton needs a focusing coupling c > 0")
    amp = math.sqrt(2.0 / c)

    def formula(t, x):
        return amp * np.exp(1j * t) / np.cosh(x - x0)

    return SolutionFamily(
        kind="standing",
        params={"x0": x0, "coupling": c},
        formula=formula,
        equation=eqs.nls(c),
    )


def travelling_soliton(p: SolitonParams, coupling: float = 1.0) -> SolutionFamily:
    """e^{i(vt - kx)} sqrt(2/c) a / cosh(a(x - x0 + 2kt)).

    The envelope moves with velocity -2k, the group velocity of e^{-ikx}
    under i u_t + u_xx = 0.
    """
    if not isinstance(p, SolitonParams):
        p = SolitonParams(**p)
    c = float(coupling)
    if not c > 0:
        raise ParameterError("travelling soliton needs a focusing coupling c > 0")
    a, k, v, x0 = p.a, p.k, p.v, p.x0
    amp = math.sqrt(2.0 / c) * a

    def formula(t, x):
        return np.exp(1j * (v * t - k * x)) * amp / np.cosh(a * (x - x0 + 2 * k * t))

    return SolutionFamily(
        kind="travelling",
        params={"x0": x0, "k": k, "v": v, "a": a, "coupling": c},
        formula=formula,
        equation=eqs.nls(c),
    )


def _positive_t(t):
    return np.asarray(t) > 0


def d_transformed_soliton(x0: float = 0.0) -> SolutionFamily:
    """Soliton of i u_t + u_xx + |u|^2 u / t = 0, defined for t > 0."""
    x0 = float(x0)

    def formula(t, x):
        return (
            np.exp(1j * (x * x / (4 * t) - 1 / t))
            / np.sqrt(t)
            * SQRT2
            / np.cosh(x / t + x0)
        )

    return SolutionFamily(
        kind="d_transformed_standing",
        params={"x0": x0},
        formula=formula,
        equation=eqs.reciprocal_nls(0.0, 1.0),
        valid=_positive_t,
        domain="t > 0",
    )


def gaussian_packet() -> SolutionFamily:
    """(1 + 4it)^{-1/2} exp[-x^2 / (1 + 4it)], a solution of i u_t + u_xx = 0."""

    def formula(t, x):
        z = 1 + 4j * t
        return np.exp(-x * x / z) / np.sqrt(z)

    return SolutionFamily(
        kind="gaussian",
        params={},
        formula=formula,
        equation=eqs.free_linear(),
    )


def custom(formula: Callable, equation: EquationSpec, *, valid=_always,
           domain: str = "all t", params: dict | None = None) -> SolutionFamily:
    return SolutionFamily("custom", params or {}, formula, equation, valid, domain)


def evaluate_on_grid(s: SolutionFamily, grid: Grid1D, t: float) -> ComplexField:
    return ComplexField(grid, t, s.evaluate(float(t), grid.x))


def by_name(name: str, **params) -> SolutionFamily:
    if name == "standing":
        return standing_soliton(**params)
    if name == "travelling":
        coupling = params.pop("coupling", 1.0)
        return travelling_soliton(SolitonParams(**params), coupling=coupling)
    if name in ("d_transformed", "d_transformed_standing"):
        return d_transformed_soliton(**params)
    if name == "gaussian":
        return gaussian_packet(**params)
    raise ParameterError(
        f"unknown family {name!r}; known: standing, travelling, d_transformed, gaussian"
    )
