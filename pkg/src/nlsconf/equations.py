"""Coefficient records for i u_t + u_xx + F(t,x)|u|^2 u - V(t,x) u = 0."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, ParameterError


def _g(v: float) -> str:
    return format(float(v), ".17g")


def _no_poles(t0: float, t1: float) -> list[float]:
    return []


def _zero(t, x):
    return 0.0


@dataclass(frozen=True)
class EquationSpec:
    """One member of the variable-coefficient cubic NLS family.

    ``F`` and ``V`` take (t, x) with x possibly an array; a scalar return is
    broadcast. ``F_t``/``F_tt`` are analytic t-derivatives, present whenever F
    depends on t alone. ``poles(t0, t1)`` lists coefficient singularities in
    the closed interval.
    """

    label: str
    F: Callable = field(compare=False)
    V: Callable = field(default=_zero, compare=False)
    F_t: Callable | None = field(default=None, compare=False)
    F_tt: Callable | None = field(default=None, compare=False)
    poles: Callable[[float, float], list] = field(default=_no_poles, compare=False)
    autonomous: bool = field(default=False, compare=False)
    kind: str = field(default="custom", compare=False)
    params: dict = field(default_factory=dict, compare=False)

    def check_time(self, t: float) -> None:
        if self.poles(t, t):
            raise DomainError(f"{self.label}: coefficient singular at t={t!r}")

    def check_interval(self, t0: float, t1: float) -> None:
        lo, hi = min(t0, t1), max(t0, t1)
        bad = self.poles(lo, hi)
        if bad:
            raise DomainError(
                f"{self.label}: coefficient singular at t={bad[0]!r} inside [{lo!r}, {hi!r}]"
            )

    def shifted(self, eps: float) -> "EquationSpec":
        """Equation satisfied by u(t,x) = U(t+eps, x) when U solves ``self``."""
        if eps == 0:
            return self
        F, V = self.F, self.V
        return EquationSpec(
            label=f"{self.label}@t+{_g(eps)}",
            F=lambda t, x: F(t + eps, x),
            V=lambda t, x: V(t + eps, x),
            F_t=None if self.F_t is None else (lambda t, _f=self.F_t: _f(t + eps)),
            F_tt=None if self.F_tt is None else (lambda t, _f=self.F_tt: _f(t + eps)),
            poles=lambda t0, t1: [p - eps for p in self.poles(t0 + eps, t1 + eps)],
            autonomous=self.autonomous,
            kind=self.kind,
            params={**self.params, "shift": eps},
        )

    def describe(self) -> dict:
        return {"label": self.label, "kind": self.kind, "params": dict(self.params)}


def nls(coupling: float = 1.0) -> EquationSpec:
    """Constant-coefficient cubic NLS i u_t + u_xx + c|u|^2 u = 0."""
    c = float(coupling)
    return EquationSpec(
        label=f"nls(F={_g(c)})",
        F=lambda t, x: c,
        F_t=lambda t: 0.0,
        F_tt=lambda t: 0.0,
        autonomous=True,
        kind="nls",
        params={"coupling": c},
    )


def free_linear() -> EquationSpec:
    return EquationSpec(
        label="free",
        F=lambda t, x: 0.0,
        F_t=lambda t: 0.0,
        F_tt=lambda t: 0.0,
        autonomous=True,
        kind="free",
    )


def reciprocal_nls(a: float = 0.0, b: float = 1.0) -> EquationSpec:
    """Cubic NLS with F = 1/(a + b t); (a, b) = (0, 1) is the 1/t equation."""
    a, b = float(a), float(b)
    if a == 0 and b == 0:
        raise ParameterError("reciprocal-linear coupling needs (a, b) != (0, 0)")

    def poles(t0, t1):
        if b == 0:
            return []
        tp = -a / b
        return [tp] if t0 <= tp <= t1 else []

    label = "nls(F=1/t)" if (a, b) == (0.0, 1.0) else f"nls(F=1/({_g(a)}+{_g(b)}t))"
    return EquationSpec(
        label=label,
        F=lambda t, x: 1.0 / (a + b * t),
        F_t=lambda t: -b / (a + b * t) ** 2,
        F_tt=lambda t: 2 * b * b / (a + b * t) ** 3,
        poles=poles,
        autonomous=(b == 0),
        kind="reciprocal-linear",
        params={"a": a, "b": b},
    )


def linear_potential_nls(alpha: float, coupling: float = 2.0) -> EquationSpec:
    """i u_t + u_xx + (-2 alpha x + c|u|^2) u = 0; c = 2 is the accelerated-frame case."""
    al, c = float(alpha), float(coupling)
    return EquationSpec(
        label=f"linear-potential(alpha={_g(al)},F={_g(c)})",
        F=lambda t, x: c,
        V=lambda t, x: 2 * al * np.asarray(x),
        F_t=lambda t: 0.0,
        F_tt=lambda t: 0.0,
        autonomous=True,
        kind="linear-potential",
        params={"alpha": al, "coupling": c},
    )


def _cos_poles(omega: float):
    def poles(t0, t1):
        # zeros of cos(omega t): omega t = pi/2 + m pi
        lo, hi = sorted((omega * t0, omega * t1))
        m0 = math.ceil((lo - math.pi / 2) / math.pi - 1e-12)
        out = []
        m = m0
        while (p := math.pi / 2 + m * math.pi) <= hi + 1e-12:
            if p >= lo - 1e-12:
                out.append(p / omega)
            m += 1
        return out

    return poles


def oscillator_nls(omega: float) -> EquationSpec:
    """i u_t + u_xx + (-omega^2 x^2/4 + |u|^2 / cos(omega t)) u = 0."""
    w = float(omega)
    if not w > 0:
        raise ParameterError(f"omega must be positive, got {omega}")
    return EquationSpec(
        label=f"oscillator-nls(omega={_g(w)})",
        F=lambda t, x: 1.0 / math.cos(w * t),
        V=lambda t, x: 0.25 * w * w * np.asarray(x) ** 2,
        F_t=lambda t: w * math.sin(w * t) / math.cos(w * t) ** 2,
        F_tt=lambda t: w * w * (1 + math.sin(w * t) ** 2) / math.cos(w * t) ** 3,
        poles=_cos_poles(w),
        kind="oscillator-nls",
        params={"omega": w},
    )


def oscillator_linear(omega: float) -> EquationSpec:
    """Linear oscillator i u_t + u_xx - omega^2 x^2/4 u = 0."""
    w = float(omega)
    if not w > 0:
        raise ParameterError(f"omega must be positive, got {omega}")
    return EquationSpec(
        label=f"oscillator(omega={_g(w)})",
        F=lambda t, x: 0.0,
        V=lambda t, x: 0.25 * w * w * np.asarray(x) ** 2,
        F_t=lambda t: 0.0,
        F_tt=lambda t: 0.0,
        autonomous=True,
        kind="oscillator",
        params={"omega": w},
    )


def linear_potential(alpha: float) -> EquationSpec:
    """Linear Schrodinger equation in a uniform force field, V = 2 alpha x."""
    return linear_potential_nls(alpha, coupling=0.0)


def by_name(name: str, **params) -> EquationSpec:
    """Look up an equation by the short names used in run configs."""
    table = {
        "nls": nls,
        "free": free_linear,
        "reciprocal-linear": reciprocal_nls,
        "reciprocal": lambda: reciprocal_nls(0.0, 1.0),
        "linear-potential": linear_potential_nls,
        "oscillator-nls": oscillator_nls,
        "oscillator": oscillator_linear,
    }
    try:
        factory = table[name]
    except KeyError:
        raise ParameterError(f"unknown equation {name!r}; known: {sorted(table)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ParameterError(f"bad parameters for equation {name!r}: {exc}") from None
