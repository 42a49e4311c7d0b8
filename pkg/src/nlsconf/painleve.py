"""Leading-order balance, resonances and compatibility conditions of the
Weiss-Tabor-Carnevale expansion for i u_t + u_xx + F(t)|u|^2 u = 0.

The expansion u = sum u_n xi^{n-1}, v = u* = sum v_n xi^{n-1} around the
singular manifold xi = x + psi(t) is evaluated numerically at sample times.
Closed forms for the n = 3 and n = 4 compatibility conditions are evaluated
term by term; :func:`recurrence_residual` re-derives the low orders directly
from the general recurrence as an independent check.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .errors import BalanceError, ConfigurationError, DomainError, NumericalError

SQRT2 = math.sqrt(2.0)
DEFAULT_TIMES = tuple(np.linspace(0.1, 2.0, 24))
# reciprocal-linear samples closer than this to the pole are rejected
POLE_MARGIN = 0.05


class ResidualFigure(NamedTuple):
    raw: float
    relative: float

    def __float__(self):
        return self.raw


def _d1(f, t, h=None):
    h = 1e-3 * (1.0 + abs(t)) if h is None else h
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h)


def _d2(f, t, h=None):
    h = 5e-3 * (1.0 + abs(t)) if h is None else h
    return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) / (12 * h * h)


def _rel(raw: np.ndarray, scale: np.ndarray) -> float:
    raw = np.asarray(raw, dtype=float)
    scale = np.asarray(scale, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(scale > 0, raw / scale, np.where(raw == 0, 0.0, np.inf))
    return float(np.max(r)) if r.size else 0.0


@dataclass(frozen=True)
class CoefficientF:
    F: Callable = field(repr=False)
    F_t: Callable = field(repr=False)
    F_tt: Callable = field(repr=False)
    label: str = "F"
    singular: Callable | None = field(default=None, repr=False)
    params: dict = field(default_factory=dict)

    def check_samples(self, times) -> None:
        for t in times:
            if self.singular is not None and self.singular(t):
                raise DomainError(f"{self.label}: sample t={t!r} too close to a singularity")
            val = self.F(t)
            if not math.isfinite(val):
                raise DomainError(f"{self.label}: F({t!r}) is not finite")
            if val == 0:
                raise BalanceError(f"{self.label}: F vanishes at t={t!r}")

    def check_derivatives(self, times, rtol: float = 1e-6) -> None:
        """Compare the supplied F_t, F_tt with finite differences of F."""
        for t in times:
            f, ft, ftt = self.F(t), self.F_t(t), self.F_tt(t)
            scale = max(abs(f), abs(ft), abs(ftt), 1e-300)
            if abs(_d1(self.F, t) - ft) > rtol * scale:
                raise ConfigurationError(f"{self.label}: F_t inconsistent with F at t={t!r}")
            if abs(_d2(self.F, t) - ftt) > rtol * scale:
                raise ConfigurationError(f"{self.label}: F_tt inconsistent with F at t={t!r}")


def reciprocal_linear(a: float, b: float) -> CoefficientF:
    a, b = float(a), float(b)
    if a == 0 and b == 0:
        raise ConfigurationError("reciprocal-linear needs (a, b) != (0, 0)")
    return CoefficientF(
        F=lambda t: 1.0 / (a + b * t),
        F_t=lambda t: -b / (a + b * t) ** 2,
        F_tt=lambda t: 2 * b * b / (a + b * t) ** 3,
        label=f"1/({a:g}+{b:g}t)",
        singular=lambda t: abs(a + b * t) <= POLE_MARGIN,
        params={"a": a, "b": b},
    )


def constant(c: float = 1.0) -> CoefficientF:
    c = float(c)
    return CoefficientF(lambda t: c, lambda t: 0.0, lambda t: 0.0, f"{c:g}", params={"c": c})


def power(n: float) -> CoefficientF:
    """F = t^n (sample times must be positive for non-integer n)."""
    n = float(n)
    return CoefficientF(
        F=lambda t: t**n,
        F_t=lambda t: n * t ** (n - 1) if n != 0 else 0.0,
        F_tt=lambda t: n * (n - 1) * t ** (n - 2) if n not in (0.0, 1.0) else 0.0,
        label=f"t^{n:g}",
        singular=(lambda t: t <= 0) if n != int(n) or n < 0 else None,
        params={"n": n},
    )


def exponential(rate: float = 1.0) -> CoefficientF:
    r = float(rate)
    return CoefficientF(
        F=lambda t: math.exp(r * t),
        F_t=lambda t: r * math.exp(r * t),
        F_tt=lambda t: r * r * math.exp(r * t),
        label=f"exp({r:g}t)",
        params={"rate": r},
    )


def sine_plus(offset: float = 2.0) -> CoefficientF:
    c = float(offset)
    return CoefficientF(
        F=lambda t: math.sin(t) + c,
        F_t=lambda t: math.cos(t),
        F_tt=lambda t: -math.sin(t),
        label=f"sin(t)+{c:g}",
        params={"offset": c},
    )


def from_table(times, values, label: str = "table") -> CoefficientF:
    """Tabulated F interpolated by a cubic spline (derivatives from the spline)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape != values.shape or times.size < 4:
        raise ConfigurationError("user table needs >= 4 matching (t, F) samples")
    if np.any(np.diff(times) <= 0):
        raise ConfigurationError("user table times must be strictly increasing")
    cs = CubicSpline(times, values)
    d1, d2 = cs.derivative(1), cs.derivative(2)
    lo, hi = times[0], times[-1]
    return CoefficientF(
        F=lambda t: float(cs(t)),
        F_t=lambda t: float(d1(t)),
        F_tt=lambda t: float(d2(t)),
        label=label,
        singular=lambda t: not (lo <= t <= hi),
        params={"n_samples": int(times.size)},
    )


def by_name(name: str, **params) -> CoefficientF:
    table = {
        "reciprocal-linear": reciprocal_linear,
        "constant": constant,
        "power": power,
        "exponential": exponential,
        "sine-plus": sine_plus,
        "user-table": from_table,
    }
    try:
        factory = table[name]
    except KeyError:
        raise ConfigurationError(f"unknown coefficient family {name!r}; known: {sorted(table)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {name!r}: {exc}") from None


@dataclass(frozen=True)
class SingularManifold:
    """xi = x + psi(t); only psi_t and psi_tt enter the expansion."""

    psi: Callable = field(repr=False)
    psi_t: Callable = field(repr=False)
    psi_tt: Callable = field(repr=False)
    label: str = "psi"

    def check_derivatives(self, times, rtol: float = 1e-6) -> None:
        for t in times:
            p, pt, ptt = self.psi(t), self.psi_t(t), self.psi_tt(t)
            scale = max(abs(p), abs(pt), abs(ptt), 1e-300)
            if abs(_d1(self.psi, t) - pt) > rtol * scale or abs(_d2(self.psi, t) - ptt) > rtol * scale:
                raise ConfigurationError(f"{self.label}: derivatives inconsistent at t={t!r}")


def static_manifold(c: float = 0.0) -> SingularManifold:
    return SingularManifold(lambda t: c, lambda t: 0.0, lambda t: 0.0, f"psi={c:g}")


def polynomial_manifold(*coeffs: float) -> SingularManifold:
    """psi(t) = c0 + c1 t + c2 t^2 + ..."""
    p = np.polynomial.Polynomial(coeffs or (0.0,))
    d1, d2 = p.deriv(1), p.deriv(2)
    return SingularManifold(
        lambda t: float(p(t)), lambda t: float(d1(t)), lambda t: float(d2(t)),
        label=f"psi=poly{tuple(float(c) for c in coeffs)}",
    )


DEFAULT_MANIFOLD = polynomial_manifold(0.0, 0.3, 0.5)


def constant_u0(value: complex = SQRT2) -> Callable:
    return lambda t: complex(value)


def resonance_determinant(n: int) -> int:
    """Determinant of the 2x2 system fixing (u_n, v_n)."""
    return n * (n - 4) * (n - 3) * (n + 1)


def resonances(lo: int = -1, hi: int = 6) -> list[int]:
    return [n for n in range(lo, hi + 1) if resonance_determinant(n) == 0]


@dataclass(frozen=True)
class WtcCoefficients:
    times: np.ndarray
    F: np.ndarray
    psi_t: np.ndarray
    u0: np.ndarray
    v0: np.ndarray
    u0_t: np.ndarray
    v0_t: np.ndarray
    u1: np.ndarray
    v1: np.ndarray
    u2: np.ndarray
    v2: np.ndarray

    def u(self, n: int) -> np.ndarray:
        return {0: self.u0, 1: self.u1, 2: self.u2}.get(n, np.zeros_like(self.u0)) if n >= 0 else np.zeros_like(self.u0)

    def v(self, n: int) -> np.ndarray:
        return {0: self.v0, 1: self.v1, 2: self.v2}.get(n, np.zeros_like(self.v0)) if n >= 0 else np.zeros_like(self.v0)

    def balance(self) -> np.ndarray:
        return self.F * self.u0 * self.v0


def _prepare(F: CoefficientF, u0: Callable, times):
    times = np.asarray(list(times), dtype=float)
    if times.size == 0:
        raise ConfigurationError("no sample times")
    F.check_samples(times)
    for t in times:
        if u0(t) == 0:
            raise BalanceError(f"u0 vanishes at t={t!r}")
    return times


def wtc_coefficients(F: CoefficientF, m: SingularManifold, u0: Callable, times) -> WtcCoefficients:
    """Leading coefficients u0..u2, v0..v2 with v0 fixed by F u0 v0 = -2."""
    times = _prepare(F, u0, times)

    def v0f(t):
        return -2.0 / (F.F(t) * u0(t))

    Fv = np.array([F.F(t) for t in times])
    pt = np.array([m.psi_t(t) for t in times])
    U0 = np.array([u0(t) for t in times], dtype=complex)
    V0 = np.array([v0f(t) for t in times], dtype=complex)
    U0t = np.array([_d1(u0, t) for t in times], dtype=complex)
    V0t = np.array([_d1(v0f, t) for t in times], dtype=complex)
    u1 = -0.5j * U0 * pt
    v1 = 0.5j * V0 * pt
    w = U0 * V0 * pt**2
    u2 = (1j * V0t * U0 + 2j * U0t * V0 - 0.5 * w) / (6 * V0)
    v2 = (-1j * U0t * V0 - 2j * V0t * U0 - 0.5 * w) / (6 * U0)
    return WtcCoefficients(times, Fv, pt, U0, V0, U0t, V0t, u1, v1, u2, v2)


def _triple(a, b, c, total: int):
    """Terms a_i b_j c_l with i + j + l = total (ordered index triples)."""
    terms = []
    for i in range(total + 1):
        for j in range(total + 1 - i):
            terms.append(a(i) * b(j) * c(total - i - j))
    return terms


def recurrence_residual(c: WtcCoefficients, k: int) -> float:
    """Relative residual of the xi^k coefficient of both expanded equations.

    u: i(u_{k+1,t} + (k+1) u_{k+2} xi_t) + (k+2)(k+1) u_{k+3} + F sum u_i u_j v_l
    v: i(v_{k+1,t} + (k+1) v_{k+2} xi_t) - (k+2)(k+1) v_{k+3} - F sum v_i v_j u_l
    with i + j + l = k + 3. Only k <= -1 is supported (coefficients up to n = 2).
    """
    if not -3 <= k <= -1:
        raise ConfigurationError("recurrence_residual supports k in {-3, -2, -1}")
    zero = np.zeros_like(c.u0)
    du = c.u0_t if k + 1 == 0 else zero
    dv = c.v0_t if k + 1 == 0 else zero
    xt = c.psi_t
    u_terms = [1j * du, 1j * (k + 1) * c.u(k + 2) * xt, (k + 2) * (k + 1) * c.u(k + 3)]
    u_terms += [c.F * term for term in _triple(c.u, c.u, c.v, k + 3)]
    v_terms = [1j * dv, 1j * (k + 1) * c.v(k + 2) * xt, -(k + 2) * (k + 1) * c.v(k + 3)]
    v_terms += [-c.F * term for term in _triple(c.v, c.v, c.u, k + 3)]
    out = 0.0
    for terms in (u_terms, v_terms):
        arr = np.array(terms)
        raw = np.abs(arr.sum(axis=0))
        scale = np.max(np.abs(arr), axis=0)
        out = max(out, _rel(raw, scale))
    return out


def _samples(F: CoefficientF, m: SingularManifold, times):
    return (
        np.array([F.F(t) for t in times]),
        np.array([F.F_t(t) for t in times]),
        np.array([F.F_tt(t) for t in times]),
        np.array([m.psi_t(t) for t in times]),
        np.array([m.psi_tt(t) for t in times]),
    )


def resonance3_residual(F: CoefficientF, m: SingularManifold, u0: Callable, times) -> ResidualFigure:
    """|A3 v0 - B3 u0| from 2F A3 = u0(F_t xi_t - F xi_tt), u0 F^2 B3 = F xi_tt - F_t xi_t."""
    times = _prepare(F, u0, times)
    f, ft, _, xt, xtt = _samples(F, m, times)
    U0 = np.array([u0(t) for t in times], dtype=complex)
    V0 = -2.0 / (f * U0)
    A3 = U0 * (ft * xt - f * xtt) / (2 * f)
    B3 = (f * xtt - ft * xt) / (U0 * f * f)
    lhs, rhs = A3 * V0, B3 * U0
    raw = np.abs(lhs - rhs)
    return ResidualFigure(float(raw.max()), _rel(raw, np.maximum(np.abs(lhs), np.abs(rhs))))


def resonance4_terms(F: CoefficientF, m: SingularManifold, u0: Callable, times,
                     verbatim: bool = False):
    """Term lists of 6 u0 F^2 A4 and 3 u0^3 F^3 B4 at each sample.

    The last two terms carry u0^2 F_t^2; ``verbatim=True`` reproduces the
    printed variant with a single power of u0 there, which makes the n = 4
    condition depend on u0.
    """
    times = _prepare(F, u0, times)
    f, ft, ftt, xt, xtt = _samples(F, m, times)
    U0 = np.array([u0(t) for t in times], dtype=complex)
    U0t = np.array([_d1(u0, t) for t in times], dtype=complex)
    U0tt = np.array([_d2(u0, t) for t in times], dtype=complex)
    common = [
        -f**2 * U0t**2,
        -2j * U0**2 * f**2 * xt * xtt,
        U0 * f**2 * U0tt,
        1j * U0**2 * f * xt**2 * ft,
        -U0 * f * U0t * ft,
    ]
    w = U0 if verbatim else U0**2
    na = common + [2 * w * ft**2, -U0**2 * f * ftt]
    nb = common + [-4 * w * ft**2, 2 * U0**2 * f * ftt]
    return times, f, U0, na, nb


def resonance4_residual(F: CoefficientF, m: SingularManifold, u0: Callable, times,
                        verbatim: bool = False) -> ResidualFigure:
    """|v0 A4 + u0 B4|, which reduces to |F F_tt - 2 F_t^2| / |F|^3."""
    times, f, U0, na, nb = resonance4_terms(F, m, u0, times, verbatim)
    V0 = -2.0 / (f * U0)
    ka = V0 / (6 * U0 * f**2)
    kb = U0 / (3 * U0**3 * f**3)
    ta = np.array([ka * term for term in na])
    tb = np.array([kb * term for term in nb])
    raw = np.abs(ta.sum(axis=0) + tb.sum(axis=0))
    scale = np.maximum(np.abs(ta).max(axis=0), np.abs(tb).max(axis=0))
    return ResidualFigure(float(raw.max()), _rel(raw, scale))


class ConstraintFigure(NamedTuple):
    raw: float
    relative: float
    inverse_tt: float

    def __float__(self):
        return self.raw


def integrability_constraint(F: CoefficientF, times) -> ConstraintFigure:
    """max |2 F_t^2 - F F_tt| over samples, plus max |(1/F)_tt| by differences."""
    times = np.asarray(list(times), dtype=float)
    F.check_samples(times)
    f = np.array([F.F(t) for t in times])
    ft = np.array([F.F_t(t) for t in times])
    ftt = np.array([F.F_tt(t) for t in times])
    a, b = 2 * ft**2, f * ftt
    raw = np.abs(a - b)
    inv_tt = max(abs(_d2(lambda s: 1.0 / F.F(s), t)) for t in times)
    return ConstraintFigure(float(raw.max()), _rel(raw, np.maximum(np.abs(a), np.abs(b))), float(inv_tt))


@dataclass(frozen=True)
class WtcReport:
    label: str
    resonances: list
    det_values: dict
    constraint_residual: float
    constraint_relative: float
    res3_residual: float
    res3_relative: float
    res4_residual: float
    res4_relative: float
    inverse_F_tt: float
    tolerance: float
    verdict: str
    times: list

    @property
    def passes(self) -> bool:
        return self.verdict == "passes"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["det_values"] = {str(k): v for k, v in self.det_values.items()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def run_wtc_test(F: CoefficientF, m: SingularManifold | None = None, u0: Callable | None = None,
                 times=None, tolerance: float = 1e-8) -> WtcReport:
    if not tolerance > 0:
        raise ConfigurationError("tolerance must be positive")
    m = DEFAULT_MANIFOLD if m is None else m
    u0 = constant_u0() if u0 is None else u0
    times = list(DEFAULT_TIMES if times is None else times)
    con = integrability_constraint(F, times)
    r3 = resonance3_residual(F, m, u0, times)
    r4 = resonance4_residual(F, m, u0, times)
    ok = max(con.relative, r3.relative, r4.relative) <= tolerance
    return WtcReport(
        label=F.label,
        resonances=resonances(),
        det_values={n: resonance_determinant(n) for n in range(-1, 7)},
        constraint_residual=con.raw,
        constraint_relative=con.relative,
        res3_residual=r3.raw,
        res3_relative=r3.relative,
        res4_residual=r4.raw,
        res4_relative=r4.relative,
        inverse_F_tt=con.inverse_tt,
        tolerance=tolerance,
        verdict="passes" if ok else "fails",
        times=[float(t) for t in times],
    )


def variable_coefficient_condition(p: CoefficientF, F: CoefficientF, a: float, b: float,
                                   times, lower: float = 0.0) -> float:
    """max |p - F (a + b int_lower^t p ds)| over the sample times."""
    out = 0.0
    for t in times:
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                P, _ = integrate.quad(p.F, lower, float(t), epsabs=1e-14, epsrel=1e-13, limit=200)
            except integrate.IntegrationWarning as exc:
                raise NumericalError(f"quadrature of p failed up to t={t!r}: {exc}") from exc
        out = max(out, abs(p.F(t) - F.F(t) * (a + b * P)))
    return float(out)


def sample_reciprocal_params(rng: np.random.Generator, count: int, times=DEFAULT_TIMES,
                             margin: float = POLE_MARGIN) -> list[tuple[float, float]]:
    """Random (a, b) with |a + b t| > margin on every sample time."""
    out = []
    times = np.asarray(times, dtype=float)
    while len(out) < count:
        a, b = rng.uniform(-3, 3, size=2)
        if np.min(np.abs(a + b * times)) > margin:
            out.append((float(a), float(b)))
    return out
