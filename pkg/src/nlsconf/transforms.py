"""Schrodinger-group and gauge transformations acting on solutions and fields.

Convention: a transform pulls a solution U of ``equation_out`` back to a
solution of ``equation_in`` via

    u(t, x) = multiplier(t, x) * U(T, X),   (T, X) = coord_map(t, x).

Every transform is fibered: T depends on t alone.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import equations as eqs
from .equations import EquationSpec
from .errors import AccuracyWarning, ConfigurationError, DomainError, ParameterError
from .field import ComplexField, Grid1D, resample
from .solutions import SolutionFamily

# boundary amplitude (relative to max) below which out-of-window data counts as zero
_EDGE_TOL = 1e-10


def _all_t(t):
    return np.ones(np.shape(t), dtype=bool)


@dataclass(frozen=True)
class SpacetimeTransform:
    name: str
    params: dict
    coord_map: Callable = field(repr=False)
    inverse_coord_map: Callable = field(repr=False)
    multiplier: Callable = field(repr=False)
    valid: Callable = field(default=_all_t, repr=False)
    validity: str = "all t"
    equation_in: EquationSpec = field(default_factory=eqs.free_linear, repr=False)
    equation_out: EquationSpec = field(default_factory=eqs.free_linear, repr=False)

    def check(self, t) -> None:
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            ok = np.asarray(self.valid(t))
        if not np.all(ok):
            bad = np.ravel(t)[~np.ravel(ok)][0] if t.ndim else float(t)
            raise DomainError(f"{self.name}: t={bad!r} outside validity domain ({self.validity})")

    def apply(self, t, x):
        """(T, X) for (t, x), raising DomainError off the validity domain."""
        self.check(t)
        return self.coord_map(np.asarray(t, dtype=float), np.asarray(x, dtype=float))

    def time_map(self, t: float) -> float:
        self.check(t)
        return float(self.coord_map(float(t), 0.0)[0])

    def inverse_time_map(self, T: float) -> float:
        with np.errstate(all="ignore"):
            t = float(self.inverse_coord_map(float(T), 0.0)[0])
        if not math.isfinite(t):
            raise DomainError(f"{self.name}: T={T!r} has no preimage")
        self.check(t)
        return t

    def push_multiplier(self, t, x):
        """Factor in U(T, X) = push_multiplier(t, x) * u(t, x)."""
        return 1.0 / self.multiplier(t, x)

    def then(self, other: "SpacetimeTransform") -> "SpacetimeTransform":
        """Apply ``self``'s coordinate map first, then ``other``'s."""
        a, b = self, other

        def coord(t, x):
            T1, X1 = a.coord_map(t, x)
            return b.coord_map(T1, X1)

        def inv(T, X):
            t1, x1 = b.inverse_coord_map(T, X)
            return a.inverse_coord_map(t1, x1)

        def mult(t, x):
            T1, X1 = a.coord_map(t, x)
            return a.multiplier(t, x) * b.multiplier(T1, X1)

        def valid(t):
            t = np.asarray(t, dtype=float)
            ok = np.asarray(a.valid(t))
            with np.errstate(all="ignore"):
                T1 = np.where(ok, a.coord_map(t, np.zeros_like(t))[0], 0.0)
                return ok & np.asarray(b.valid(T1)) & np.isfinite(T1)

        return SpacetimeTransform(
            name=f"{a.name}>{b.name}",
            params={"first": a.describe(), "then": b.describe()},
            coord_map=coord,
            inverse_coord_map=inv,
            multiplier=mult,
            valid=valid,
            validity=f"({a.validity}) and ({b.validity} after {a.name})",
            equation_in=a.equation_in,
            equation_out=b.equation_out,
        )

    def inverse(self) -> "SpacetimeTransform":
        tr = self

        def mult(T, X):
            t, x = tr.inverse_coord_map(T, X)
            return 1.0 / tr.multiplier(t, x)

        def valid(T):
            T = np.asarray(T, dtype=float)
            with np.errstate(all="ignore"):
                t = tr.inverse_coord_map(T, np.zeros_like(T))[0]
                fin = np.isfinite(t)
                ok = fin & np.asarray(tr.valid(np.where(fin, t, 0.0)))
                # preimage must map back (guards multi-branch maps)
                back = np.where(ok, tr.coord_map(np.where(ok, t, 0.0), np.zeros_like(T))[0], np.nan)
                return ok & np.isclose(back, T, rtol=1e-9, atol=1e-12)

        return SpacetimeTransform(
            name=f"inverse({tr.name})",
            params={"of": tr.describe()},
            coord_map=tr.inverse_coord_map,
            inverse_coord_map=tr.coord_map,
            multiplier=mult,
            valid=valid,
            validity=f"image of {tr.name}",
            equation_in=tr.equation_out,
            equation_out=tr.equation_in,
        )

    def describe(self) -> dict:
        return {"name": self.name, "parameters": dict(self.params), "validity": self.validity}

    to_json = describe


def identity() -> SpacetimeTransform:
    return SpacetimeTransform(
        name="identity",
        params={},
        coord_map=lambda t, x: (t, x),
        inverse_coord_map=lambda T, X: (T, X),
        multiplier=lambda t, x: np.ones(np.broadcast(t, x).shape) if np.ndim(x) else 1.0,
    )


def dilatation(delta: float) -> SpacetimeTransform:
    """(t, x) -> (delta^2 t, delta x), unitary multiplier |delta|^{1/2}."""
    d = float(delta)
    if d == 0 or not math.isfinite(d):
        raise ParameterError("dilatation needs a finite nonzero delta")
    m = math.sqrt(abs(d))
    return SpacetimeTransform(
        name="dilatation",
        params={"delta": d},
        coord_map=lambda t, x: (d * d * t, d * x),
        inverse_coord_map=lambda T, X: (T / (d * d), X / d),
        multiplier=lambda t, x: m * np.ones(np.broadcast(t, x).shape) if np.ndim(x) else m,
    )


def expansion(kappa: float) -> SpacetimeTransform:
    """(t, x) -> (t, x) / (1 - kappa t).

    The wave-function factor U(T,X) = |1-kt|^{1/2} exp[i k x^2 / 4(1-kt)] u(t,x)
    is the push multiplier; the pullback multiplier is its reciprocal. The
    positive real root of |1 - kt| is used on both sides of the singular time.
    """
    k = float(kappa)

    def coord(t, x):
        s = 1.0 - k * t
        return t / s, x / s

    def inv(T, X):
        s = 1.0 + k * T
        return T / s, X / s

    def mult(t, x):
        s = 1.0 - k * t
        return np.exp(-1j * k * x * x / (4 * s)) / np.sqrt(np.abs(s))

    return SpacetimeTransform(
        name="expansion",
        params={"kappa": k},
        coord_map=coord,
        inverse_coord_map=inv,
        multiplier=mult,
        valid=lambda t: 1.0 - k * np.asarray(t) != 0,
        validity="kappa*t != 1",
    )


def time_translation(epsilon: float, equation: EquationSpec | None = None) -> SpacetimeTransform:
    e = float(epsilon)
    out = equation if equation is not None else eqs.free_linear()
    return SpacetimeTransform(
        name="time_translation",
        params={"epsilon": e},
        coord_map=lambda t, x: (t + e, x),
        inverse_coord_map=lambda T, X: (T - e, X),
        multiplier=lambda t, x: np.ones(np.broadcast(t, x).shape) if np.ndim(x) else 1.0,
        equation_in=out.shifted(e),
        equation_out=out,
    )


def d_map(nonlinear: bool = True) -> SpacetimeTransform:
    """(t, x) -> (-1/t, -x/t) with multiplier t^{-1/2} exp(i x^2 / 4t), t > 0.

    Nonlinear: carries solutions of the F = 1 NLS to solutions of the F = 1/t NLS.
    """
    return SpacetimeTransform(
        name="d_map",
        params={},
        coord_map=lambda t, x: (-1.0 / t, -x / t),
        inverse_coord_map=lambda T, X: (-1.0 / T, X / T),
        multiplier=lambda t, x: np.exp(1j * x * x / (4 * t)) / np.sqrt(t),
        valid=lambda t: np.asarray(t) > 0,
        validity="t > 0",
        equation_in=eqs.reciprocal_nls(0.0, 1.0) if nonlinear else eqs.free_linear(),
        equation_out=eqs.nls(1.0) if nonlinear else eqs.free_linear(),
    )


def d_map_factorized() -> SpacetimeTransform:
    """Time translation by 1, expansion with kappa = 1, time translation by 1."""
    return time_translation(1.0).then(expansion(1.0)).then(time_translation(1.0))


def accelerated_frame(alpha: float, nonlinear: bool = True) -> SpacetimeTransform:
    """Uniformly accelerated frame: (t, x) -> (t, x + 2 alpha t^2).

    Nonlinear: maps the F = 2 NLS onto the NLS in the potential V = 2 alpha x.
    """
    al = float(alpha)
    return SpacetimeTransform(
        name="accelerated_frame",
        params={"alpha": al},
        coord_map=lambda t, x: (t, x + 2 * al * t * t),
        inverse_coord_map=lambda T, X: (T, X - 2 * al * T * T),
        multiplier=lambda t, x: np.exp(-1j * (2 * al * x * t + 4.0 / 3.0 * al * al * t**3)),
        equation_in=eqs.linear_potential_nls(al, 2.0) if nonlinear else eqs.linear_potential(al),
        equation_out=eqs.nls(2.0) if nonlinear else eqs.free_linear(),
    )


def niederer_map(omega: float, nonlinear: bool = True) -> SpacetimeTransform:
    """(t, x) -> (tan(wt)/w, x / cos(wt)), restricted to |wt| < pi/2.

    Nonlinear: maps the F = 1 NLS onto the oscillator NLS with coupling 1/cos(wt).
    """
    w = float(omega)
    if not w > 0:
        raise ParameterError(f"niederer map needs omega > 0, got {omega}")

    def coord(t, x):
        return np.tan(w * t) / w, x / np.cos(w * t)

    def inv(T, X):
        t = np.arctan(w * T) / w
        return t, X * np.cos(w * t)

    def mult(t, x):
        c = np.cos(w * t)
        return np.exp(-0.25j * w * x * x * np.tan(w * t)) / np.sqrt(c)

    return SpacetimeTransform(
        name="niederer",
        params={"omega": w},
        coord_map=coord,
        inverse_coord_map=inv,
        multiplier=mult,
        valid=lambda t: np.abs(w * np.asarray(t)) < math.pi / 2,
        validity="|omega*t| < pi/2",
        equation_in=eqs.oscillator_nls(w) if nonlinear else eqs.oscillator_linear(w),
        equation_out=eqs.nls(1.0) if nonlinear else eqs.free_linear(),
    )


def by_name(name: str, **params) -> SpacetimeTransform:
    table = {
        "identity": identity,
        "dilatation": dilatation,
        "expansion": expansion,
        "time_translation": time_translation,
        "d_map": d_map,
        "accelerated_frame": accelerated_frame,
        "niederer": niederer_map,
        "niederer_map": niederer_map,
    }
    try:
        factory = table[name]
    except KeyError:
        raise ParameterError(f"unknown transform {name!r}; known: {sorted(table)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ParameterError(f"bad parameters for transform {name!r}: {exc}") from None


def pull_back_solution(tr: SpacetimeTransform, s: SolutionFamily,
                       check_equation: bool = True) -> SolutionFamily:
    """u(t, x) = multiplier(t, x) * s(coord_map(t, x)), labelled with ``tr.equation_in``."""
    if check_equation and tr.name != "identity" and s.equation.label != tr.equation_out.label:
        raise ConfigurationError(
            f"{tr.name} expects a solution of {tr.equation_out.label}, "
            f"got one of {s.equation.label}"
        )

    def valid(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            ok = np.asarray(tr.valid(t))
            T = np.where(ok, tr.coord_map(np.where(ok, t, 0.0), np.zeros_like(t))[0], 0.0)
            return ok & np.isfinite(T) & np.asarray(s.valid(T))

    def formula(t, x):
        T, X = tr.coord_map(t, x)
        return tr.multiplier(t, x) * s.formula(T, X)

    return SolutionFamily(
        kind=f"{tr.name}[{s.kind}]" if tr.name != "identity" else s.kind,
        params={"transform": tr.describe(), "source": s.describe()},
        formula=formula,
        equation=tr.equation_in if tr.name != "identity" else s.equation,
        valid=valid,
        domain=f"({tr.validity}) and source valid at T",
    )


def push_field(tr: SpacetimeTransform, f: ComplexField, target_grid: Grid1D,
               outside: str = "wrap") -> ComplexField:
    """Sampled counterpart of :func:`pull_back_solution`.

    ``f`` holds U at time T = f.time. Returns u(t, .) on ``target_grid`` at the
    preimage time t, resampling U trigonometrically at the mapped points X.
    Points mapped outside f's window are reduced modulo the period
    (``outside="wrap"``) or set to zero (``outside="zero"``, for decaying data).
    """
    if outside not in ("wrap", "zero"):
        raise ConfigurationError(f"outside must be 'wrap' or 'zero', got {outside!r}")
    t = tr.inverse_time_map(f.time)
    x = target_grid.x
    T, X = tr.coord_map(t, x)
    X = np.broadcast_to(np.asarray(X, dtype=float), x.shape)
    src = f.grid
    if target_grid == src and np.array_equal(X, src.x):
        vals = np.array(f.values)
    else:
        vals = resample(f, X)
        out_mask = (X < src.x_min) | (X >= src.x_max)
        if np.any(out_mask):
            scale = f.max_abs()
            edge = max(abs(f.values[0]), abs(f.values[-1]))
            if scale > 0 and edge > _EDGE_TOL * scale:
                warnings.warn(
                    f"{tr.name}: mapped points leave the source window while the source "
                    f"field is not negligible at its edges ({edge:.3g} of max {scale:.3g})",
                    AccuracyWarning,
                    stacklevel=2,
                )
            if outside == "zero":
                vals[out_mask] = 0.0
    vals = tr.multiplier(t, x) * vals
    return ComplexField(target_grid, t, vals)
