import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlsconf import equations as E
from nlsconf import solutions as S
from nlsconf import transforms as T
from nlsconf.errors import AccuracyWarning, ConfigurationError, DomainError, ParameterError
from nlsconf.field import ComplexField, make_grid
from nlsconf.verification import residual_of_family

RNG = np.random.default_rng(11)


def _close(tr_a, tr_b, t, x, tol=1e-12):
    Ta, Xa = tr_a.apply(t, x)
    Tb, Xb = tr_b.apply(t, x)
    assert np.max(np.abs(np.asarray(Ta) - Tb)) <= tol
    assert np.max(np.abs(np.asarray(Xa) - Xb)) <= tol
    assert np.max(np.abs(tr_a.multiplier(t, x) - tr_b.multiplier(t, x))) <= tol


@pytest.mark.parametrize("tr", [T.dilatation(1), T.expansion(0), T.time_translation(0),
                                T.accelerated_frame(0), T.niederer_map(1.3)])
def test_trivial_parameters_are_identity(tr):
    t = np.array([0.0]) if tr.name == "niederer" else RNG.uniform(-0.4, 0.4, 50)
    x = RNG.uniform(-5, 5, t.shape)
    _close(tr, T.identity(), t, x, tol=1e-15)


def test_dilatation_example():
    tr = T.dilatation(2)
    assert tr.apply(1, 1) == (4, 2)
    assert tr.multiplier(1, 1) == pytest.approx(math.sqrt(2))
    with pytest.raises(ParameterError):
        T.dilatation(0)


def test_expansion_example():
    tr = T.expansion(1)
    TT, XX = tr.apply(0.5, 1)
    assert (TT, XX) == (pytest.approx(1), pytest.approx(2))
    assert tr.push_multiplier(0.5, 1) == pytest.approx(math.sqrt(0.5) * np.exp(0.5j), abs=1e-14)
    with pytest.raises(DomainError):
        tr.apply(1.0, 0.0)


def test_time_translation_example():
    assert T.time_translation(1).apply(0, 3) == (1, 3)


def test_d_map_examples():
    tr = T.d_map()
    assert tr.apply(1, 0) == (-1, 0)
    assert tr.multiplier(1, 0) == pytest.approx(1)
    assert tr.apply(1, 2) == (-1, -2)
    assert tr.multiplier(1, 2) == pytest.approx(np.exp(1j))
    for bad in (0.0, -1.0):
        with pytest.raises(DomainError):
            tr.apply(bad, 0.0)


def test_accelerated_frame_example():
    tr = T.accelerated_frame(1)
    assert tr.apply(1, 0) == (1, 2)
    assert tr.multiplier(1, 0) == pytest.approx(np.exp(-4j / 3))


def test_niederer_example():
    tr = T.niederer_map(1)
    TT, XX = tr.apply(math.pi / 4, 1)
    assert TT == pytest.approx(1) and XX == pytest.approx(math.sqrt(2))
    # (cos wt)^{-1/2} exp(-i w x^2 tan(wt) / 4)
    assert tr.multiplier(math.pi / 4, 1) == pytest.approx(2**0.25 * np.exp(-0.25j))
    with pytest.raises(DomainError):
        tr.apply(math.pi / 2, 0.0)


@pytest.mark.xfail(strict=True, reason="literal 2^{-1/4} modulus contradicts the map's unitarity")
def test_niederer_example_literal_modulus():
    assert T.niederer_map(1).multiplier(math.pi / 4, 1) == pytest.approx(2**-0.25 * np.exp(-0.25j))


def test_niederer_is_unitary():
    # |m|^2 must equal dX/dx so that the L2 norm is carried over
    tr = T.niederer_map(0.8)
    t = RNG.uniform(-1.5, 1.5, 20) / 0.8
    assert np.allclose(np.abs(tr.multiplier(t, 0.3)) ** 2, 1 / np.cos(0.8 * t))


def test_d_map_factorization():
    t = RNG.uniform(0.1, 10, 1000)
    x = RNG.uniform(-10, 10, 1000)
    _close(T.d_map(), T.d_map_factorized(), t, x, tol=1e-11)


@pytest.mark.parametrize("tr,lo,hi", [
    (T.dilatation(1.7), -5, 5),
    (T.dilatation(-0.6), -5, 5),
    (T.expansion(0.4), -2, 2),
    (T.time_translation(-1.3), -5, 5),
    (T.d_map(), 0.1, 5),
    (T.accelerated_frame(0.3), -3, 3),
    (T.niederer_map(2.0), -0.7, 0.7),
])
def test_inverse_consistency(tr, lo, hi):
    t = RNG.uniform(lo, hi, 1000)
    x = RNG.uniform(-10, 10, 1000)
    ok = np.asarray(tr.valid(t))
    t, x = t[ok], x[ok]
    TT, XX = tr.apply(t, x)
    inv = tr.inverse()
    t2, x2 = inv.apply(TT, XX)
    assert np.max(np.abs(t2 - t)) <= 1e-11 * (1 + np.max(np.abs(t)))
    assert np.max(np.abs(x2 - x)) <= 1e-10
    # composing with the inverse gives unit multiplier
    assert np.max(np.abs(tr.multiplier(t, x) * inv.multiplier(TT, XX) - 1)) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_expansion_group_law(k1, k2):
    t = np.linspace(-0.2, 0.2, 11)
    x = np.linspace(-3, 3, 11)
    _close(T.expansion(k1).then(T.expansion(k2)), T.expansion(k1 + k2), t, x, tol=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 3), st.floats(0.2, 3))
def test_dilatation_group_law(d1, d2):
    t = np.linspace(-1, 1, 7)
    x = np.linspace(-3, 3, 7)
    _close(T.dilatation(d1).then(T.dilatation(d2)), T.dilatation(d1 * d2), t, x, tol=1e-11)


def test_expansion_round_trip_composition():
    tr = T.expansion(0.7).then(T.expansion(-0.7))
    t = np.linspace(-0.5, 0.5, 9)
    _close(tr, T.identity(), t, t * 3 + 1, tol=1e-12)


def test_pull_back_equation_check():
    with pytest.raises(ConfigurationError):
        T.pull_back_solution(T.d_map(), S.standing_soliton(0, coupling=2))
    s = T.pull_back_solution(T.d_map(), S.standing_soliton(0))
    assert s.equation.label == "nls(F=1/t)"
    with pytest.raises(DomainError):
        s.evaluate(-1.0, 0.0)


def test_pull_back_matches_closed_form():
    p = T.pull_back_solution(T.d_map(), S.standing_soliton(0.4))
    d = S.d_transformed_soliton(0.4)
    t = RNG.uniform(0.2, 5, 500)
    x = RNG.uniform(-20, 20, 500)
    assert np.max(np.abs(p(t, x) - d(t, x))) <= 1e-12


@pytest.mark.parametrize("tr,source,eq,times", [
    (T.expansion(0.3), S.gaussian_packet(), E.free_linear(), [-1.0, 0.5, 2.0]),
    (T.dilatation(1.5), S.gaussian_packet(), E.free_linear(), [0.0, 0.4]),
    (T.accelerated_frame(0.5, nonlinear=False), S.gaussian_packet(), E.linear_potential(0.5),
     [0.0, 0.5, 1.0]),
])
def test_intertwining_residuals(tr, source, eq, times):
    u = T.pull_back_solution(tr, source, check_equation=False)
    rep = residual_of_family(u, eq, make_grid(-60, 60, 2048), times)
    assert rep.relative_residual <= 1e-8


def test_push_identity_bitwise():
    g = make_grid(-5, 5, 32)
    f = ComplexField(g, 0.7, RNG.normal(size=32) + 1j * RNG.normal(size=32))
    out = T.push_field(T.identity(), f, g)
    assert out.time == 0.7
    np.testing.assert_array_equal(out.values, f.values)


def test_push_dilatation_plane_wave():
    g = make_grid(-math.pi, math.pi, 64)
    f = ComplexField(g, 0.0, np.exp(3j * g.x))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        out = T.push_field(T.dilatation(2), f, g)
    # u(t, x) = sqrt(2) U(4t, 2x)
    assert np.max(np.abs(out.values - math.sqrt(2) * np.exp(6j * g.x))) <= 1e-10


def test_push_warns_when_source_window_exceeded():
    g = make_grid(-math.pi, math.pi, 64)
    f = ComplexField(g, 0.0, np.exp(1j * g.x))
    with pytest.warns(AccuracyWarning):
        T.push_field(T.dilatation(2), f, g)


@pytest.mark.parametrize("tr,T0", [
    (T.expansion(0.3), 0.5),
    (T.niederer_map(1.0), 0.8),
    (T.accelerated_frame(0.3), 0.6),
    (T.d_map(), -1.5),
])
def test_push_round_trip(tr, T0):
    g = make_grid(-40, 40, 1024)
    f = S.evaluate_on_grid(S.gaussian_packet(), g, T0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        u = T.push_field(tr, f, g, outside="zero")
        back = T.push_field(tr.inverse(), u, g, outside="zero")
    assert back.time == pytest.approx(T0)
    assert np.max(np.abs(back.values - f.values)) <= 1e-8


def test_push_matches_pull_back():
    g = make_grid(-30, 30, 1024)
    tr = T.d_map()
    src = S.standing_soliton(0.0)
    f = S.evaluate_on_grid(src, g, -1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        u = T.push_field(tr, f, g, outside="zero")
    assert u.time == pytest.approx(1.0)
    exact = T.pull_back_solution(tr, src).evaluate(1.0, g.x)
    assert np.max(np.abs(u.values - exact)) <= 1e-10


def test_transform_lookup():
    assert T.by_name("expansion", kappa=0.5).params == {"kappa": 0.5}
    with pytest.raises(ParameterError):
        T.by_name("galilei")
    with pytest.raises(ParameterError):
        T.by_name("expansion", delta=1)
    assert T.d_map().describe()["validity"] == "t > 0"
