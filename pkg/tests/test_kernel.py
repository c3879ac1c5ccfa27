import numpy as np
import pytest

from solab.errors import OverflowDetected
from solab.kernel import (
    GridFn,
    cn,
    derivative,
    fd_weights,
    integrate_cumulative,
    sn,
    solve_linear_ode2,
    solve_linear_ode2_with_derivative,
)

from .oracles import cosh_series, sinh_series

# frozen via the exponential-series oracle (see oracles.py)
SINH_1 = 1.1752011936438016
COSH_1 = 1.5430806348152437
SINH_2 = 3.626860407847018


def test_oracle_constants_are_what_the_series_says():
    assert sinh_series(1.0) == pytest.approx(SINH_1, abs=1e-15)
    assert cosh_series(1.0) == pytest.approx(COSH_1, abs=1e-15)
    assert sinh_series(2.0) == pytest.approx(SINH_2, abs=1e-14)


# ---------------------------------------------------------------------------
# sn / cn
# ---------------------------------------------------------------------------

def test_sn_flat_case_is_identity():
    assert sn(0.0, 2.5) == 2.5


def test_sn_positive_curvature():
    assert sn(1.0, np.pi / 2) == pytest.approx(1.0, abs=1e-15)


def test_sn_negative_curvature_matches_series_oracle():
    assert sn(-1.0, 1.0) == pytest.approx(SINH_1, abs=1e-14)


def test_cn_flat_case():
    assert cn(0.0, 7.0) == 1.0


def test_cn_positive_curvature():
    assert cn(1.0, np.pi) == pytest.approx(-1.0, abs=1e-15)


def test_cn_negative_curvature_matches_series_oracle():
    # cn_{-4}(0.5) = cosh(2 * 0.5) = cosh(1)
    assert cn(-4.0, 0.5) == pytest.approx(COSH_1, abs=1e-14)


def test_sn_cn_continuous_in_k_at_zero():
    t = 1.7
    for k in (1e-13, -1e-13):
        assert sn(k, t) == pytest.approx(t, abs=1e-12)
        assert cn(k, t) == pytest.approx(1.0, abs=1e-12)
    # no jump where the series branch hands over to the closed forms
    for k in (3.3e-9, -3.3e-9):  # |k| t^2 straddles the 1e-8 cutoff near t ~ 1.74
        for tt in (1.70, 1.78):
            assert sn(k, tt) == pytest.approx(tt * (1 - k * tt**2 / 6), abs=1e-13)
            assert cn(k, tt) == pytest.approx(1 - k * tt**2 / 2, abs=1e-13)


def test_pythagorean_identity_all_sign_cases():
    rng = np.random.default_rng(7)
    for _ in range(200):
        k = rng.uniform(-4.0, 4.0)
        t = rng.uniform(-2.0, 2.0)
        assert cn(k, t) ** 2 + k * sn(k, t) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_sn_solves_its_ode_against_rk4():
    rng = np.random.default_rng(11)
    for _ in range(8):
        k = rng.uniform(-4.0, 4.0)
        Q = GridFn.constant(-k, 0.0, 2.0, 2001)
        y = solve_linear_ode2(Q, 0.0, 1.0)
        assert np.max(np.abs(y.values - sn(k, y.grid))) < 1e-8


# ---------------------------------------------------------------------------
# derivative
# ---------------------------------------------------------------------------

def test_fd_weights_reproduce_classic_tables():
    np.testing.assert_allclose(
        fd_weights(np.arange(-2, 3), 0.0, 1), np.array([1, -8, 0, 8, -1]) / 12.0, atol=1e-13
    )
    np.testing.assert_allclose(
        fd_weights(np.arange(-2, 3), 0.0, 2), np.array([-1, 16, -30, 16, -1]) / 12.0, atol=1e-13
    )
    np.testing.assert_allclose(
        fd_weights(np.arange(5), 0.0, 1), np.array([-25, 48, -36, 16, -3]) / 12.0, atol=1e-13
    )


def test_derivative_exact_on_quadratic():
    f = GridFn.from_callable(lambda t: t**2, 0.0, 1.0, 101)
    df = derivative(f, 1)
    assert np.max(np.abs(df.values - 2.0 * df.grid)) < 1e-10


def test_derivative_constant_is_zero():
    f = GridFn.constant(3.0, 0.0, 1.0, 51)
    assert np.max(np.abs(derivative(f, 1).values)) < 1e-12


def test_second_derivative_of_sine():
    f = GridFn.from_callable(np.sin, 0.0, np.pi, 400)
    d2 = derivative(f, 2)
    assert np.max(np.abs(d2.values + np.sin(d2.grid))) < 1e-8


def test_derivative_fourth_order_convergence():
    errs = []
    for n in (101, 201):
        f = GridFn.from_callable(np.exp, 0.0, 1.0, n)
        errs.append(np.max(np.abs(derivative(f, 1).values - np.exp(f.grid))))
    assert errs[0] / errs[1] > 12.0  # ~2^4


# ---------------------------------------------------------------------------
# integrate_cumulative
# ---------------------------------------------------------------------------

def test_cumulative_of_one():
    F = integrate_cumulative(GridFn.constant(1.0, 0.0, 2.0, 201))
    assert F.values[0] == 0.0
    assert F.values[-1] == pytest.approx(2.0, abs=1e-13)


def test_cumulative_of_cos():
    F = integrate_cumulative(GridFn.from_callable(np.cos, 0.0, np.pi / 2, 401))
    assert F.values[-1] == pytest.approx(1.0, abs=1e-10)


def test_cumulative_exact_on_cubic():
    F = integrate_cumulative(GridFn.from_callable(lambda t: t**3, 0.0, 1.0, 101))
    assert F.values[-1] == pytest.approx(0.25, abs=1e-12)
    # every prefix is cubic-exact, odd indices included
    exact = F.grid**4 / 4.0
    assert np.max(np.abs(F.values - exact)) < 1e-13


def test_derivative_inverts_cumulative():
    for fn in (np.sin, lambda t: np.exp(-t) * np.cos(3 * t)):
        f = GridFn.from_callable(fn, 0.0, np.pi, 2001)
        back = derivative(integrate_cumulative(f), 1)
        assert np.max(np.abs(back.values - f.values)) < 1e-8


def test_second_derivative_of_cumulative_is_smooth():
    # d2/dt2 of the running integral should recover f' without an
    # even/odd sawtooth from the final-subinterval correction
    f = GridFn.from_callable(np.sin, 0.0, np.pi, 2001)
    d2 = derivative(integrate_cumulative(f), 2)
    assert np.max(np.abs(d2.values - np.cos(d2.grid))) < 1e-7


# ---------------------------------------------------------------------------
# solve_linear_ode2
# ---------------------------------------------------------------------------

def test_ode_zero_potential_gives_line():
    y = solve_linear_ode2(GridFn.constant(0.0, 0.0, 1.0, 101), 0.0, 1.0)
    assert np.max(np.abs(y.values - y.grid)) < 1e-12


def test_ode_unit_potential_gives_sinh():
    y = solve_linear_ode2(GridFn.constant(1.0, 0.0, 2.0, 2001), 0.0, 1.0)
    assert y.values[-1] == pytest.approx(SINH_2, abs=1e-9)


def test_ode_negative_potential_gives_cos():
    y = solve_linear_ode2(GridFn.constant(-1.0, 0.0, np.pi, 2001), 1.0, 0.0)
    assert y.values[-1] == pytest.approx(-1.0, abs=1e-8)


def test_ode_variable_coefficient_against_reference():
    from .oracles import rk4_scalar_ode2

    Q = GridFn.from_callable(lambda t: 1.0 + t**2, 0.0, 2.0, 2001)
    y = solve_linear_ode2(Q, 0.0, 1.0)
    ref, _ = rk4_scalar_ode2(lambda t: 1.0 + t * t, 0.0, 1.0, 0.0, 2.0, 4000)
    assert y.values[-1] == pytest.approx(ref, rel=1e-9)


def test_ode_overflow_detection():
    with pytest.raises(OverflowDetected):
        solve_linear_ode2(GridFn.constant(400.0, 0.0, 40.0, 2001), 0.0, 1.0)


def test_ode_derivative_channel():
    y, v = solve_linear_ode2_with_derivative(GridFn.constant(1.0, 0.0, 2.0, 2001), 0.0, 1.0)
    assert v.values[0] == 1.0
    assert v.values[-1] == pytest.approx(np.cosh(2.0), abs=1e-9)


# ---------------------------------------------------------------------------
# GridFn plumbing
# ---------------------------------------------------------------------------

def test_gridfn_rejects_too_few_samples():
    with pytest.raises(ValueError):
        GridFn(0.0, 1.0, np.zeros(8))


def test_gridfn_rejects_infinities():
    v = np.zeros(11)
    v[3] = np.inf
    with pytest.raises(ValueError):
        GridFn(0.0, 1.0, v)


def test_gridfn_interpolation_accuracy():
    f = GridFn.from_callable(np.sin, 0.0, np.pi, 2001)
    t = np.linspace(0.1, 3.0, 77)
    assert np.max(np.abs(f.eval(t) - np.sin(t))) < 1e-11
    assert f.eval(0.5) == pytest.approx(np.sin(0.5), abs=1e-11)


def test_gridfn_arithmetic():
    f = GridFn.from_callable(np.sin, 0.0, 1.0, 51)
    g = GridFn.from_callable(np.cos, 0.0, 1.0, 51)
    np.testing.assert_allclose((f * g).values, np.sin(f.grid) * np.cos(f.grid))
    np.testing.assert_allclose((f + 2.0).values, np.sin(f.grid) + 2.0)
    np.testing.assert_allclose((1.0 - f).values, 1.0 - np.sin(f.grid))
    with pytest.raises(ValueError):
        f + GridFn.from_callable(np.cos, 0.0, 2.0, 51)
