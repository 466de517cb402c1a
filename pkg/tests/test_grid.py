import numpy as np
import pytest

from beambvp.errors import DomainError, NonFiniteError
from beambvp.grid import (
    GridFunction,
    deriv1_left,
    deriv1_right,
    deriv2_left,
    deriv3_left,
    fd_slopes,
)


def _poly_values(coeffs, n):
    t = np.linspace(0.0, 1.0, n)
    return np.polyval(coeffs, t), t, 1.0 / (n - 1)


@pytest.mark.parametrize("degree", range(5))
def test_first_derivative_stencils_exact_through_degree_four(degree):
    rng = np.random.default_rng(degree)
    coeffs = rng.uniform(-2.0, 2.0, degree + 1)
    v, t, h = _poly_values(coeffs, 21)
    dcoeffs = np.polyder(coeffs)
    assert deriv1_left(v, h) == pytest.approx(np.polyval(dcoeffs, 0.0), abs=1e-11)
    assert deriv1_right(v, h) == pytest.approx(np.polyval(dcoeffs, 1.0), abs=1e-11)
    slopes = fd_slopes(v, h)
    assert np.allclose(slopes, np.polyval(dcoeffs, t), atol=1e-10)


@pytest.mark.parametrize("degree", range(9))
def test_second_derivative_wide_stencil_exact_through_degree_eight(degree):
    rng = np.random.default_rng(100 + degree)
    coeffs = rng.uniform(-2.0, 2.0, degree + 1)
    v, _, h = _poly_values(coeffs, 33)
    d2 = np.polyder(coeffs, 2)
    assert deriv2_left(v, h) == pytest.approx(np.polyval(d2, 0.0), abs=2e-8)


@pytest.mark.parametrize("degree", range(7))
def test_second_derivative_narrow_fallback_exact_through_degree_six(degree):
    rng = np.random.default_rng(200 + degree)
    coeffs = rng.uniform(-2.0, 2.0, degree + 1)
    v, _, h = _poly_values(coeffs, 13)
    d2 = np.polyder(coeffs, 2)
    assert deriv2_left(v, h) == pytest.approx(np.polyval(d2, 0.0), abs=1e-8)


@pytest.mark.parametrize("degree", range(7))
def test_third_derivative_exact_through_degree_six(degree):
    rng = np.random.default_rng(300 + degree)
    coeffs = rng.uniform(-2.0, 2.0, degree + 1)
    v, _, h = _poly_values(coeffs, 21)
    d3 = np.polyder(coeffs, 3)
    assert deriv3_left(v, h) == pytest.approx(np.polyval(d3, 0.0), abs=5e-7)


def test_grid_function_validation():
    with pytest.raises(DomainError):
        GridFunction(np.zeros(10))          # even
    with pytest.raises(DomainError):
        GridFunction(np.zeros(9))           # too small
    with pytest.raises(DomainError):
        GridFunction(np.zeros((11, 2)))     # not 1-d
    with pytest.raises(NonFiniteError):
        GridFunction(np.full(11, np.nan))


def test_values_are_read_only():
    u = GridFunction(np.linspace(0.0, 1.0, 11))
    with pytest.raises(ValueError):
        u.values[0] = 5.0


def test_basic_accessors():
    u = GridFunction(np.linspace(-0.5, 1.0, 31))
    assert u.n == 31
    assert u.h == pytest.approx(1.0 / 30.0)
    assert u.sup_norm() == 1.0
    assert u.min_value() == -0.5
    assert "GridFunction" in repr(u)


def test_call_scalar_and_array():
    t = np.linspace(0.0, 1.0, 21)
    u = GridFunction(t**2)
    assert isinstance(u(0.5), float)
    out = u(np.array([0.0, 0.25, 1.0]))
    assert out.shape == (3,)
    assert np.allclose(out, [0.0, 0.0625, 1.0], atol=1e-12)
    with pytest.raises(DomainError):
        u(1.0001)
    with pytest.raises(DomainError):
        u(np.array([0.2, -0.1]))


def test_interpolation_reproduces_nodes_exactly():
    rng = np.random.default_rng(17)
    vals = rng.uniform(-1.0, 1.0, 21)
    u = GridFunction(vals)
    assert np.allclose(u(u.grid), vals, atol=5e-15)


def test_interpolation_is_fourth_order():
    errs = []
    for n in (21, 41, 81):
        t = np.linspace(0.0, 1.0, n)
        u = GridFunction(np.sin(3.0 * t))
        fine = np.linspace(0.0, 1.0, 1009)
        errs.append(np.max(np.abs(u(fine) - np.sin(3.0 * fine))))
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(p >= 3.5 for p in orders)


def test_resample_round_trip():
    t = np.linspace(0.0, 1.0, 21)
    u = GridFunction(t**3 - t**2)
    fine = u.resample(81)
    assert fine.n == 81
    assert np.max(np.abs(fine.values - (fine.grid**3 - fine.grid**2))) < 1e-12
    back = fine.resample(21)
    assert np.max(np.abs(back.values - u.values)) < 1e-12
