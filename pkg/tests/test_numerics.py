import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sgflow.errors import GridError, QuadratureError, SolverError, ValidationError
from sgflow.numerics import (
    TridiagonalSystem,
    adaptive_quad,
    cumulative_integral,
    fd_apply_L,
    fd_derivative,
    fd_weights,
    panel_quad,
    solve_tridiagonal,
    uniform_spacing,
)


def test_adaptive_quad_smooth():
    res = adaptive_quad(math.sin, 0.0, math.pi, abs_tol=1e-12)
    assert res.value == pytest.approx(2.0, abs=1e-12)
    assert res.abs_error_estimate <= 1e-12
    assert res.evaluations > 0


def test_adaptive_quad_limits():
    assert adaptive_quad(math.exp, 1.0, 1.0).value == 0.0
    with pytest.raises(ValidationError):
        adaptive_quad(math.exp, 1.0, 0.0)
    with pytest.raises(ValidationError):
        adaptive_quad(math.exp, 0.0, math.inf)


def test_adaptive_quad_gives_up():
    with pytest.raises(QuadratureError):
        adaptive_quad(lambda x: 1.0 / math.sqrt(x) if x > 0 else 1e300, 0.0, 1.0, abs_tol=1e-14, max_depth=8)


def test_panel_quad_matches_exact():
    edges = np.linspace(0.0, 2.0, 9)
    vals, errs = panel_quad(np.exp, edges, abs_tol=1e-13)
    exact = np.exp(edges[1:]) - np.exp(edges[:-1])
    assert np.max(np.abs(vals - exact)) <= 1e-13
    assert errs.sum() <= 1e-13


def test_panel_quad_with_index():
    edges = np.array([0.0, 1.0, 2.0])
    vals, _ = panel_quad(lambda x, k: x * (k + 1), edges, with_index=True)
    assert vals == pytest.approx([0.5, 3.0], abs=1e-14)


def test_panel_quad_rejects_bad_edges():
    with pytest.raises(ValidationError):
        panel_quad(np.exp, [1.0, 0.0])


def test_tridiagonal_solve():
    rng = np.random.default_rng(0)
    n = 50
    sys_ = TridiagonalSystem(rng.uniform(-1, 1, n - 1), rng.uniform(3, 4, n), rng.uniform(-1, 1, n - 1), rng.normal(size=n))
    x = solve_tridiagonal(sys_)
    assert np.max(np.abs(sys_.matvec(x) - sys_.rhs)) <= 1e-12


def test_tridiagonal_singular():
    sys_ = TridiagonalSystem(np.zeros(2), np.zeros(3), np.zeros(2), np.ones(3))
    with pytest.raises(SolverError):
        solve_tridiagonal(sys_)


def test_tridiagonal_shape_checks():
    with pytest.raises(ValidationError):
        TridiagonalSystem(np.zeros(1), np.ones(2), np.zeros(1), np.ones(2))
    with pytest.raises(ValidationError):
        TridiagonalSystem(np.zeros(3), np.ones(3), np.zeros(2), np.ones(3))


def test_fd_weights_central():
    c = fd_weights(0.0, [-1.0, 0.0, 1.0], 2)
    assert c[1] == pytest.approx([-0.5, 0.0, 0.5])
    assert c[2] == pytest.approx([1.0, -2.0, 1.0])


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_fd_derivative_on_polynomials(order):
    x = np.linspace(0.0, 1.0, 41)
    # degree order+3 is reproduced exactly by accuracy-4 stencils
    p = np.polynomial.Polynomial(np.arange(1.0, order + 5.0))
    got = fd_derivative(p(x), x, order)
    assert np.max(np.abs(got - p.deriv(order)(x))) <= 1e-6 * max(1.0, np.max(np.abs(p.deriv(order)(x))))


def test_fd_derivative_parity_mirror():
    x = np.linspace(0.0, 1.0, 101)
    got = fd_derivative(np.cos(x), x, 2, parity=1)
    assert np.max(np.abs(got + np.cos(x))) <= 1e-7


def test_fd_derivative_order_convergence():
    errs = []
    for n in (51, 101, 201):
        x = np.linspace(0.0, 1.0, n)
        errs.append(np.max(np.abs(fd_derivative(np.sin(3 * x), x, 1) - 3 * np.cos(3 * x))))
    rate = math.log2(errs[1] / errs[2])
    assert 3.5 <= rate <= 4.8


def test_fd_apply_L_poiseuille():
    s = np.linspace(0.0, 1.0, 201)
    # L(1 - s^2) = -4 for L = d2 + (1/s) d
    assert np.max(np.abs(fd_apply_L(1.0 - s**2, s, "poiseuille") + 4.0)) <= 1e-9


def test_fd_apply_L_couette_rigid():
    s = np.linspace(0.0, 1.0, 201)
    assert np.max(np.abs(fd_apply_L(s, s, "couette"))) <= 1e-9


def test_uniform_spacing_errors():
    with pytest.raises(GridError):
        uniform_spacing(np.array([0.0, 0.1, 0.3]))
    with pytest.raises(GridError):
        uniform_spacing(np.array([0.0]))


def test_cumulative_integral_cubic_exact():
    x = np.linspace(0.2, 1.0, 17)
    f = 1 + x - 2 * x**2 + 3 * x**3
    F = x + x**2 / 2 - 2 * x**3 / 3 + 3 * x**4 / 4
    assert np.max(np.abs(cumulative_integral(f, x) - (F - F[0]))) <= 1e-14


def test_cumulative_integral_small_grids():
    assert cumulative_integral([1.0, 1.0], [0.0, 2.0]) == pytest.approx([0.0, 2.0])
    x = np.array([0.0, 0.5, 1.0])
    assert cumulative_integral(x**2, x)[-1] == pytest.approx(1.0 / 3.0)


@given(st.lists(st.floats(-10, 10), min_size=4, max_size=4))
def test_quadrature_exact_on_cubics(coefs):
    p = np.polynomial.Polynomial(coefs)
    exact = p.integ()(1.0) - p.integ()(0.0)
    assert adaptive_quad(p, 0.0, 1.0).value == pytest.approx(exact, abs=1e-9)
    vals, _ = panel_quad(p, [0.0, 0.5, 1.0])
    assert vals.sum() == pytest.approx(exact, abs=1e-9)
