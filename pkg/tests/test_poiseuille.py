import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgflow.errors import DomainError, GridError, ValidationError
from sgflow.material import LengthScales
from sgflow.poiseuille import (
    BoundaryCondition,
    PoiseuilleProblem,
    convergence_sweep,
    dimensional_velocity,
    make_profile,
    ode_residual,
    phi_classical,
    phi_quadrature,
    phi_strong,
    phi_weak,
    u_classical,
    u_profile,
    u_strong,
    u_weak,
    weak_boundary_residual,
    weak_coefficients,
    weak_derivatives,
)
from sgflow.profile import uniform_grid


def test_classical():
    s = np.array([0.0, 0.5, 1.0])
    assert list(u_classical(s)) == [1.0, 0.75, 0.0]
    assert phi_classical() == 1.0


def test_bc_parse():
    assert BoundaryCondition.parse("WEAK") is BoundaryCondition.WEAK
    assert BoundaryCondition.parse(BoundaryCondition.STRONG) is BoundaryCondition.STRONG
    with pytest.raises(ValidationError):
        BoundaryCondition.parse("slip")


@pytest.mark.parametrize("sigma", [0.0, 0.3, 0.9, 0.99])
def test_strong_vs_mpmath(sigma):
    lam = mp.mpf("0.05")
    z = 1 / lam
    ref = 1 - mp.mpf(sigma) ** 2 + 2 * lam * (mp.besseli(0, mp.mpf(sigma) / lam) - mp.besseli(0, z)) / mp.besseli(1, z)
    assert float(u_strong(sigma, 0.05)) == pytest.approx(float(ref), abs=1e-14)


def test_strong_tiny_lambda_no_overflow():
    s = uniform_grid(101)
    u = u_strong(s, 1e-3)
    assert np.all(np.isfinite(u))
    assert u[-1] == 0.0
    assert abs(u[50] - 0.75) < 1e-2


def test_weak_derivatives_match_fd():
    lam, l2, l3, l4 = 0.12, 0.05, 0.08, 0.06
    L = LengthScales(0.0, l2, l3, l4)
    s = np.array([0.2, 0.6, 0.95])
    h = 1e-5
    up = u_weak(s + h, L.ell1, l2, l3, l4)
    um = u_weak(s - h, L.ell1, l2, l3, l4)
    du, d2u = weak_derivatives(s, L.ell1, l2, l3, l4)
    assert du == pytest.approx((up - um) / (2 * h), abs=1e-7)
    assert d2u == pytest.approx((up - 2 * u_weak(s, L.ell1, l2, l3, l4) + um) / h**2, abs=1e-3)


def test_weak_inconsistent_lambdas():
    with pytest.raises((DomainError, ValidationError)):
        weak_coefficients(0.5, 0.1, 0.1, 0.1)


def test_weak_residual_and_den_positive():
    L = LengthScales(0.0, 0.2, 0.1, 0.0)
    a, b, den = weak_coefficients(L.ell1, L.ell2, L.ell3, L.ell4)
    assert den > 0
    assert a + b == pytest.approx(L.ell1**2)
    res, scale = weak_boundary_residual(L.ell1, L.ell2, L.ell3, L.ell4)
    assert abs(res) <= 1e-12 * max(scale, 1.0)


@pytest.mark.parametrize("bc", ["strong", "weak"])
def test_discharge_gap_small(bc):
    L = LengthScales.spherical(0.15)
    closed = phi_strong(0.15) if bc == "strong" else phi_weak(0.15, 0.0, 0.0, L.ell4)
    assert phi_quadrature(bc, L).value == pytest.approx(closed, abs=1e-10)


def test_dimensional_velocity_scaling():
    prob = PoiseuilleProblem(R=2.0, beta=3.0, mu=0.5, lengths=LengthScales.spherical(0.2))
    assert prob.lambda1 == pytest.approx(0.1)
    assert prob.velocity_scale == pytest.approx(3.0 * 4.0 / 2.0)
    r = np.array([0.0, 1.0, 2.0])
    assert dimensional_velocity(prob, r) == pytest.approx(prob.velocity_scale * u_strong(r / 2.0, 0.1))
    with pytest.raises(DomainError):
        dimensional_velocity(prob, 3.0)


def test_profile_dispatch_classical():
    s = uniform_grid(11)
    assert np.array_equal(u_profile(s, "weak", LengthScales()), u_classical(s))


def test_ode_residual_needs_grid():
    prof = make_profile("strong", LengthScales.spherical(0.1), uniform_grid(51))
    with pytest.raises(GridError):
        ode_residual(prof, 0.1)


def test_classical_residual():
    prof = make_profile("strong", LengthScales(), uniform_grid(401))
    assert ode_residual(prof, 0.0).sup <= 1e-9


def test_sweep_validation():
    with pytest.raises(ValidationError):
        convergence_sweep("strong", uniform_grid(11), [0.1, 0.2])
    with pytest.raises(ValidationError):
        convergence_sweep("strong", uniform_grid(11), [])


def test_sweep_rows():
    table = convergence_sweep("weak", uniform_grid(101), [0.2, 0.1], ratios=(0.3, 0.2))
    rows = table.rows()
    assert len(rows) == 2 and rows[0][0] == 0.2
    assert table.pointwise.shape == (2, 101)


@pytest.mark.parametrize("bad", [-0.1, 1.1, math.nan])
def test_sigma_domain(bad):
    with pytest.raises(DomainError):
        u_strong(bad, 0.1)


def test_lambda_domain():
    with pytest.raises(DomainError):
        u_strong(0.5, 0.0)
    with pytest.raises(DomainError):
        u_strong(0.5, -1.0)


@settings(max_examples=50)
@given(st.floats(0.005, 2.0))
def test_strong_profile_properties(lam):
    s = uniform_grid(201)
    u = u_strong(s, lam)
    assert u[-1] == 0.0
    assert np.all(u >= -1e-15)
    assert np.all(np.diff(u) <= 1e-15)
    assert np.all(u <= u_classical(s) + 1e-15)
    assert 0.0 < phi_strong(lam) < 1.0


@settings(max_examples=50)
@given(st.floats(0.0, 0.8), st.floats(0.0, 0.8), st.floats(0.02, 0.5))
def test_weak_between_strong_and_classical(r2, r3, lam):
    L = LengthScales.from_ell1(lam, (r2, r3))
    s = uniform_grid(101)
    uw = u_weak(s, L.ell1, L.ell2, L.ell3, L.ell4)
    assert uw[-1] == 0.0
    assert np.all(uw >= u_strong(s, lam) - 1e-12)
    res, scale = weak_boundary_residual(L.ell1, L.ell2, L.ell3, L.ell4)
    assert abs(res) <= 1e-12 * max(scale, 1.0)
