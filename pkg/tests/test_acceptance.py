"""Acceptance criteria 1-8 at their stated tolerances.

Every test carries ``@pytest.mark.criterion(n)``; ``conftest.py`` folds the
outcomes into one PASS/FAIL line per criterion at the end of the run::

    pytest tests/test_acceptance.py -v
"""
from __future__ import annotations

import math
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest

from sgflow import bessel
from sgflow.couette import (
    CouetteProblem,
    make_tc_profile,
    pressure_classical,
    pressure_closed_form,
    pressure_fd_bvp,
    solve_h_bvp,
    tc_convergence_sweep,
    u_weak_tc,
)
from sgflow.material import (
    BarusViscosity,
    DissipationInputs,
    LengthScales,
    check_dissipativity,
    dissipation_rate,
    dissipation_witness,
    ellipticity_indicator,
    etas_from_lengths,
    lengths_from_etas,
    xi_from_etas,
)
from sgflow.numerics import fd_derivative
from sgflow.poiseuille import (
    convergence_sweep,
    make_profile,
    ode_residual,
    phi_quadrature,
    phi_strong,
    phi_weak,
    u_strong,
    u_weak,
    u_weak_spherical,
    weak_boundary_residual,
)
from sgflow.profile import uniform_grid

mp.mp.dps = 40

STRONG_LAMBDAS = (0.02, 0.05, 0.1, 0.2, 0.3)

# 1 + 2*0.1*(1 - I0(10))/I1(10), evaluated at 40 digits (see test_u0_oracle_is_independent)
U0_AT_LAMBDA_01 = 0.78923781698588256


def _rel(a, b):
    return abs(a - b) / abs(b)


# -- 1 -------------------------------------------------------------------------

ORACLE = Path(__file__).with_name("data") / "bessel_oracle.npz"
NAMES = ("i0", "i1", "k0", "k1")


@pytest.fixture(scope="module")
def oracle():
    # 40-digit mpmath values frozen by data/make_bessel_oracle.py
    with np.load(ORACLE) as data:
        return {k: data[k] for k in data.files}


@pytest.fixture(scope="module")
def bessel_points(oracle):
    return oracle["z"]


@pytest.mark.criterion(1)
def test_frozen_oracle_spot_check(oracle):
    idx = np.linspace(0, oracle["z"].size - 1, 60).astype(int)
    for k in idx:
        x = mp.mpf(float(oracle["z"][k]))
        ref = (mp.besseli(0, x), mp.besseli(1, x), mp.besselk(0, x), mp.besselk(1, x))
        for j, r in enumerate(ref):
            assert _rel(oracle["unscaled"][k, j], r) <= 1e-15
    for k in np.linspace(0, oracle["z_scaled"].size - 1, 20).astype(int):
        x = mp.mpf(float(oracle["z_scaled"][k]))
        assert _rel(oracle["scaled"][k, 2], mp.besselk(0, x) * mp.exp(x)) <= 1e-15


@pytest.mark.criterion(1)
@pytest.mark.parametrize("j,name", list(enumerate(NAMES)))
def test_bessel_unscaled_vs_oracle(oracle, j, name):
    assert oracle["z"].size == 10_000
    got = getattr(bessel, name)(oracle["z"])
    ref = oracle["unscaled"][:, j]
    worst = float(np.max(np.abs(got - ref) / np.abs(ref)))
    assert worst <= 1e-12, worst


@pytest.mark.criterion(1)
@pytest.mark.parametrize("j,name", list(enumerate(NAMES)))
def test_bessel_scaled_vs_oracle(oracle, j, name):
    got = getattr(bessel, name + "_scaled")(oracle["z_scaled"])
    ref = oracle["scaled"][:, j]
    worst = float(np.max(np.abs(got - ref) / np.abs(ref)))
    assert worst <= 1e-10, worst


@pytest.mark.criterion(1)
def test_wronskian(bessel_points):
    z = np.concatenate([bessel_points, np.linspace(30.0, 700.0, 2000)])
    w = bessel.i0_scaled(z) * bessel.k1_scaled(z) + bessel.i1_scaled(z) * bessel.k0_scaled(z)
    assert np.max(np.abs(z * w - 1.0)) <= 1e-11


# -- 2 -------------------------------------------------------------------------

@pytest.mark.criterion(2)
@pytest.mark.parametrize("lam", STRONG_LAMBDAS)
def test_strong_wall_and_residual(lam):
    prof = make_profile("strong", LengthScales.spherical(lam), uniform_grid(801))
    assert prof.u[-1] == 0.0
    du = fd_derivative(prof.u, prof.sigma, 1, accuracy=8)
    assert abs(du[-1]) <= 1e-6
    assert ode_residual(prof, lam).sup <= 1e-4


@pytest.mark.criterion(2)
def test_u0_oracle_is_independent():
    lam = mp.mpf("0.1")
    z = 1 / lam
    ref = 1 + 2 * lam * (1 - mp.besseli(0, z)) / mp.besseli(1, z)
    assert abs(float(ref) - U0_AT_LAMBDA_01) <= 1e-15


@pytest.mark.criterion(2)
def test_strong_centreline_value():
    assert abs(float(u_strong(0.0, 0.1)) - U0_AT_LAMBDA_01) <= 1e-10


# -- 3 -------------------------------------------------------------------------

@pytest.mark.criterion(3)
@pytest.mark.parametrize("bc", ["strong", "weak"])
@pytest.mark.parametrize("lam", [0.05, 0.1, 0.2, 0.3])
def test_discharge_identity(bc, lam):
    lengths = LengthScales.spherical(lam)
    closed = phi_strong(lam) if bc == "strong" else phi_weak(lam, 0.0, 0.0, lengths.ell4)
    quad = phi_quadrature(bc, lengths).value
    assert abs(closed - quad) <= 1e-8


@pytest.mark.criterion(3)
@pytest.mark.parametrize("bc", ["strong", "weak"])
def test_discharge_tends_to_one(bc):
    lams = [0.3, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005]
    if bc == "strong":
        phis = [phi_strong(l) for l in lams]
    else:
        phis = [phi_weak(l, 0.0, 0.0, l / math.sqrt(2.0)) for l in lams]
    gaps = np.abs(np.array(phis) - 1.0)
    assert np.all(np.diff(gaps) < 0)
    assert gaps[lams.index(0.02)] <= 0.2


# -- 4 -------------------------------------------------------------------------

def _random_lambda_sets(n, seed=4):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        l2, l3, l4 = rng.uniform(0.0, 0.25, 3)
        lengths = LengthScales(0.0, l2, l3, l4)
        if 0.01 <= lengths.ell1 <= 0.4:
            out.append(lengths)
    return out


@pytest.mark.criterion(4)
@pytest.mark.parametrize("lengths", _random_lambda_sets(20), ids=lambda L: f"l1={L.ell1:.4f}")
def test_weak_hypertraction_vanishes(lengths):
    ell1_sq = 0.75 * lengths.ell2**2 + 0.5 * lengths.ell3**2 + 2.0 * lengths.ell4**2
    assert abs(lengths.ell1**2 - ell1_sq) <= 1e-15
    res, _ = weak_boundary_residual(lengths.ell1, lengths.ell2, lengths.ell3, lengths.ell4)
    assert abs(res) <= 1e-8


@pytest.mark.criterion(4)
@pytest.mark.parametrize("lam", [0.02, 0.05, 0.1, 0.2, 0.3, 0.5])
def test_weak_spherical_substitution(lam):
    s = uniform_grid(401)
    general = u_weak(s, lam, 0.0, 0.0, lam / math.sqrt(2.0))
    assert np.max(np.abs(general - u_weak_spherical(s, lam))) <= 1e-12


# -- 5 -------------------------------------------------------------------------

LIMIT_LAMBDAS = [0.2, 0.1, 0.05, 0.02]


@pytest.mark.criterion(5)
@pytest.mark.parametrize("bc", ["strong", "weak"])
def test_poiseuille_classical_limit(bc):
    table = convergence_sweep(bc, uniform_grid(801), LIMIT_LAMBDAS)
    assert np.all(np.diff(table.sup_errors) < 0)
    for lam, err in zip(table.lambdas, table.sup_errors):
        if lam <= 0.05:
            assert err <= 3.0 * lam


@pytest.mark.criterion(5)
def test_couette_strong_classical_limit():
    table = tc_convergence_sweep(LIMIT_LAMBDAS, "strong")
    assert np.all(np.diff(table.sup_errors) < 0)


@pytest.mark.criterion(5)
@pytest.mark.parametrize("lam", LIMIT_LAMBDAS)
def test_couette_weak_is_rigid_rotation(lam):
    s = uniform_grid(801)
    assert np.array_equal(make_tc_profile("weak", lam, s).u, s)
    assert np.array_equal(u_weak_tc(s), s)


# -- 6 -------------------------------------------------------------------------

@pytest.mark.criterion(6)
@pytest.mark.parametrize("bc", ["strong", "weak"])
@pytest.mark.parametrize("lam0", [0.0, 0.1])
@pytest.mark.parametrize("lam1", [0.05, 0.1, 0.2])
def test_pressure_dual_solver(lam1, lam0, bc):
    solve = pressure_fd_bvp(CouetteProblem.dimensionless(lam0, lam1, bc), n=1600)
    assert solve.report.dual_solver_gap <= 1e-6
    assert abs(solve.pi_prime[-1]) <= 1e-8


@pytest.mark.criterion(6)
def test_pressure_classical_run():
    solve = pressure_classical(uniform_grid(1601))
    assert np.max(np.abs(solve.pi - 0.5 * solve.sigma**2)) <= 1e-12


@pytest.mark.criterion(6)
@pytest.mark.parametrize("bc", ["strong", "weak"])
def test_pressure_trend(bc):
    grid = uniform_grid(801)
    errs = []
    for lam1 in (0.2, 0.1, 0.05):
        solve = pressure_closed_form(CouetteProblem.dimensionless(0.0, lam1, bc), grid)
        errs.append(np.max(np.abs(solve.pi - 0.5 * grid**2)))
    assert np.all(np.diff(errs) < 0), errs


# -- 7 -------------------------------------------------------------------------

@pytest.mark.criterion(7)
def test_eta_ell_round_trip():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        mu = rng.uniform(0.1, 10.0)
        ell2, ell3, ell4 = rng.uniform(0.0, 2.0, 3)
        etas = etas_from_lengths(mu, LengthScales(0.0, ell2, ell3, ell4))
        back = etas_from_lengths(mu, lengths_from_etas(mu, *etas))
        scale = max(abs(e) for e in etas)
        worst = max(worst, max(abs(a - b) for a, b in zip(etas, back)) / scale)
    assert worst <= 1e-14, worst


@pytest.mark.criterion(7)
def test_dissipation_forms_agree():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        mu = rng.uniform(0.1, 10.0)
        lengths = LengthScales(0.0, *rng.uniform(0.0, 2.0, 3))
        inputs = DissipationInputs(*rng.uniform(0.0, 5.0, 4))
        ell_form, eta_form = dissipation_rate(mu, lengths, inputs)
        assert abs(ell_form - eta_form) <= 1e-12 * abs(ell_form)


@pytest.mark.criterion(7)
@pytest.mark.parametrize("etas", [(1.0, 0.6, 0.0), (1.0, -0.6, 0.0), (1.0, 0.0, 0.2), (-1.0, 0.0, 0.0)])
def test_violation_has_negative_witness(etas):
    mu = 1.0
    assert not check_dissipativity(*etas).satisfied
    witness = dissipation_witness(mu, *etas)
    assert witness is not None
    assert xi_from_etas(mu, *etas, witness) < 0


@pytest.mark.criterion(7)
def test_manufactured_solution_order():
    # h = s^{3/2} - s^{7/2}: regular at the axis and zero at the wall
    lam = 0.1
    errs = []
    ns = (100, 200, 400, 800)
    for n in ns:
        s = np.linspace(1e-6, 1.0, n + 2)
        s[-1] = 1.0
        rhs = -8.0 * s**1.5 - (s**1.5 - s**3.5) / lam**2
        h, _, _ = solve_h_bvp(s, lam, rhs, scheme="central")
        errs.append(np.max(np.abs(h - (s**1.5 - s**3.5))))
    order = math.log(errs[-2] / errs[-1], 2)
    assert abs(order - 2.0) <= 0.2, order


# -- 8 -------------------------------------------------------------------------

def _shear(gamma):
    D = np.zeros((3, 3))
    D[0, 1] = D[1, 0] = 0.5 * gamma
    return D


@pytest.mark.criterion(8)
@pytest.mark.parametrize("mu0,alpha,p", [(1.0, 1.0, 0.0), (2.5, 0.3, 1.7), (0.01, 4.0, -0.5)])
def test_barus_flip_by_bisection(mu0, alpha, p):
    law = BarusViscosity(mu0, alpha)
    mprime = alpha * mu0 * math.exp(alpha * p)
    lo, hi = 0.0, 10.0 / mprime
    assert ellipticity_indicator(law, p, _shear(lo), 0.0).classical_elliptic
    assert not ellipticity_indicator(law, p, _shear(hi), 0.0).classical_elliptic
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if ellipticity_indicator(law, p, _shear(mid), 0.0).classical_elliptic:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * hi:
            break
    assert abs(mprime * hi - 1.0) <= 1e-9


@pytest.mark.criterion(8)
def test_second_gradient_stays_elliptic():
    law = BarusViscosity(1.0, 2.0)
    for p in np.linspace(-1.0, 2.0, 7):
        for gamma in np.geomspace(1e-3, 1e3, 25):
            for ell1 in (1e-3, 0.1, 1.0):
                assert ellipticity_indicator(law, p, _shear(gamma), ell1).second_gradient_elliptic
