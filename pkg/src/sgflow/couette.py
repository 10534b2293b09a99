r"""Taylor-Couette flow inside a rotating cylinder, and its radial pressure.

Velocity.  The dimensionless azimuthal velocity ``u(s) = v(R s)/(Omega R)``
solves ``L(1 - lambda1^2 L) u = 0`` with ``L = D^2 + D/s - 1/s^2``.  Under
weak adherence rigid rotation ``u = s`` is the solution; under strong
adherence

    u(s) = s + (I1(s/l) - s I1(1/l)) / D,    D = 2 I1(1/l) - (1/l) I0(1/l) = -(1/l) I2(1/l).

Most of the work below is done with ``w = u/s``, which is even and smooth
at the axis and whose derivatives follow from ``(x^-n I_n)' = x^-n I_{n+1}``.

Pressure.  ``y = pi'`` satisfies

    y'' + y'/s - (1/s^2 + 1/lambda1^2) y = phi(s),    y(0) = 0,  y(1) = 0,

with forcing ``phi = (lambda0^2/lambda1^2) (u (u/s)' + (u/s)^2)' - u^2/(s lambda1^2)``.
It is solved twice, independently:

* by variation of parameters with the ``I1, K1`` pair, every kernel written
  in scaled form with its exponential factor ``e^{-|s - t|/lambda1} <= 1``;
* by finite differences on ``h = s^{1/2} y``, which removes the first
  derivative: ``h'' + (1/(4 s^2) - 1/s^2 - 1/lambda1^2) h = s^{1/2} phi``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import bessel
from .errors import DomainError, GridError, ValidationError
from .material import LengthScales
from .numerics import (
    TridiagonalSystem,
    cumulative_integral,
    fd_apply_L,
    panel_quad,
    solve_tridiagonal,
    uniform_spacing,
)
from .poiseuille import BoundaryCondition
from .profile import RadialProfile, ResidualProfile, SolverReport, SweepTable

__all__ = [
    "CouetteProblem",
    "PressureMethod",
    "PressureSolve",
    "u_strong_tc",
    "u_weak_tc",
    "u_classical_tc",
    "tc_profile",
    "strong_tc_w",
    "forcing_phi",
    "forcing",
    "pressure_closed_form",
    "pressure_fd_bvp",
    "pressure_classical",
    "solve_h_bvp",
    "tc_ode_residual",
    "tc_convergence_sweep",
    "make_tc_profile",
]

FD_EPS = 1e-6
QUAD_TOL = 1e-10


def _sigma(sigma):
    s = np.asarray(sigma, dtype=float)
    if not np.all(np.isfinite(s)) or np.any(s < 0.0) or np.any(s > 1.0):
        raise DomainError("sigma must lie in [0, 1]")
    return s


def _lambda(lam, name="lambda1"):
    lam = float(lam)
    if lam == 0.0:
        raise DomainError(f"{name} = 0 is the classical branch")
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError(f"{name} must be positive and finite")
    return lam


def _ret(x):
    x = np.asarray(x)
    return x[()] if x.ndim == 0 else x


def _d_hat(z):
    """``e^{-z} D = -z e^{-z} I2(z)``, computed without the cancellation in ``2 I1 - z I0``."""
    return -z**3 * float(bessel.i_over_pow_decayed(2, z, z))


# -- velocity ----------------------------------------------------------------

def u_classical_tc(sigma):
    """Rigid rotation ``u = sigma``."""
    return _ret(_sigma(sigma).copy())


def u_weak_tc(sigma):
    """Weak adherence leaves rigid rotation as the exact solution."""
    return u_classical_tc(sigma)


def u_strong_tc(sigma, lambda1):
    """Azimuthal velocity under strong adherence; ``u(1) = 1`` holds exactly."""
    s = _sigma(sigma)
    lam = _lambda(lambda1)
    z = 1.0 / lam
    x = np.minimum(s / lam, z)
    ld = np.longdouble
    num = bessel.i1_decayed(x, z, extended=True) - s.astype(ld) * bessel.i1_decayed(z, z, extended=True)
    return _ret((s.astype(ld) + num / ld(_d_hat(z))).astype(float))


def strong_tc_w(sigma, lambda1):
    """``w = u/sigma`` of the strong solution and its first two derivatives.

    Regular at ``sigma = 0`` where ``w' = 0``.
    """
    s = _sigma(sigma)
    lam = _lambda(lambda1)
    z = 1.0 / lam
    x = np.minimum(s / lam, z)
    dh = _d_hat(z)
    s1 = bessel.i_over_pow_decayed(1, x, z)
    s2 = bessel.i_over_pow_decayed(2, x, z)
    s3 = bessel.i_over_pow_decayed(3, x, z)
    a = 1.0 - float(bessel.i1_scaled(z)) / dh
    w = a + s1 / (lam * dh)
    dw = x * s2 / (lam**2 * dh)
    d2w = (s2 + x * x * s3) / (lam**3 * dh)
    return _ret(w), _ret(dw), _ret(d2w)


def tc_profile(sigma, bc, lambda1):
    bc = BoundaryCondition.parse(bc)
    if bc is BoundaryCondition.WEAK or float(lambda1) == 0.0:
        return u_classical_tc(sigma)
    return u_strong_tc(sigma, lambda1)


def make_tc_profile(bc, lambda1, sigma) -> RadialProfile:
    bc = BoundaryCondition.parse(bc)
    sigma = np.asarray(sigma, dtype=float)
    u = np.asarray(tc_profile(sigma, bc, lambda1), dtype=float)
    return RadialProfile(sigma, u, {"flow": "couette", "bc": bc.value, "lambda1": float(lambda1)})


# -- pressure forcing -------------------------------------------------------

def forcing_phi(sigma, w, dw, d2w, lambda0, lambda1):
    """Dimensionless forcing from ``w = u/sigma`` and its derivatives.

    ``(u (u/s)' + (u/s)^2)' = 3 w w' + s (w'^2 + w w'')`` and ``u^2/s = s w^2``,
    so nothing is divided by ``sigma``.
    """
    s = np.asarray(sigma, dtype=float)
    lam1 = _lambda(lambda1)
    ratio = (float(lambda0) / lam1) ** 2
    return ratio * (3.0 * w * dw + s * (dw * dw + w * d2w)) - s * w * w / lam1**2


def forcing(bc, lambda0, lambda1):
    """Vectorised ``phi(sigma)`` for the given flow."""
    bc = BoundaryCondition.parse(bc)
    lam1 = _lambda(lambda1)
    if float(lambda0) < 0:
        raise ValidationError("lambda0 must be >= 0")
    if bc is BoundaryCondition.WEAK:
        return lambda s: -np.asarray(s, dtype=float) / lam1**2

    def phi(s):
        s = np.asarray(s, dtype=float)
        return forcing_phi(s, *strong_tc_w(s, lam1), lambda0, lam1)

    return phi


# -- problem and results ----------------------------------------------------

@dataclass(frozen=True)
class CouetteProblem:
    R: float
    Omega: float
    rho: float
    mu: float
    lengths: LengthScales
    bc: BoundaryCondition = BoundaryCondition.STRONG

    def __post_init__(self):
        for name in ("R", "rho", "mu"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValidationError(f"{name} must be positive and finite")
        if not math.isfinite(self.Omega):
            raise ValidationError("Omega must be finite")
        object.__setattr__(self, "bc", BoundaryCondition.parse(self.bc))

    @classmethod
    def dimensionless(cls, lambda0, lambda1, bc="strong"):
        """Unit radius, speed and density; only the lambdas matter."""
        return cls(1.0, 1.0, 1.0, 1.0, LengthScales.spherical(lambda1, ell0=lambda0), bc)

    @property
    def lambda0(self) -> float:
        return self.lengths.ell0 / self.R

    @property
    def lambda1(self) -> float:
        return self.lengths.ell1 / self.R

    @property
    def pressure_scale(self) -> float:
        return self.rho * self.Omega**2 * self.R**2

    def phi(self):
        return forcing(self.bc, self.lambda0, self.lambda1)


class PressureMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form_quadrature"
    FINITE_DIFFERENCE = "finite_difference_bvp"
    CLASSICAL = "classical_direct"


@dataclass
class PressureSolve:
    sigma: np.ndarray
    pi_prime: np.ndarray
    pi: np.ndarray
    method: PressureMethod
    report: SolverReport = field(default_factory=SolverReport)


def _grid(grid):
    sigma = np.asarray(grid, dtype=float)
    if sigma.ndim != 1 or sigma.size < 3:
        raise GridError("pressure grid needs at least 3 nodes")
    if sigma[0] < 0 or sigma[-1] != 1.0 or np.any(np.diff(sigma) <= 0):
        raise GridError("pressure grid must increase strictly from >= 0 to exactly 1")
    return sigma


def _pi_from_prime(sigma, pi_prime):
    """``pi`` with ``pi(0) = 0``; a grid starting above 0 gets the regular ``pi' ~ c s`` head."""
    head = 0.5 * sigma[0] * pi_prime[0]
    return head + cumulative_integral(pi_prime, sigma)


def _ode_check(sigma, y, phi_vals, lam1):
    """Sup of the fourth-order finite-difference residual of the pressure ODE on interior nodes."""
    if sigma.size < 9 or sigma[0] != 0.0:
        return None
    try:
        uniform_spacing(sigma)
    except GridError:
        return None
    Ly = fd_apply_L(y, sigma, "couette")
    res = Ly - y / lam1**2 - phi_vals
    return float(np.max(np.abs(res[3:-3])))


def pressure_closed_form(problem: CouetteProblem, grid, abs_tol=QUAD_TOL) -> PressureSolve:
    """``pi'`` from the variation-of-parameters formula.

    With ``x = s/l`` and hats denoting scaled Bessel functions,

        pi'(s) = kappa Ihat1(x) e^{(s-1)/l} A(1) - Ihat1(x) B(s) - Khat1(x) A(s),

        A(s) = int_0^s Ihat1(t/l) e^{-(s-t)/l} t phi(t) dt,
        B(s) = int_s^1 Khat1(t/l) e^{-(t-s)/l} t phi(t) dt,   kappa = Khat1(1/l)/Ihat1(1/l).

    ``A`` and ``B`` are accumulated cell by cell (forward and backward), each
    cell integral by adaptive Gauss-Kronrod.  All exponentials are <= 1.
    """
    sigma = _grid(grid)
    lam = _lambda(problem.lambda1)
    phi = problem.phi()
    z = 1.0 / lam

    edges = sigma if sigma[0] == 0.0 else np.concatenate([[0.0], sigma])
    right, left = edges[1:], edges[:-1]

    def a_kernel(t, k):
        return bessel.i1_scaled(t / lam) * np.exp(-(right[k] - t) / lam) * t * phi(t)

    def b_kernel(t, k):
        return bessel.k1_scaled(t / lam) * np.exp(-(t - left[k]) / lam) * t * phi(t)

    a_cells, a_err = panel_quad(a_kernel, edges, abs_tol, with_index=True)
    b_cells, b_err = panel_quad(b_kernel, edges, abs_tol, with_index=True)
    decay = np.exp(-np.diff(edges) / lam)

    m = edges.size
    A = np.zeros(m)
    B = np.zeros(m)
    for j in range(m - 1):
        A[j + 1] = decay[j] * A[j] + a_cells[j]
    for j in range(m - 2, -1, -1):
        B[j] = decay[j] * B[j + 1] + b_cells[j]
    if sigma[0] != 0.0:
        A, B = A[1:], B[1:]

    y = np.zeros_like(sigma)
    pos = sigma > 0
    x = sigma[pos] / lam
    i1h = bessel.i1_scaled(x)
    kappa = float(bessel.k1_scaled(z) / bessel.i1_scaled(z))
    y[pos] = kappa * i1h * np.exp((sigma[pos] - 1.0) / lam) * A[-1] - i1h * B[pos] - bessel.k1_scaled(x) * A[pos]

    report = SolverReport(
        sup_residual=_ode_check(sigma, y, phi(sigma), lam),
        bc_residuals={"pi_prime_at_1": float(y[-1]), "pi_prime_at_0": float(y[0])},
        grid_n=int(sigma.size),
    )
    report.bc_residuals["quadrature_error_estimate"] = float(a_err.sum() + b_err.sum())
    return PressureSolve(sigma, y, _pi_from_prime(sigma, y), PressureMethod.CLOSED_FORM, report)


def solve_h_bvp(sigma, lambda1, rhs, scheme="numerov"):
    """Solve ``h'' + q h = rhs`` on a uniform grid ``[eps, 1]`` with ``h(1) = 0``.

    ``q = 1/(4 s^2) - 1/s^2 - 1/lambda1^2`` and ``rhs`` holds samples at every node.

    Two schemes share the same treatment of the singular end:

    * the diagonal at each node is shifted so that the discrete operator is
      exact on ``s^{3/2}``, the behaviour of ``h`` near the axis, which keeps
      the formal order all the way down to ``eps``;
    * the left node is closed by ``h_0 = (s_0/s_1)^{3/2} h_1``, again the
      regular behaviour, instead of pinning ``h(eps) = 0``.

    ``scheme='central'`` is the standard three-point second-order scheme,
    ``scheme='numerov'`` the fourth-order Numerov scheme.
    """
    s = np.asarray(sigma, dtype=float)
    h = uniform_spacing(s)
    if s[0] <= 0.0 or s[-1] != 1.0:
        raise GridError("BVP grid must run from eps > 0 to 1")
    n = s.size - 1
    if n < 4:
        raise GridError("BVP grid too coarse")
    lam = _lambda(lambda1)
    F = np.asarray(rhs, dtype=float)
    if F.shape != s.shape:
        raise ValidationError("rhs must be sampled on every grid node")
    q = 0.25 / s**2 - 1.0 / s**2 - 1.0 / lam**2
    y = s**1.5
    Fy = 0.75 / np.sqrt(s) + q * y
    j = np.arange(1, n)
    inv = 1.0 / h**2
    if scheme == "central":
        lo = np.full(n + 1, inv)
        up = np.full(n + 1, inv)
        di = -2.0 * inv + q
        b = F.copy()
        res = lo[j] * y[j - 1] + di[j] * y[j] + up[j] * y[j + 1] - Fy[j]
    elif scheme == "numerov":
        lo = inv + np.concatenate([[0.0], q[:-1]]) / 12.0
        up = inv + np.concatenate([q[1:], [0.0]]) / 12.0
        di = -2.0 * inv + 10.0 * q / 12.0
        b = np.zeros(n + 1)
        b[j] = (F[j - 1] + 10.0 * F[j] + F[j + 1]) / 12.0
        res = lo[j] * y[j - 1] + di[j] * y[j] + up[j] * y[j + 1] - (Fy[j - 1] + 10.0 * Fy[j] + Fy[j + 1]) / 12.0
    else:
        raise ValidationError(f"unknown scheme {scheme!r}")
    di[j] -= res / y[j]
    rho = (s[0] / s[1]) ** 1.5
    di[1] += lo[1] * rho

    system = TridiagonalSystem(lo[2:n], di[1:n], up[1 : n - 1], b[1:n])
    inner = solve_tridiagonal(system)
    out = np.concatenate([[rho * inner[0]], inner, [0.0]])
    return out, system, inner


def pressure_fd_bvp(problem: CouetteProblem, n=1600, eps=FD_EPS, scheme="numerov", compare=True) -> PressureSolve:
    """``pi'`` from the finite-difference solve of the ``h`` equation.

    ``n`` counts interior nodes of the uniform grid on ``[eps, 1]``.  With
    ``compare=True`` the closed form is evaluated on the same nodes and the
    sup difference in ``pi'`` is stored as ``report.dual_solver_gap``.
    """
    if int(n) != n or n < 2:
        raise GridError("n must be an integer >= 2")
    if not (0 < eps < 0.01):
        raise ValidationError("eps must lie in (0, 0.01)")
    lam = _lambda(problem.lambda1)
    sigma = np.linspace(eps, 1.0, int(n) + 2)
    sigma[-1] = 1.0
    phi = problem.phi()
    F = np.sqrt(sigma) * phi(sigma)
    hvals, system, inner = solve_h_bvp(sigma, lam, F, scheme)
    y = hvals / np.sqrt(sigma)
    report = SolverReport(
        sup_residual=float(np.max(np.abs(system.matvec(inner) - system.rhs))),
        bc_residuals={"pi_prime_at_1": float(y[-1]), "pi_prime_at_eps": float(y[0])},
        grid_n=int(n),
    )
    if compare:
        ref = pressure_closed_form(problem, sigma)
        report.dual_solver_gap = float(np.max(np.abs(ref.pi_prime - y)))
    out = PressureSolve(sigma, y, _pi_from_prime(sigma, y), PressureMethod.FINITE_DIFFERENCE, report)
    return out


def pressure_classical(grid) -> PressureSolve:
    """Classical balance ``pi' = u^2/s = s``, ``pi = s^2/2``; the wall condition is not imposed."""
    sigma = _grid(grid)
    report = SolverReport(sup_residual=0.0, bc_residuals={"pi_prime_at_1": 1.0}, grid_n=int(sigma.size))
    return PressureSolve(sigma, sigma.copy(), 0.5 * sigma * sigma, PressureMethod.CLASSICAL, report)


# -- diagnostics -------------------------------------------------------------

def tc_ode_residual(profile: RadialProfile, lambda1, band=3, min_nodes=201) -> ResidualProfile:
    """``L(1 - lambda1^2 L) u`` by fourth-order differences (target 0).

    Only regular fields are accepted: the grid must start on the axis and
    ``u(0)`` must vanish, otherwise the ``K1`` and ``1/s`` branches would be
    admitted.
    """
    if profile.n < min_nodes:
        raise GridError(f"residual check needs at least {min_nodes} nodes")
    if profile.sigma[0] != 0.0:
        raise ValidationError("regularity gate: grid must start at sigma = 0")
    if abs(profile.u[0]) > 1e-12 * max(1.0, float(np.max(np.abs(profile.u)))):
        raise ValidationError("regularity gate: u(0) must vanish")
    uniform_spacing(profile.sigma)
    Lu = fd_apply_L(profile.u, profile.sigma, "couette")
    LLu = fd_apply_L(profile.u, profile.sigma, "couette", power=2)
    res = Lu - float(lambda1) ** 2 * LLu
    keep = slice(band, profile.n - band)
    return ResidualProfile(profile.sigma[keep], res[keep])


def tc_convergence_sweep(lambdas, bc="strong", sigma=None) -> SweepTable:
    """Sup-norm distance to rigid rotation for strictly decreasing lambda1."""
    bc = BoundaryCondition.parse(bc)
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.ndim != 1 or lambdas.size == 0:
        raise ValidationError("need a non-empty list of lambda1 values")
    if np.any(lambdas <= 0) or np.any(np.diff(lambdas) >= 0):
        raise ValidationError("lambda1 values must be positive and strictly decreasing")
    sigma = _sigma(np.linspace(0.0, 1.0, 1001) if sigma is None else sigma)
    pointwise = np.vstack([np.abs(tc_profile(sigma, bc, lam) - sigma) for lam in lambdas])
    return SweepTable(lambdas, pointwise.max(axis=1), None, sigma, pointwise)
