r"""Steady pressure-driven flow in a circular tube.

The dimensionless axial velocity ``u(sigma) = 4 mu v(R sigma) / (beta R^2)``
satisfies ``L(1 - lambda1^2 L) u = -4`` with ``L = d^2/ds^2 + (1/s) d/ds``.
Regular solutions are ``1 - s^2 + c0 + c1 I0(s/lambda1)`` and the two wall
conditions fix ``c0, c1``:

* strong adherence: ``u(1) = u'(1) = 0``;
* weak adherence: ``u(1) = 0`` and vanishing hypertraction,
  ``lambda1^2 u''(1) - b u'(1) = 0`` with
  ``b = lambda2^2/4 + lambda3^2/2 - 2 lambda4^2``.

Every formula is evaluated through ``e^{-z}``-scaled Bessel values so that
nothing overflows as ``lambda1 -> 0``: the only growing factor,
``I0(s/l)/I(1/l)``, becomes ``e^{-1/l} I0(s/l) / Ihat(1/l)`` with the
numerator from :func:`sgflow.bessel.i0_decayed`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import bessel
from .errors import DomainError, GridError, ValidationError
from .material import LengthScales
from .numerics import adaptive_quad, fd_apply_L, uniform_spacing
from .profile import RadialProfile, ResidualProfile, SweepTable

__all__ = [
    "BoundaryCondition",
    "PoiseuilleProblem",
    "u_strong",
    "u_weak",
    "u_weak_spherical",
    "u_classical",
    "u_profile",
    "weak_coefficients",
    "weak_derivatives",
    "weak_boundary_residual",
    "phi_strong",
    "phi_weak",
    "phi_classical",
    "phi_quadrature",
    "dimensional_velocity",
    "make_profile",
    "ode_residual",
    "convergence_sweep",
]

LAMBDA_TOL = 1e-10


class BoundaryCondition(str, enum.Enum):
    STRONG = "strong"
    WEAK = "weak"

    @classmethod
    def parse(cls, value):
        try:
            return cls(value.value if isinstance(value, cls) else str(value).lower())
        except ValueError:
            raise ValidationError(f"unknown boundary condition {value!r}") from None


def _sigma(sigma):
    s = np.asarray(sigma, dtype=float)
    if not np.all(np.isfinite(s)) or np.any(s < 0.0) or np.any(s > 1.0):
        raise DomainError("sigma must lie in [0, 1]")
    return s


def _lambda(lam):
    lam = float(lam)
    if lam == 0.0:
        raise DomainError("lambda1 = 0 is the classical branch; use u_classical")
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError("lambda1 must be positive and finite")
    return lam


def _ret(x):
    x = np.asarray(x)
    return x[()] if x.ndim == 0 else x


def _layer(s, lam):
    """``e^{-1/lam} (I0(s/lam) - I0(1/lam))`` in long double; exactly 0 at ``s = 1``."""
    z = 1.0 / lam
    x = np.minimum(s / lam, z)
    return bessel.i0_decayed(x, z, extended=True) - bessel.i0_decayed(z, z, extended=True)


def _assemble(s, coef, layer):
    """``1 - s^2 + coef * layer`` with a single rounding to double at the end."""
    ld = np.longdouble
    s = s.astype(ld)
    return (ld(1) - s * s + ld(coef) * layer).astype(float)


def u_classical(sigma):
    """Classical parabolic profile ``1 - sigma**2``."""
    s = _sigma(sigma)
    return _ret(1.0 - s * s)


def u_strong(sigma, lambda1):
    """Velocity under strong adherence (no slip and zero normal derivative)."""
    s = _sigma(sigma)
    lam = _lambda(lambda1)
    return _ret(_assemble(s, 2.0 * lam / bessel.i1_scaled(1.0 / lam), _layer(s, lam)))


def _check_lambdas(lambda1, lambda2, lambda3, lambda4):
    lam = _lambda(lambda1)
    for name, v in (("lambda2", lambda2), ("lambda3", lambda3), ("lambda4", lambda4)):
        if not (v >= 0 and math.isfinite(v)):
            raise ValidationError(f"{name} must be finite and >= 0")
    implied = 0.75 * lambda2**2 + 0.5 * lambda3**2 + 2.0 * lambda4**2
    if abs(implied - lam * lam) > LAMBDA_TOL * max(lam * lam, 1e-300):
        raise ValidationError(
            "inconsistent lengths: lambda1^2 must equal 3/4 lambda2^2 + 1/2 lambda3^2 + 2 lambda4^2"
        )
    return lam


def weak_coefficients(lambda1, lambda2, lambda3, lambda4):
    """``(A, b, Den_hat)`` of the weak solution, ``Den_hat = e^{-1/l}(l^2 I0''(1/l) - l b I1(1/l))``.

    ``Den_hat`` is positive for every admissible set because ``b <= lambda1^2``
    and ``I0'' - lambda1 I1 >= I2 > 0``.
    """
    lam = _check_lambdas(lambda1, lambda2, lambda3, lambda4)
    b = 0.25 * lambda2**2 + 0.5 * lambda3**2 - 2.0 * lambda4**2
    a = lam * lam - b
    z = 1.0 / lam
    den = lam * lam * bessel.i0_second_scaled(z) - lam * b * bessel.i1_scaled(z)
    return a, b, float(den)


def u_weak(sigma, lambda1, lambda2, lambda3, lambda4):
    """Velocity under weak adherence (no slip and zero hypertraction)."""
    s = _sigma(sigma)
    a, _, den = weak_coefficients(lambda1, lambda2, lambda3, lambda4)
    lam = float(lambda1)
    return _ret(_assemble(s, 2.0 * a * lam * lam / den, _layer(s, lam)))


def u_weak_spherical(sigma, lambda1):
    """Weak adherence when only the spherical hyperstress part is present (lambda2 = lambda3 = 0)."""
    s = _sigma(sigma)
    lam = _lambda(lambda1)
    z = 1.0 / lam
    den = bessel.i0_second_scaled(z) + lam * bessel.i1_scaled(z)
    return _ret(_assemble(s, 4.0 * lam * lam / den, _layer(s, lam)))


def weak_derivatives(sigma, lambda1, lambda2, lambda3, lambda4):
    """Analytic ``(u', u'')`` of the weak profile."""
    s = _sigma(sigma)
    a, _, den = weak_coefficients(lambda1, lambda2, lambda3, lambda4)
    lam = float(lambda1)
    x = s / lam
    decay = np.exp(-(1.0 - s) / lam)
    du = -2.0 * s + 2.0 * a * lam * decay * bessel.i1_scaled(x) / den
    d2u = -2.0 + 2.0 * a * decay * bessel.i0_second_scaled(x) / den
    return _ret(du), _ret(d2u)


def weak_boundary_residual(lambda1, lambda2, lambda3, lambda4):
    """Dimensionless hypertraction at the wall and its scale ``lambda1^2 |u''(1)|``."""
    _, b, _ = weak_coefficients(lambda1, lambda2, lambda3, lambda4)
    du, d2u = weak_derivatives(1.0, lambda1, lambda2, lambda3, lambda4)
    lam2 = float(lambda1) ** 2
    return float(lam2 * d2u - b * du), float(lam2 * abs(d2u))


def u_profile(sigma, bc, lam: LengthScales):
    """Dispatch on boundary condition; ``lam`` holds dimensionless lengths."""
    bc = BoundaryCondition.parse(bc)
    if lam.ell1 == 0.0:
        return u_classical(sigma)
    if bc is BoundaryCondition.STRONG:
        return u_strong(sigma, lam.ell1)
    return u_weak(sigma, lam.ell1, lam.ell2, lam.ell3, lam.ell4)


def phi_classical():
    return 1.0


def phi_strong(lambda1):
    """Dimensionless discharge rate under strong adherence."""
    lam = _lambda(lambda1)
    z = 1.0 / lam
    return float(1.0 + 8.0 * lam * lam - 4.0 * lam * bessel.i0_scaled(z) / bessel.i1_scaled(z))


def phi_weak(lambda1, lambda2, lambda3, lambda4):
    """Dimensionless discharge rate under weak adherence."""
    a, _, den = weak_coefficients(lambda1, lambda2, lambda3, lambda4)
    lam = float(lambda1)
    z = 1.0 / lam
    bracket = lam * bessel.i1_scaled(z) - 0.5 * bessel.i0_scaled(z)
    return float(1.0 + 8.0 * a * lam * lam * bracket / den)


def phi_quadrature(bc, lam: LengthScales, abs_tol=1e-11):
    """``4 * int_0^1 u(s) s ds`` by adaptive Simpson, independent of the closed forms."""
    def integrand(s):
        return 4.0 * float(u_profile(s, bc, lam)) * s

    return adaptive_quad(integrand, 0.0, 1.0, abs_tol=abs_tol)


@dataclass(frozen=True)
class PoiseuilleProblem:
    R: float
    beta: float
    mu: float
    lengths: LengthScales
    bc: BoundaryCondition = BoundaryCondition.STRONG

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ValidationError("R must be positive and finite")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValidationError("mu must be positive and finite")
        if not math.isfinite(self.beta):
            raise ValidationError("beta must be finite")
        object.__setattr__(self, "bc", BoundaryCondition.parse(self.bc))

    @property
    def scaled_lengths(self) -> LengthScales:
        return self.lengths.scaled(self.R)

    @property
    def lambda1(self) -> float:
        return self.scaled_lengths.ell1

    @property
    def velocity_scale(self) -> float:
        return self.beta * self.R**2 / (4.0 * self.mu)


def dimensional_velocity(problem: PoiseuilleProblem, r):
    """Axial velocity at radius ``r`` in physical units."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > problem.R):
        raise DomainError("r must lie in [0, R]")
    return problem.velocity_scale * u_profile(r / problem.R, problem.bc, problem.scaled_lengths)


def make_profile(bc, lam: LengthScales, sigma) -> RadialProfile:
    bc = BoundaryCondition.parse(bc)
    sigma = np.asarray(sigma, dtype=float)
    meta = {
        "flow": "poiseuille",
        "bc": bc.value,
        "lambda1": lam.ell1,
        "lambda2": lam.ell2,
        "lambda3": lam.ell3,
        "lambda4": lam.ell4,
    }
    return RadialProfile(sigma, np.asarray(u_profile(sigma, bc, lam), dtype=float), meta)


def ode_residual(profile: RadialProfile, lambda1, band=3, min_nodes=201) -> ResidualProfile:
    """Deviation of ``L(1 - lambda1^2 L) u`` from ``-4`` by fourth-order differences.

    ``band`` nodes are dropped at each end.  Three is the half-width of the
    central fourth-derivative stencil, so every node kept is evaluated with
    central differences (the axis side is mirrored by symmetry anyway).
    """
    if profile.n < min_nodes:
        raise GridError(f"residual check needs at least {min_nodes} nodes")
    uniform_spacing(profile.sigma)
    Lu = fd_apply_L(profile.u, profile.sigma, "poiseuille")
    LLu = fd_apply_L(profile.u, profile.sigma, "poiseuille", power=2)
    res = Lu - float(lambda1) ** 2 * LLu + 4.0
    keep = slice(band, profile.n - band)
    return ResidualProfile(profile.sigma[keep], res[keep])


def convergence_sweep(bc, sigma, lambdas, ratios=(0.0, 0.0)) -> SweepTable:
    """Sup-norm distance to the classical profile for decreasing lambda1.

    Under weak adherence each lambda1 is completed with ``LengthScales.from_ell1``
    using the fixed ``ratios = (lambda2/lambda1, lambda3/lambda1)``; the
    default is the spherical case.
    """
    bc = BoundaryCondition.parse(bc)
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.ndim != 1 or lambdas.size == 0:
        raise ValidationError("need a non-empty list of lambda1 values")
    if np.any(lambdas <= 0) or np.any(np.diff(lambdas) >= 0):
        raise ValidationError("lambda1 values must be positive and strictly decreasing")
    sigma = _sigma(sigma)
    u0 = u_classical(sigma)
    rows, phis = [], []
    for lam1 in lambdas:
        lam = LengthScales.from_ell1(lam1, ratios)
        rows.append(np.abs(u_profile(sigma, bc, lam) - u0))
        if bc is BoundaryCondition.STRONG:
            phis.append(phi_strong(lam1))
        else:
            phis.append(phi_weak(lam.ell1, lam.ell2, lam.ell3, lam.ell4))
    pointwise = np.vstack(rows)
    return SweepTable(lambdas, pointwise.max(axis=1), np.array(phis), sigma, pointwise)
