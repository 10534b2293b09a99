r"""Material parameters of the second-gradient fluid.

Two equivalent parametrisations are supported: the viscosities
``(mu, eta1, eta2, eta3)`` and the length scales ``(ell2, ell3, ell4)``,
related by

.. math::
    \ell_2^2 = \frac{\eta_1 + 2\eta_2}{2\mu},\quad
    \ell_3^2 = \frac{\eta_1 - 2\eta_2}{2\mu},\quad
    \ell_4^2 = \frac{3\eta_1 - 10\eta_2 - 32\eta_3}{16\mu}.

The dissipation rate is nonnegative for every motion exactly when all three
right-hand sides are nonnegative.  ``ell1`` is derived, never stored:
``ell1**2 = 3/4 ell2**2 + 1/2 ell3**2 + 2 ell4**2``.  It also serves as the
hyperpressure length.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation, SaturationError, ValidationError

__all__ = [
    "LengthScales",
    "ViscosityCoefficients",
    "BarusViscosity",
    "DissipationInputs",
    "DissipativityReport",
    "EllipticityReport",
    "INEQ_ETA1_ETA2",
    "INEQ_ELL4",
    "lengths_from_etas",
    "etas_from_lengths",
    "ell1_from",
    "hyperpressure_coefficient",
    "dissipation_rate",
    "xi_from_etas",
    "dissipation_witness",
    "check_dissipativity",
    "barus_mu",
    "barus_mu_prime",
    "symmetric_eigenvalues",
    "ellipticity_indicator",
]

INEQ_ETA1_ETA2 = "eta1 >= 2|eta2|"
INEQ_ELL4 = "3*eta1 - 10*eta2 - 32*eta3 >= 0"
DEFAULT_TOL = 1e-12


def _nonneg_finite(name, value):
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise ValidationError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def ell1_from(ell2, ell3, ell4):
    """Primary length from the three independent ones."""
    return math.sqrt(0.75 * ell2**2 + 0.5 * ell3**2 + 2.0 * ell4**2)


@dataclass(frozen=True)
class LengthScales:
    """Intrinsic lengths; ``ell0`` weights the inertial gradient term only."""

    ell0: float = 0.0
    ell2: float = 0.0
    ell3: float = 0.0
    ell4: float = 0.0

    def __post_init__(self):
        for name in ("ell0", "ell2", "ell3", "ell4"):
            object.__setattr__(self, name, _nonneg_finite(name, getattr(self, name)))

    @property
    def ell1(self) -> float:
        return ell1_from(self.ell2, self.ell3, self.ell4)

    @classmethod
    def spherical(cls, ell1, ell0=0.0):
        """Only the spherical part of the hyperstress survives: ell2 = ell3 = 0."""
        return cls(ell0=ell0, ell4=_nonneg_finite("ell1", ell1) / math.sqrt(2.0))

    @classmethod
    def from_ell1(cls, ell1, ratios=(0.0, 0.0), ell0=0.0):
        """Build lengths with ``ell2 = r2*ell1`` and ``ell3 = r3*ell1``, solving for ell4.

        Raises ValidationError when the ratios leave no room for a real ell4.
        """
        ell1 = _nonneg_finite("ell1", ell1)
        r2, r3 = (_nonneg_finite("ratio", r) for r in ratios)
        rest = 1.0 - 0.75 * r2**2 - 0.5 * r3**2
        if rest < -1e-12:
            raise ValidationError("ratios too large: 3/4 r2^2 + 1/2 r3^2 must be <= 1")
        return cls(ell0=ell0, ell2=r2 * ell1, ell3=r3 * ell1,
                   ell4=ell1 * math.sqrt(max(rest, 0.0) / 2.0))

    def scaled(self, R):
        """Dimensionless lengths ``ell_i / R`` (the same type, so ``.ell1`` gives lambda1)."""
        if not (R > 0 and math.isfinite(R)):
            raise ValidationError("R must be positive and finite")
        return LengthScales(self.ell0 / R, self.ell2 / R, self.ell3 / R, self.ell4 / R)


@dataclass(frozen=True)
class DissipativityReport:
    satisfied: bool
    margins: tuple
    violated: tuple = ()


def check_dissipativity(eta1, eta2, eta3, tol=DEFAULT_TOL) -> DissipativityReport:
    """Margins ``(eta1 - 2|eta2|, (3 eta1 - 10 eta2 - 32 eta3)/8)``; satisfied when both >= -tol."""
    m1 = eta1 - 2.0 * abs(eta2)
    m2 = (3.0 * eta1 - 10.0 * eta2 - 32.0 * eta3) / 8.0
    violated = tuple(name for name, m in ((INEQ_ETA1_ETA2, m1), (INEQ_ELL4, m2)) if not m >= -tol)
    return DissipativityReport(not violated, (m1, m2), violated)


@dataclass(frozen=True)
class ViscosityCoefficients:
    mu: float
    eta1: float = 0.0
    eta2: float = 0.0
    eta3: float = 0.0

    def __post_init__(self):
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValidationError("mu must be positive and finite")
        for name in ("eta1", "eta2", "eta3"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")

    @property
    def dissipativity(self) -> DissipativityReport:
        return check_dissipativity(self.eta1, self.eta2, self.eta3)


def lengths_from_etas(mu, eta1, eta2, eta3, ell0=0.0, tol=DEFAULT_TOL) -> LengthScales:
    """Convert viscosities to length scales.

    Radicands down to ``-tol`` are treated as zero; anything more negative
    raises ConstraintViolation whose ``inequality`` names the failed condition.
    """
    if not (mu > 0 and math.isfinite(mu)):
        raise ValidationError("mu must be positive and finite")
    rad2 = eta1 + 2.0 * eta2
    rad3 = eta1 - 2.0 * eta2
    rad4 = (3.0 * eta1 - 10.0 * eta2 - 32.0 * eta3) / 8.0
    for rad, ineq in ((rad2, INEQ_ETA1_ETA2), (rad3, INEQ_ETA1_ETA2), (rad4, INEQ_ELL4)):
        if not rad >= -tol:
            raise ConstraintViolation(f"dissipativity violated: {ineq}", inequality=ineq)
    return LengthScales(
        ell0=ell0,
        ell2=math.sqrt(max(rad2, 0.0) / (2.0 * mu)),
        ell3=math.sqrt(max(rad3, 0.0) / (2.0 * mu)),
        ell4=math.sqrt(max(rad4, 0.0) / (2.0 * mu)),
    )


def etas_from_lengths(mu, lengths: LengthScales):
    """Inverse of :func:`lengths_from_etas`; returns ``(eta1, eta2, eta3)``."""
    a, b, c = lengths.ell2**2, lengths.ell3**2, lengths.ell4**2
    return (mu * (a + b), 0.5 * mu * (a - b), mu * (-a / 16.0 + b / 4.0 - c / 2.0))


def hyperpressure_coefficient(lengths: LengthScales) -> float:
    """Coefficient of ``grad p`` in the hyperpressure closure (``ell1**2``)."""
    return lengths.ell1**2


@dataclass(frozen=True)
class DissipationInputs:
    """Squared magnitudes of the stretching, the deviatoric parts of grad D and
    grad W, and the Laplacian of the velocity."""

    d_sq: float = 0.0
    hat_grad_d_sq: float = 0.0
    hat_grad_w_sq: float = 0.0
    lap_v_sq: float = 0.0

    def __post_init__(self):
        for name in ("d_sq", "hat_grad_d_sq", "hat_grad_w_sq", "lap_v_sq"):
            object.__setattr__(self, name, _nonneg_finite(name, getattr(self, name)))

    @property
    def grad_d_sq(self):
        return self.hat_grad_d_sq + self.lap_v_sq / 8.0

    @property
    def grad_w_sq(self):
        return self.hat_grad_w_sq + self.lap_v_sq / 4.0


def xi_from_etas(mu, eta1, eta2, eta3, inputs: DissipationInputs) -> float:
    """Dissipation rate written with the viscosities (no sign assumption on them)."""
    return (
        2.0 * mu * inputs.d_sq
        + (eta1 + 2.0 * eta2) * inputs.grad_d_sq
        + (eta1 - 2.0 * eta2) * inputs.grad_w_sq
        - (eta2 + 4.0 * eta3) * inputs.lap_v_sq
    )


def dissipation_rate(mu, lengths: LengthScales, inputs: DissipationInputs):
    """Return ``(xi_ell_form, xi_eta_form)``; they agree up to rounding."""
    xi_ell = 2.0 * mu * (
        inputs.d_sq
        + lengths.ell2**2 * inputs.hat_grad_d_sq
        + lengths.ell3**2 * inputs.hat_grad_w_sq
        + lengths.ell4**2 * inputs.lap_v_sq
    )
    return xi_ell, xi_from_etas(mu, *etas_from_lengths(mu, lengths), inputs)


def dissipation_witness(mu, eta1, eta2, eta3):
    """A state with negative dissipation, or None if the viscosities are dissipative.

    With ``|D| = 0`` the rate is a sum of three independent terms, so it is
    enough to switch on the magnitude whose coefficient is negative.
    """
    coefs = (eta1 + 2.0 * eta2, eta1 - 2.0 * eta2, (3.0 * eta1 - 10.0 * eta2 - 32.0 * eta3) / 8.0)
    k = int(np.argmin(coefs))
    if coefs[k] >= 0:
        return None
    fields = ("hat_grad_d_sq", "hat_grad_w_sq", "lap_v_sq")
    inputs = DissipationInputs(**{fields[k]: 1.0})
    assert xi_from_etas(mu, eta1, eta2, eta3, inputs) < 0
    return inputs


# -- pressure-dependent viscosity ------------------------------------------

@dataclass(frozen=True)
class BarusViscosity:
    """``mu(p) = mu0 * exp(alpha * (p - p0))``."""

    mu0: float
    alpha: float = 0.0
    p0: float = 0.0

    def __post_init__(self):
        if not (self.mu0 > 0 and math.isfinite(self.mu0)):
            raise ValidationError("mu0 must be positive and finite")
        if not (self.alpha >= 0 and math.isfinite(self.alpha)):
            raise ValidationError("alpha must be finite and >= 0")
        if not math.isfinite(self.p0):
            raise ValidationError("p0 must be finite")

    def evaluate(self, p):
        return barus_mu(self, p)


def barus_mu(law: BarusViscosity, p):
    """Viscosity at pressure ``p``; raises SaturationError on overflow."""
    with np.errstate(over="raise"):
        try:
            out = law.mu0 * np.exp(law.alpha * (np.asarray(p, dtype=float) - law.p0))
        except FloatingPointError:
            raise SaturationError("Barus viscosity overflows double precision") from None
    if not np.all(np.isfinite(out)):
        raise SaturationError("Barus viscosity overflows double precision")
    return out[()] if out.ndim == 0 else out


def barus_mu_prime(law: BarusViscosity, p):
    """``d mu / dp = alpha * mu(p)``."""
    out = law.alpha * barus_mu(law, p)
    if not np.all(np.isfinite(out)):
        raise SaturationError("Barus viscosity derivative overflows")
    return out


def symmetric_eigenvalues(A):
    """Ascending eigenvalues of a real symmetric 3x3 matrix."""
    return np.linalg.eigvalsh(np.asarray(A, dtype=float))


@dataclass(frozen=True)
class EllipticityReport:
    classical_elliptic: bool
    second_gradient_elliptic: bool
    min_eigenvalue: float


def ellipticity_indicator(law: BarusViscosity, p, D, ell1, tol=1e-10) -> EllipticityReport:
    """Ellipticity of the pressure equation at state ``(p, D)``.

    The classical equation is elliptic when ``I - 2 mu'(p) D`` is positive
    definite.  With a second-gradient length the fourth-order term dominates,
    so the equation is elliptic whenever ``ell1 > 0``.
    """
    D = np.asarray(D, dtype=float)
    if D.shape != (3, 3) or not np.all(np.isfinite(D)):
        raise ValidationError("D must be a finite 3x3 array")
    scale = max(1.0, float(np.abs(D).max()))
    if np.abs(D - D.T).max() > tol * scale:
        raise ValidationError("D must be symmetric")
    if abs(np.trace(D)) > tol * scale:
        raise ValidationError("D must be traceless")
    if not (ell1 >= 0 and math.isfinite(ell1)):
        raise ValidationError("ell1 must be finite and >= 0")
    mprime = float(barus_mu_prime(law, p))
    lam_min = float(symmetric_eigenvalues(np.eye(3) - 2.0 * mprime * 0.5 * (D + D.T))[0])
    classical = lam_min > 0.0
    return EllipticityReport(classical, classical or ell1 > 0.0, lam_min)
