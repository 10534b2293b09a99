"""Closed-form cylindrical flows of a second-gradient incompressible fluid.

Modules
-------
bessel      modified Bessel functions I0, I1, K0, K1 with overflow-free scaled forms
material    viscosities, length scales, dissipation, Barus viscosity, ellipticity
poiseuille  tube flow: profiles, discharge rates, residuals, classical-limit sweeps
couette     rotating-cylinder flow and its radial pressure (two independent solvers)
numerics    quadrature, finite differences, tridiagonal solves, cumulative integrals
cli         the ``sgflow`` command
"""
__version__ = "0.1.0"

from .errors import (
    ConstraintViolation,
    DomainError,
    GridError,
    QuadratureError,
    SaturationError,
    SGFlowError,
    SolverError,
    ValidationError,
)
from .material import (
    BarusViscosity,
    DissipationInputs,
    LengthScales,
    ViscosityCoefficients,
    check_dissipativity,
    dissipation_rate,
    ellipticity_indicator,
    etas_from_lengths,
    lengths_from_etas,
)
from .profile import RadialProfile, SolverReport, uniform_grid
from .poiseuille import BoundaryCondition, PoiseuilleProblem
from .couette import CouetteProblem, PressureSolve

__all__ = [
    "__version__",
    "BarusViscosity",
    "BoundaryCondition",
    "ConstraintViolation",
    "CouetteProblem",
    "DissipationInputs",
    "DomainError",
    "GridError",
    "LengthScales",
    "PoiseuilleProblem",
    "PressureSolve",
    "QuadratureError",
    "RadialProfile",
    "SGFlowError",
    "SaturationError",
    "SolverError",
    "SolverReport",
    "ValidationError",
    "ViscosityCoefficients",
    "check_dissipativity",
    "dissipation_rate",
    "ellipticity_indicator",
    "etas_from_lengths",
    "lengths_from_etas",
    "uniform_grid",
]
