"""
Flow through a tube
===================

Velocity profiles for decreasing lambda1, the discharge rate, and a check
that the closed form solves its differential equation.
"""

import numpy as np

from sgflow.material import LengthScales
from sgflow.poiseuille import (
    convergence_sweep,
    make_profile,
    ode_residual,
    phi_quadrature,
    phi_strong,
    u_classical,
)
from sgflow.profile import uniform_grid

sigma = uniform_grid(801)

# the boundary layer shrinks with lambda1 and the profile approaches 1 - sigma^2
for lam in (0.3, 0.1, 0.02):
    prof = make_profile("strong", LengthScales.spherical(lam), sigma)
    print(f"lambda1={lam:<5} u(0)={prof.u[0]:.6f}  residual={ode_residual(prof, lam).sup:.1e}")

print("classical u(0) =", u_classical(0.0))

# discharge: closed form against direct quadrature of 4 * int u sigma
for lam in (0.3, 0.1, 0.05):
    closed = phi_strong(lam)
    quad = phi_quadrature("strong", LengthScales.spherical(lam)).value
    print(f"Phi({lam}) = {closed:.12f}   quadrature gap {abs(closed - quad):.1e}")

# distance to the classical profile, weak and strong adherence
for bc in ("strong", "weak"):
    table = convergence_sweep(bc, sigma, [0.2, 0.1, 0.05, 0.02])
    print(bc, np.array2string(table.sup_errors, precision=4))
