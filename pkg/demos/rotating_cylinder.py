"""
Rotating cylinder
=================

Rigid rotation is exact under weak adherence.  Under strong adherence a
layer forms at the wall and the radial pressure follows from an ODE that is
solved twice: once in closed form with quadrature, once by finite differences.
"""

import numpy as np

from sgflow.couette import CouetteProblem, make_tc_profile, pressure_closed_form, pressure_fd_bvp
from sgflow.profile import uniform_grid

sigma = uniform_grid(401)
strong = make_tc_profile("strong", 0.1, sigma)
weak = make_tc_profile("weak", 0.1, sigma)
print("max |u - sigma|, strong:", np.max(np.abs(strong.u - sigma)))
print("max |u - sigma|, weak:  ", np.max(np.abs(weak.u - sigma)))

problem = CouetteProblem.dimensionless(lambda0=0.1, lambda1=0.1, bc="strong")
fd = pressure_fd_bvp(problem, n=1600)
print("dual solver gap:", fd.report.dual_solver_gap)
print("pi'(1):         ", fd.pi_prime[-1])

# the pressure approaches the classical sigma^2 / 2 as lambda1 decreases
grid = uniform_grid(401)
for lam in (0.2, 0.1, 0.05):
    sol = pressure_closed_form(CouetteProblem.dimensionless(0.0, lam), grid)
    print(f"lambda1={lam:<5} max|pi - sigma^2/2| = {np.max(np.abs(sol.pi - 0.5 * grid**2)):.4f}")
