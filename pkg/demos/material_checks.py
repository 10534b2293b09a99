"""
Material parameters
===================

Viscosities to length scales and back, dissipation, and where the classical
pressure equation stops being elliptic.
"""

import numpy as np

from sgflow.errors import ConstraintViolation
from sgflow.material import (
    BarusViscosity,
    DissipationInputs,
    dissipation_rate,
    dissipation_witness,
    ellipticity_indicator,
    lengths_from_etas,
)

lengths = lengths_from_etas(1.0, 2.0, 1.0, -0.25)
print(lengths, "ell1 =", lengths.ell1)

state = DissipationInputs(d_sq=1.0, hat_grad_d_sq=0.5, hat_grad_w_sq=0.2, lap_v_sq=3.0)
print("dissipation (two forms):", dissipation_rate(1.0, lengths, state))

# viscosities outside the admissible cone
try:
    lengths_from_etas(1.0, 1.0, 0.0, 0.2)
except ConstraintViolation as exc:
    print("rejected:", exc.inequality)
    print("witness:", dissipation_witness(1.0, 1.0, 0.0, 0.2))

# simple shear with a Barus viscosity: the classical indicator flips at mu' * gamma = 1
law = BarusViscosity(mu0=1.0, alpha=1.0)
for gamma in (0.5, 0.999, 1.001, 2.0):
    D = np.zeros((3, 3))
    D[0, 1] = D[1, 0] = gamma / 2
    rep = ellipticity_indicator(law, 0.0, D, ell1=0.1)
    print(f"gamma={gamma:<6} classical={rep.classical_elliptic!s:<5} second-gradient={rep.second_gradient_elliptic}")
