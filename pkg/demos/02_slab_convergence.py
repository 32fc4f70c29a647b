"""How good is the one-step slab map?

Random particles cross slabs of one to three targets. The one-step map
(keeping single collisions only) is compared with the full tensor-product
evolution; the error falls like the cube of the coupling.
"""
import numpy as np

from medium_decoherence.collision import BORN
from medium_decoherence.linalg import random_density_matrix
from medium_decoherence.oracle import convergence_sweep, local_slab_family

rng = np.random.default_rng(7)
rho0 = random_density_matrix(8, rng)
couplings = [0.01, 0.02, 0.05, 0.1]

for n in (1, 2, 3):
    fam = local_slab_family(8, 2, n, 7 + n, BORN)
    res = convergence_sweep(fam, rho0, couplings)
    errs = ", ".join(f"{e:.2e}" for e in res.errors)
    print(f"{n} target(s): errors [{errs}]  fitted exponent {res.slope:.3f}")
