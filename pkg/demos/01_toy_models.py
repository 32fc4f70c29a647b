"""Two ways a particle loses coherence in a single collision.

A two-level particle in |1> meets a two-level box. In the first toy the box
is pure but the collision leaves a footprint in it; in the second the box
is a mixture and the collision depends on which member it is. Both leave
the particle maximally mixed, for different reasons.
"""
import numpy as np

from medium_decoherence.linalg import purity
from medium_decoherence.collision import TargetState
from medium_decoherence.oracle import toy_footprint, toy_mixture

np.set_printoptions(precision=3, suppress=True)

particle, box = toy_footprint()
print("footprint toy")
print("  particle after:\n", particle)
print("  purity of particle:", purity(particle))
print("  purity of box:     ", purity(box), "(entangled with the particle)")

particle, box = toy_mixture()
print("\nmixture toy, box equally likely in either state")
print("  particle after:\n", particle)
print("  box after (unchanged):\n", box)

# a box known to be in one configuration does nothing to the particle's purity
a = np.eye(2)[0]
particle, _ = toy_mixture([TargetState(0, a)])
print("\nmixture toy, box known to be |a>")
print("  purity of particle:", purity(particle))
