"""From slabs to a master equation, and the coherent/mixed split.

A slab of overlapping targets defines a Lindblad generator. The state is
evolved, then split into the part that never jumped (coherent) and the
part fed by jumps (mixed). The coherent weight only decays.
"""
import numpy as np

from medium_decoherence.collision import EXACT
from medium_decoherence.generator import build_generator, evolve, split_evolve
from medium_decoherence.linalg import random_density_matrix
from medium_decoherence.oracle import local_slab_family

slab = local_slab_family(4, 2, 2, 21, EXACT, blocks=[[0, 1, 2], [1, 2, 3]], width=0.5, speed=2.0)(0.4)
gen = build_generator(slab)
print(f"{len(gen.jumps_mixture)} mixture jumps, {len(gen.jumps_footprint)} footprint jumps")

rho0 = random_density_matrix(4, np.random.default_rng(1), rank=1)
traj = evolve(rho0, gen, 5.0, 0.01, save_every=100)
coh, mix = split_evolve(rho0, gen, 5.0, 0.01, save_every=100)

print(" t    trace   purity  tr(coherent)  tr(mixed)")
for t, tr, p, c, m in zip(traj.times, traj.traces(), traj.purities(), coh.traces(), mix.traces()):
    print(f"{t:4.1f}  {tr:.6f}  {p:.4f}  {c:.6f}     {m:.6f}")
