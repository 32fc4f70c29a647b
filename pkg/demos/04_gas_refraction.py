"""A particle in a dilute 1-D gas: refraction and momentum diffusion.

The medium energy <k|H|k> gives a complex index k'/k. With the exact
contact T-matrix it has an absorptive part; the scattering kernel then
redistributes momentum while conserving probability.
"""
import numpy as np

from medium_decoherence import gas as G

g = 0.05
grid = G.MomentumGrid.uniform(4.0, 401)
cfg = G.GasConfig(m1=1.0, m2=1000.0, density=0.1, grid=grid, potential=G.contact_potential(g),
                  t_matrix=G.contact_t_matrix_1d(g), eta=0.4)

print(" k    Re n         Im n         Fermi form")
for k in (1.0, 2.0, 3.0):
    r = G.refraction_index(cfg, k, order=1)
    f = G.fermi_index(cfg, k)
    print(f"{k:3.1f}  {r.ratio.real:.8f}  {r.ratio.imag:.3e}  {f.real:.8f}")

kern = G.decoherence_kernel_heavy_target(cfg, max_transfer=2.0)
psi = G.momentum_packet(grid, 2.0, 0.2)
rho = np.outer(psi, psi.conj())
dot = kern.lindblad_rhs(rho)
print("\nscattering rate out of the packet:", float(np.real(np.vdot(psi, kern.loss() * psi))))
print("d(trace)/dt:", abs(np.trace(dot)))
print("d<E>/dt (elastic, heavy targets):", kern.energy_drift(rho, cfg.m1))
