import csv

import numpy as np
import pytest
from scipy.linalg import expm

from medium_decoherence.collision import EXACT, TargetState, build_collision, collision_from_unitary, pure_ensemble
from medium_decoherence.generator import (
    LindbladGenerator,
    amplitude_damping_generator,
    build_generator,
    effective_hamiltonian_from_S,
    evolve,
    pre_lindblad_hamiltonian,
    propagate_exact,
    split_evolve,
    write_trajectory_csv,
    zero_generator,
)
from medium_decoherence.linalg import dagger, purity, random_density_matrix, random_hermitian
from medium_decoherence.oracle import local_slab_family
from medium_decoherence.slabstep import SlabSpec, mean_d, one_step_parts


def _generic():
    return local_slab_family(4, 2, 2, 21, EXACT, blocks=[[0, 1, 2], [1, 2, 3]], width=0.5, speed=2.0)(0.4)


def test_zero_collision_gives_zero_generator():
    c = collision_from_unitary(np.eye(6), (3, 2))
    gen = build_generator(SlabSpec([[TargetState(0, [1, 0], 0.4), TargetState(1, [0, 1], 0.6)]], [c]))
    assert not gen.jumps and np.allclose(gen.h_eff, 0)


def test_generator_invariants():
    gen = _generic()
    gen = build_generator(gen)
    assert np.max(np.abs(gen.h_eff - dagger(gen.h_eff))) <= 1e-12
    assert all(r >= 0 for _, r in gen.jumps)
    with pytest.raises(ValueError):
        LindbladGenerator(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        LindbladGenerator(np.zeros((2, 2)), (), ((np.eye(2), -1.0),))


def test_pure_ensemble_has_only_footprint_jumps():
    gen = build_generator(local_slab_family(4, 2, 2, 22, EXACT, mixed=False)(0.5))
    assert gen.jumps_mixture == () and len(gen.jumps_footprint) > 0


def test_mixture_rate_for_equal_weights():
    """q = (1/2, 1/2): each ordered pair's A rho A^dag carries (v/delta)/8."""
    rng = np.random.default_rng(23)
    c = build_collision(random_hermitian(8, rng), 0.3, EXACT, (4, 2))
    slab = SlabSpec([[TargetState(0, [1, 0], 0.5), TargetState(1, [0, 1], 0.5)]], [c], width=0.5, speed=1.5)
    gen = build_generator(slab)
    assert len(gen.jumps_mixture) == 2
    for _, rate in gen.jumps_mixture:
        assert 2 * rate == pytest.approx(slab.rate / 8)


def test_mixture_jumps_reproduce_configuration_spread():
    """sum_{n,m} q_n q_m A rho A^dag / 2 equals sum_m q_m D rho D^dag - Dbar rho Dbar^dag,
    the spread term of the slab map, per unit crossing rate."""
    slab = local_slab_family(3, 3, 1, 24, EXACT)(0.6)
    gen = build_generator(slab)
    rho = random_density_matrix(3, np.random.default_rng(25))
    mixture_only = LindbladGenerator(np.zeros((3, 3)), gen.jumps_mixture, ())
    from medium_decoherence.collision import extract_d_m

    ens, c = slab.targets[0], slab.collisions[0]
    Ds = [(m.weight, extract_d_m(c, m)) for m in ens]
    dbar = sum(q * D for q, D in Ds)
    spread = sum(q * D @ rho @ dagger(D) for q, D in Ds) - dbar @ rho @ dagger(dbar)
    assert np.allclose(mixture_only.jump_term(rho), slab.rate * spread, atol=1e-14)


def test_footprint_jumps_reproduce_footprint_term():
    slab = _generic()
    gen = build_generator(slab)
    rho = random_density_matrix(4, np.random.default_rng(26))
    foot_only = LindbladGenerator(np.zeros((4, 4)), (), gen.jumps_footprint)
    _, foot = one_step_parts(rho, slab)
    assert np.allclose(foot_only.jump_term(rho), slab.rate * foot, atol=1e-14)


def test_quadratic_switch_and_pre_lindblad_form():
    slab = _generic()
    gen = build_generator(slab)
    kept = build_generator(slab, keep_quadratic=True)
    quad = gen.h_quadratic
    assert np.allclose(kept.h_eff - gen.h_eff, (quad + dagger(quad)) / 2)
    H = pre_lindblad_hamiltonian(gen, slab)
    d = mean_d(slab)
    assert np.allclose(H, -slab.rate * d + quad)


def test_effective_hamiltonian_from_S():
    assert np.allclose(effective_hamiltonian_from_S(np.eye(3), 2.0), 0)
    rng = np.random.default_rng(27)
    K = random_hermitian(6, rng, scale=0.9)
    lam = 2.0
    S = expm(-1j * lam * K)
    assert np.allclose(effective_hamiltonian_from_S(S, 1.5), 1.5 * lam * K, atol=1e-10)
    with pytest.raises(ValueError, match="branch"):
        effective_hamiltonian_from_S(np.diag([1, -1]).astype(complex), 1.0)
    with pytest.raises(ValueError):
        effective_hamiltonian_from_S(2 * np.eye(2), 1.0)


def test_log_power_identity():
    rng = np.random.default_rng(28)
    c = build_collision(random_hermitian(4, rng), 0.7, EXACT, (2, 2))
    r = 10
    H = effective_hamiltonian_from_S(c.S, 1.0)
    psi = np.linalg.qr(rng.normal(size=(4, 1)) + 0j)[0][:, 0]
    direct = np.linalg.matrix_power(np.eye(4) + 1j * c.T, r) @ psi
    via_log = expm(-1j * r * H) @ psi
    assert np.linalg.norm(direct - via_log) <= 1e-10


def test_evolve_zero_generator():
    rho = random_density_matrix(3, np.random.default_rng(29))
    traj = evolve(rho, zero_generator(3), 1.0, 0.1)
    assert len(traj) == 11 and np.allclose(traj.states, rho)


def test_amplitude_damping():
    g = 0.7
    gen = amplitude_damping_generator(g)
    rho0 = np.diag([0.0, 1.0]).astype(complex)
    traj = evolve(rho0, gen, 5.0 / g, 1e-3 / g, save_every=50)
    assert np.max(np.abs(traj.states[:, 1, 1].real - np.exp(-2 * g * traj.times))) <= 1e-6
    coh, mix = split_evolve(rho0, gen, 5.0 / g, 1e-3 / g, save_every=50)
    assert np.max(np.abs(coh.traces() - np.exp(-2 * g * coh.times))) <= 1e-6


def test_evolve_min_eigenvalue_after_many_steps():
    gen = build_generator(_generic())
    rho = random_density_matrix(4, np.random.default_rng(30), rank=1)
    traj = evolve(rho, gen, 1.0, 1e-3, save_every=100)
    assert traj.min_eigenvalues().min() >= -1e-9


def test_evolve_step_checks():
    gen = amplitude_damping_generator(1.0)
    with pytest.raises(ValueError):
        evolve(np.eye(2) / 2, gen, 1.0, 0.3)
    with pytest.warns(UserWarning):
        evolve(np.eye(2) / 2, gen, 0.5, 0.5)
    with pytest.raises(FloatingPointError):
        evolve(np.eye(2) / 2, amplitude_damping_generator(1e3), 1.0, 0.5, max_trace_step=1e-6)


def test_rk4_order():
    gen = build_generator(_generic())
    rho0 = random_density_matrix(4, np.random.default_rng(31))
    exact = propagate_exact(rho0, gen, 2.0)
    errs = [np.linalg.norm(evolve(rho0, gen, 2.0, dt).final - exact, 2) for dt in (0.05, 0.025)]
    assert errs[0] / errs[1] >= 8


def test_split_evolution_properties():
    gen = build_generator(_generic())
    rho0 = random_density_matrix(4, np.random.default_rng(32))
    coh, mix = split_evolve(rho0, gen, 2.0, 0.01)
    full = evolve(rho0, gen, 2.0, 0.01)
    assert max(np.linalg.norm(c + m - r, 2) for c, m, r in zip(coh.states, mix.states, full.states)) <= 1e-8
    assert np.all(np.diff(coh.traces()) <= 1e-15)
    assert np.allclose(mix.traces(), 1 - coh.traces(), atol=1e-8)
    assert coh.min_eigenvalues().min() >= -1e-8 and mix.min_eigenvalues().min() >= -1e-8


def test_split_without_jumps():
    H = random_hermitian(3, np.random.default_rng(33))
    _, mix = split_evolve(random_density_matrix(3, np.random.default_rng(34)), LindbladGenerator(H), 1.0, 0.01)
    assert np.all(mix.states == 0)


def test_pure_targets_without_footprint_are_unitary():
    gen = build_generator(local_slab_family(4, 2, 2, 35, EXACT, mixed=False)(0.5)).without_footprint()
    rho0 = random_density_matrix(4, np.random.default_rng(36))
    traj = evolve(rho0, gen, 3.0, 0.01)
    assert np.ptp(traj.purities()) <= 1e-9


def test_trajectory_csv(tmp_path):
    traj = evolve(np.diag([0.0, 1.0]).astype(complex), amplitude_damping_generator(1.0), 0.1, 0.01)
    path = tmp_path / "t.csv"
    write_trajectory_csv(path, traj, [(0, 0), (0, 1)])
    rows = list(csv.reader(open(path)))
    assert rows[0][:4] == ["t [1/energy (hbar=1)]", "trace", "purity", "min_eigenvalue"]
    assert len(rows) == 12
