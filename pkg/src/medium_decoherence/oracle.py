"""Exact reference evolution of particle (x) all targets, and the two-level
toy models.

``exact_crossing`` applies every target's unitary ``S_j`` in turn to the full
tensor-product state and only then traces the targets out, so it contains
everything the one-step map drops: re-scattering products ``T_i T_j`` and
all orders in the coupling.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .collision import (
    BORN,
    EXACT,
    TargetState,
    build_collision,
    collision_from_unitary,
    pure_ensemble,
)
from .linalg import apply_local, dagger, partial_trace, random_hermitian, random_state
from .slabstep import SlabSpec, one_step

MAX_DIM = 4096
MAX_CONFIGURATIONS = 64
ERROR_FLOOR = 1e-14


def configurations(slab: SlabSpec, max_configurations: int = MAX_CONFIGURATIONS):
    """All product configurations of the slab with their joint weights."""
    count = int(np.prod([len(e) for e in slab.targets])) if slab.targets else 1
    if count > max_configurations:
        raise ValueError(
            f"slab has {count} configurations (cap {max_configurations}); use pure target states"
        )
    for combo in itertools.product(*slab.targets):
        yield combo, float(np.prod([t.weight for t in combo]))


def _crossing_vectors(rho: np.ndarray, slab: SlabSpec, order: str):
    """Weighted full-space vectors whose mixture is the post-crossing state."""
    w, v = np.linalg.eigh((rho + dagger(rho)) / 2)
    dims = (rho.shape[0],) + slab.target_dims
    sites = list(range(slab.n_targets))
    if order == "reverse":
        sites = sites[::-1]
    elif order != "forward":
        raise ValueError(f"order must be 'forward' or 'reverse', got {order!r}")
    unitaries = [c.unitary for c in slab.collisions]
    for combo, q in configurations(slab):
        slab_vec = np.ones(1, dtype=complex)
        for t in combo:
            slab_vec = np.kron(slab_vec, t.vector)
        for k in range(rho.shape[0]):
            if w[k] <= 1e-15:
                continue
            psi = np.kron(v[:, k], slab_vec)
            for j in sites:
                psi = apply_local(unitaries[j], psi, dims, (0, j + 1))
            yield q * w[k], psi


def exact_crossing(
    rho_particle: np.ndarray,
    slab: SlabSpec,
    order: str = "forward",
    max_dim: int = MAX_DIM,
) -> np.ndarray:
    """Particle state after exact unitary scattering on every target, targets
    traced out. Mixed slabs are enumerated configuration by configuration."""
    rho = np.asarray(rho_particle, dtype=complex)
    if slab.n_targets == 0:
        return rho.copy()
    if rho.shape[0] != slab.particle_dim:
        raise ValueError(f"particle state has dimension {rho.shape[0]}, slab expects {slab.particle_dim}")
    total = rho.shape[0] * int(np.prod(slab.target_dims))
    if total > max_dim:
        raise ValueError(f"full dimension {total} exceeds cap {max_dim}")
    rest = int(np.prod(slab.target_dims))
    out = np.zeros_like(rho)
    for weight, psi in _crossing_vectors(rho, slab, order):
        mat = psi.reshape(rho.shape[0], rest)
        out += weight * (mat @ dagger(mat))
    return out


def exact_slab_state(rho_particle: np.ndarray, slab: SlabSpec, order: str = "forward") -> np.ndarray:
    """Slab reduced density matrix after the exact crossing."""
    rho = np.asarray(rho_particle, dtype=complex)
    rest = int(np.prod(slab.target_dims))
    out = np.zeros((rest, rest), dtype=complex)
    for weight, psi in _crossing_vectors(rho, slab, order):
        mat = psi.reshape(rho.shape[0], rest)
        out += weight * (mat.T @ mat.conj())
    return out


@dataclass(frozen=True)
class ExactRun:
    full_state: np.ndarray | None
    reduced: np.ndarray
    approx: np.ndarray
    error: float


def exact_run(rho_particle: np.ndarray, slab: SlabSpec, keep_full_below: int = 1024) -> ExactRun:
    """Exact crossing next to the one-step approximation, with their
    operator-norm distance. The full state is kept only for small spaces."""
    reduced = exact_crossing(rho_particle, slab)
    approx = one_step(rho_particle, slab)
    full = None
    total = rho_particle.shape[0] * int(np.prod(slab.target_dims or (1,)))
    if slab.n_targets and total <= keep_full_below:
        full = np.zeros((total, total), dtype=complex)
        for weight, psi in _crossing_vectors(np.asarray(rho_particle, dtype=complex), slab, "forward"):
            full += weight * np.outer(psi, psi.conj())
    return ExactRun(full, reduced, approx, float(np.linalg.norm(approx - reduced, 2)))


@dataclass(frozen=True)
class SweepResult:
    couplings: np.ndarray
    errors: np.ndarray
    slope: float
    prefactor: float
    exact: bool

    def bound(self, coupling: float) -> float:
        """Fitted error model ``prefactor * coupling**slope``."""
        return self.prefactor * coupling**self.slope


def fit_power_law(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Least-squares ``log y = log c + p log x``; returns ``(p, c)``."""
    p, logc = np.polyfit(np.log(x), np.log(y), 1)
    return float(p), float(np.exp(logc))


def convergence_sweep(
    make_slab: Callable[[float], SlabSpec],
    rho0: np.ndarray,
    couplings: Sequence[float],
) -> SweepResult:
    """Log-log slope of ``||one_step - exact_crossing||`` against the coupling."""
    lam = np.asarray(sorted(couplings), dtype=float)
    if lam.size < 4 or lam[-1] / lam[0] < 10 * (1 - 1e-9):
        raise ValueError("need at least 4 couplings spanning a decade")
    errors = np.array([float(np.linalg.norm(one_step(rho0, s) - exact_crossing(rho0, s), 2))
                       for s in map(make_slab, lam)])
    below = errors < ERROR_FLOOR
    if below.all():
        return SweepResult(lam, errors, float("nan"), 0.0, True)
    if below.any():
        raise ValueError(f"degenerate fit: errors {errors} partly below the {ERROR_FLOOR} floor")
    slope, pref = fit_power_law(lam, errors)
    return SweepResult(lam, errors, slope, pref, False)


# --- fixtures -------------------------------------------------------------

def block_kernel(
    particle_dim: int,
    block: Sequence[int],
    target_dim: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Random hermitian kernel supported on ``block`` (x) target.

    Kernels on disjoint particle blocks have vanishing products, which is
    the finite-dimensional stand-in for spatially separated targets.
    """
    block = list(block)
    local = random_hermitian(len(block) * target_dim, rng)
    P = np.zeros((particle_dim, len(block)))
    P[block, range(len(block))] = 1.0
    iso = np.kron(P, np.eye(target_dim))
    return iso @ local @ iso.T


def random_ensemble(target_dim: int, rng: np.random.Generator, mixed: bool = True) -> list[TargetState]:
    if not mixed:
        return pure_ensemble(random_state(target_dim, rng))
    # two non-orthogonal members with unequal weights
    q = rng.uniform(0.25, 0.75)
    return [
        TargetState(0, random_state(target_dim, rng), q),
        TargetState(1, random_state(target_dim, rng), 1.0 - q),
    ]


def partition(particle_dim: int, n_blocks: int) -> list[list[int]]:
    return [list(b) for b in np.array_split(np.arange(particle_dim), n_blocks)]


def local_slab_family(
    particle_dim: int,
    target_dim: int,
    n_targets: int,
    seed: int,
    mode: str = BORN,
    mixed: bool = True,
    blocks: Sequence[Sequence[int]] | None = None,
    width: float = 1.0,
    speed: float = 1.0,
) -> Callable[[float], SlabSpec]:
    """Slab factory ``coupling -> SlabSpec`` with fixed random kernels and
    ensembles. Targets sit on disjoint particle blocks unless ``blocks`` says
    otherwise."""
    rng = np.random.default_rng(seed)
    blocks = partition(particle_dim, n_targets) if blocks is None else blocks
    kernels = [block_kernel(particle_dim, b, target_dim, rng) for b in blocks]
    ensembles = [random_ensemble(target_dim, rng, mixed) for _ in blocks]

    def make(coupling: float) -> SlabSpec:
        cols = [build_collision(K, coupling, mode, (particle_dim, target_dim)) for K in kernels]
        return SlabSpec(ensembles, cols, width=width, speed=speed)

    return make


# --- the two-level toy models -------------------------------------------

KET_1, KET_2 = np.eye(2, dtype=complex)
KET_A, KET_B = np.eye(2, dtype=complex)


def footprint_unitary() -> np.ndarray:
    """Rotation taking ``|1 a>`` to ``(|1 a> - |2 b>)/sqrt 2`` (identity on
    ``|1 b>``, ``|2 a>``). Basis order particle (x) box."""
    s = 1 / np.sqrt(2)
    U = np.eye(4, dtype=complex)
    i1a, i2b = 0, 3
    U[i1a, i1a], U[i2b, i1a] = s, -s
    U[i1a, i2b], U[i2b, i2b] = s, s
    return U


def mixture_unitary() -> np.ndarray:
    """Box ``|a>`` leaves the particle alone, box ``|b>`` swaps 1 <-> 2."""
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    return np.kron(np.eye(2), np.outer(KET_A, KET_A)) + np.kron(X, np.outer(KET_B, KET_B))


def toy_footprint_slab() -> SlabSpec:
    return SlabSpec([pure_ensemble(KET_A)], [collision_from_unitary(footprint_unitary(), (2, 2))])


def toy_mixture_slab(box=None) -> SlabSpec:
    if box is None:
        box = [TargetState(0, KET_A, 0.5), TargetState(1, KET_B, 0.5)]
    return SlabSpec([box], [collision_from_unitary(mixture_unitary(), (2, 2))])


def _toy(slab: SlabSpec) -> tuple[np.ndarray, np.ndarray]:
    rho = np.outer(KET_1, KET_1)
    return exact_crossing(rho, slab), exact_slab_state(rho, slab)


def toy_footprint() -> tuple[np.ndarray, np.ndarray]:
    """Particle ``|1>``, box ``|a>``, entangling collision.

    Returns ``(particle state, box state)`` after the crossing: both are
    ``I/2`` and the footprint sits in the particle-box correlations.
    """
    return _toy(toy_footprint_slab())


def toy_mixture(box=None) -> tuple[np.ndarray, np.ndarray]:
    """Particle ``|1>``, box in ``(|a><a| + |b><b|)/2`` (or the given
    ensemble), swap-on-b collision. Returns ``(particle state, box state)``."""
    return _toy(toy_mixture_slab(box))
