"""One crossing of a thin slab of targets.

The particle's reduced state after the slab is

    sum_m q_m (1 + i D_m) rho (1 - i D_m^dag)  +  sum_{j, m_j, l_j} q A_E rho A_E^dag

with ``D_m = sum_j <m_j|T_j|m_j>``. Products of two different targets' T are
dropped (impulse approximation), which lets the configuration sum factorize
target by target: the cost is linear in the number of targets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .collision import (
    CollisionOperator,
    TargetState,
    _a_e,
    check_ensemble,
    computational_basis,
    extract_d_m,
)
from .linalg import apply_local, dagger


@dataclass(frozen=True)
class SlabSpec:
    """Targets of one slab. ``targets[j]`` is the ensemble of target ``j``,
    ``collisions[j]`` its scattering operator with the particle."""

    targets: Sequence[Sequence[TargetState]]
    collisions: Sequence[CollisionOperator]
    width: float = 1.0
    speed: float = 1.0
    density: float = 1.0
    homogeneous: bool = False

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(tuple(e) for e in self.targets))
        object.__setattr__(self, "collisions", tuple(self.collisions))
        if len(self.targets) != len(self.collisions):
            raise ValueError(f"{len(self.targets)} target ensembles but {len(self.collisions)} collisions")
        if self.width <= 0 or self.speed <= 0:
            raise ValueError("slab width and particle speed must be positive")
        for ens, c in zip(self.targets, self.collisions):
            check_ensemble(ens)
            if ens[0].dim != c.target_dim:
                raise ValueError("target state dimension does not match its collision")
        if len({c.particle_dim for c in self.collisions}) > 1:
            raise ValueError("collisions disagree on the particle dimension")
        if self.homogeneous and self.targets:
            w0 = sorted(t.weight for t in self.targets[0])
            for ens in self.targets[1:]:
                if not np.allclose(sorted(t.weight for t in ens), w0, atol=1e-12):
                    raise ValueError("homogeneous slab needs identical weights for every target")

    @property
    def n_targets(self) -> int:
        return len(self.targets)

    @property
    def particle_dim(self) -> int | None:
        return self.collisions[0].particle_dim if self.collisions else None

    @property
    def target_dims(self) -> tuple[int, ...]:
        return tuple(c.target_dim for c in self.collisions)

    @property
    def rate(self) -> float:
        """Inverse crossing time ``v / delta``."""
        return self.speed / self.width

    def joined(self, other: "SlabSpec") -> "SlabSpec":
        """Slab made of this slab's targets followed by ``other``'s, twice as wide
        when both have the same width."""
        return SlabSpec(
            targets=self.targets + other.targets,
            collisions=self.collisions + other.collisions,
            width=self.width + other.width,
            speed=self.speed,
            density=self.density,
            homogeneous=self.homogeneous and other.homogeneous,
        )


@dataclass(frozen=True)
class ParticleEnsemble:
    members: Sequence[tuple[np.ndarray, float]] = field(default_factory=tuple)

    def __post_init__(self):
        members = tuple((np.asarray(v, dtype=complex).ravel(), float(p)) for v, p in self.members)
        total = sum(p for _, p in members)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"particle ensemble probabilities sum to {total}")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_density_matrix(cls, rho: np.ndarray, cutoff: float = 1e-14) -> "ParticleEnsemble":
        w, v = np.linalg.eigh((rho + dagger(rho)) / 2)
        keep = w > cutoff
        w = w[keep] / w[keep].sum()
        return cls(tuple((v[:, i], p) for i, p in zip(np.flatnonzero(keep), w)))

    def density_matrix(self) -> np.ndarray:
        return sum(p * np.outer(v, v.conj()) for v, p in self.members)


def _check_particle(rho: np.ndarray, slab: SlabSpec) -> None:
    if slab.particle_dim is not None and rho.shape[0] != slab.particle_dim:
        raise ValueError(f"particle state has dimension {rho.shape[0]}, slab expects {slab.particle_dim}")


def out_state(phi: np.ndarray, slab_pure: Sequence[TargetState], slab: SlabSpec, exact: bool = False) -> np.ndarray:
    """Particle (x) slab state after the crossing, starting from ``phi`` and
    the product of ``slab_pure``.

    ``exact=False`` applies ``1 + i sum_j T_j``; ``exact=True`` applies the
    unitaries ``S_j`` one after another in slab order.
    """
    phi = np.asarray(phi, dtype=complex).ravel()
    if len(slab_pure) != slab.n_targets:
        raise ValueError(f"need one target state per target ({slab.n_targets}), got {len(slab_pure)}")
    dims = (phi.size,) + slab.target_dims
    if slab.n_targets and phi.size != slab.particle_dim:
        raise ValueError(f"particle state has dimension {phi.size}, slab expects {slab.particle_dim}")
    psi = phi
    for m, c in zip(slab_pure, slab.collisions):
        if m.dim != c.target_dim:
            raise ValueError("target state dimension does not match its collision")
        psi = np.kron(psi, m.vector)
    if exact:
        for j, c in enumerate(slab.collisions):
            psi = apply_local(c.unitary, psi, dims, (0, j + 1))
        return psi
    out = psi.copy()
    for j, c in enumerate(slab.collisions):
        out = out + 1j * apply_local(c.T, psi, dims, (0, j + 1))
    return out


def footprint_decompose(out: np.ndarray, slab_pure: Sequence, particle_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Split ``out`` into ``phi' (x) |m>`` (slab untouched) and the orthogonal
    footprint ``(1 - P) out`` with ``P = I (x) |m><m|``.

    Returns ``(phi_prime, footprint)``; ``phi_prime`` lives on the particle
    space, ``footprint`` on the full space.
    """
    m = np.ones(1, dtype=complex)
    for t in slab_pure:
        m = np.kron(m, t.vector if isinstance(t, TargetState) else np.asarray(t, dtype=complex))
    out = np.asarray(out, dtype=complex).ravel()
    if out.size != particle_dim * m.size:
        raise ValueError("out state does not live on particle (x) slab space")
    phi_prime = out.reshape(particle_dim, m.size) @ m.conj()
    footprint = out - np.kron(phi_prime, m)
    return phi_prime, footprint


def _target_terms(c: CollisionOperator, ensemble, basis):
    """Per-target pieces of the one-step map: mean ``D``, the ensemble's
    ``D_m`` with weights, and the footprint operators with weights."""
    Ds = [(m.weight, extract_d_m(c, m)) for m in ensemble]
    d_mean = sum(q * D for q, D in Ds)
    footprints = []
    for (q, D), m in zip(Ds, ensemble):
        for l in basis:
            a = _a_e(c, l, m, D)
            if np.any(a):
                footprints.append((q, a))
    return d_mean, Ds, footprints


def one_step_parts(rho: np.ndarray, slab: SlabSpec) -> tuple[np.ndarray, np.ndarray]:
    """``(no_change, footprint)`` contributions to the one-step map; their sum
    is :func:`one_step`, their traces the probabilities of
    :func:`change_probabilities`."""
    rho = np.asarray(rho, dtype=complex)
    if slab.n_targets == 0:
        return rho.copy(), np.zeros_like(rho)
    _check_particle(rho, slab)
    d_total = np.zeros_like(rho)
    spread = np.zeros_like(rho)
    foot = np.zeros_like(rho)
    # fixed target order keeps the sums bit-reproducible
    for ens, c in zip(slab.targets, slab.collisions):
        basis = computational_basis(c.target_dim)
        d_mean, Ds, footprints = _target_terms(c, ens, basis)
        d_total += d_mean
        for q, D in Ds:
            spread += q * (D @ rho @ dagger(D))
        spread -= d_mean @ rho @ dagger(d_mean)
        for q, a in footprints:
            foot += q * (a @ rho @ dagger(a))
    eye = np.eye(rho.shape[0])
    no_change = (eye + 1j * d_total) @ rho @ (eye - 1j * dagger(d_total)) + spread
    return no_change, foot


def one_step(rho_in: np.ndarray, slab: SlabSpec) -> np.ndarray:
    """Particle reduced density matrix after crossing ``slab``."""
    no_change, foot = one_step_parts(rho_in, slab)
    return no_change + foot


def change_probabilities(rho_in: np.ndarray, slab: SlabSpec) -> tuple[float, float]:
    """``(p_change, p_no_change)``: probability that some target changed state,
    from the footprint operators, and that the slab was left intact, from
    the ``D_M`` operators."""
    no_change, foot = one_step_parts(rho_in, slab)
    return float(np.real(np.trace(foot))), float(np.real(np.trace(no_change)))


def _embed_site(op: np.ndarray, dims: Sequence[int], site: int) -> np.ndarray:
    left = int(np.prod(dims[:site]))
    right = int(np.prod(dims[site + 1 :]))
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


def slab_update(rho_slab_in: np.ndarray, particle: ParticleEnsemble, slab: SlabSpec, max_dim: int = 4096) -> np.ndarray:
    """Slab reduced density matrix after one particle crossing.

    The same decomposition as :func:`one_step` with particle and slab
    exchanged: for each particle member ``phi_n``,
    ``D^n = <phi_n| T |phi_n>`` and ``A^(l,n) = <l|T|phi_n> - D^n <l|phi_n>``
    act on the slab space, ``T = sum_j T_j``.
    """
    rho = np.asarray(rho_slab_in, dtype=complex)
    if slab.n_targets == 0:
        return rho.copy()
    tdims = slab.target_dims
    dslab = int(np.prod(tdims))
    if dslab > max_dim:
        raise ValueError(f"slab dimension {dslab} exceeds cap {max_dim}")
    if rho.shape != (dslab, dslab):
        raise ValueError(f"slab state has shape {rho.shape}, expected {(dslab, dslab)}")
    dp = slab.particle_dim
    eye_p = np.eye(dp, dtype=complex)
    out = np.zeros_like(rho)
    for phi, p in particle.members:
        if phi.size != dp:
            raise ValueError("particle member dimension does not match slab")
        D = np.zeros((dslab, dslab), dtype=complex)
        blocks = [np.zeros((dslab, dslab), dtype=complex) for _ in range(dp)]
        for j, c in enumerate(slab.collisions):
            T4 = c.T4
            D += _embed_site(np.einsum("a,aibj,b->ij", phi.conj(), T4, phi), tdims, j)
            for l in range(dp):
                blocks[l] += _embed_site(np.einsum("ibj,b->ij", T4[l], phi), tdims, j)
        eye = np.eye(dslab)
        acc = (eye + 1j * D) @ rho @ (eye - 1j * dagger(D))
        for l in range(dp):
            a = blocks[l] - D * np.vdot(eye_p[l], phi)
            acc += a @ rho @ dagger(a)
        out += p * acc
    return out


def mean_d(slab: SlabSpec) -> np.ndarray:
    """Configuration-averaged ``sum_j sum_m q_m D_M^(m_j)``."""
    total = np.zeros((slab.particle_dim,) * 2, dtype=complex)
    for ens, c in zip(slab.targets, slab.collisions):
        for m in ens:
            total += m.weight * extract_d_m(c, m)
    return total


__all__ = [
    "SlabSpec",
    "ParticleEnsemble",
    "out_state",
    "footprint_decompose",
    "one_step",
    "one_step_parts",
    "slab_update",
    "change_probabilities",
    "mean_d",
]
