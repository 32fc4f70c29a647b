"""Single-target scattering operators and the particle-space blocks derived
from them.

A collision is specified by a hermitian kernel ``K`` on particle (x) target
and a coupling ``lam``. In exact mode ``S = exp(-i lam K)`` and ``T = i(1 - S)``
so that ``S = 1 + iT`` is exactly unitary. In Born mode ``T`` is the
second-order truncation ``-lam K + (i/2) lam^2 K^2``.

The sign convention ``T ~ -lam K`` at first order means ``lam K`` plays the role
of the interaction energy times the collision time; a repulsive ``K``
therefore gives a positive mean energy shift (see :mod:`.gas`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import expm

from .linalg import dagger, is_hermitian

EXACT = "exact"
BORN = "born"


@dataclass(frozen=True)
class TargetState:
    """One member ``|m>`` of a target ensemble, with probability ``weight``
    and centre ``position`` (only used by the spatial fixtures)."""

    label: int
    vector: np.ndarray
    weight: float = 1.0
    position: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex).ravel()
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"target state {self.label} is not normalized (|v| = {norm})")
        if not 0.0 <= self.weight <= 1.0 + 1e-12:
            raise ValueError(f"target weight {self.weight} is not a probability")
        object.__setattr__(self, "vector", v)

    @property
    def dim(self) -> int:
        return self.vector.size


def check_ensemble(ensemble: Sequence[TargetState], tol: float = 1e-12) -> None:
    if not ensemble:
        raise ValueError("target ensemble is empty")
    total = sum(t.weight for t in ensemble)
    if abs(total - 1.0) > tol:
        raise ValueError(f"target weights sum to {total}, not 1")
    labels = [t.label for t in ensemble]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate target labels {labels}")
    dims = {t.dim for t in ensemble}
    if len(dims) != 1:
        raise ValueError(f"target states have mixed dimensions {sorted(dims)}")


def computational_basis(dim: int) -> list[TargetState]:
    eye = np.eye(dim, dtype=complex)
    return [TargetState(label=i, vector=eye[i]) for i in range(dim)]


def pure_ensemble(vector, label: int = 0, position: float = 0.0) -> list[TargetState]:
    return [TargetState(label=label, vector=vector, weight=1.0, position=position)]


@dataclass(frozen=True)
class CollisionOperator:
    S: np.ndarray
    T: np.ndarray
    particle_dim: int
    target_dim: int
    mode: str = EXACT
    coupling: float = 0.0
    kernel: np.ndarray | None = field(default=None, repr=False)

    @property
    def T4(self) -> np.ndarray:
        """``T`` as a rank-4 tensor indexed ``[a, i, b, j]`` for
        ``<a, i| T |b, j>`` (particle a, b; target i, j)."""
        d, t = self.particle_dim, self.target_dim
        return self.T.reshape(d, t, d, t)

    @property
    def unitary(self) -> np.ndarray:
        """The exact scattering matrix behind this collision (what the oracle
        applies), regardless of the mode used for ``T``."""
        if self.mode == EXACT:
            return self.S
        return expm(-1j * self.coupling * self.kernel)

    def unitarity_defect(self) -> float:
        eye = np.eye(self.S.shape[0])
        return float(np.linalg.norm(dagger(self.S) @ self.S - eye, 2))


def build_collision(
    kernel: np.ndarray,
    coupling: float,
    mode: str = EXACT,
    dims: tuple[int, int] | None = None,
) -> CollisionOperator:
    """Scattering pair ``(S, T)`` generated by the hermitian ``kernel``.

    ``dims = (particle_dim, target_dim)``; if omitted the target is assumed
    two-dimensional.
    """
    K = np.asarray(kernel, dtype=complex)
    if not is_hermitian(K):
        raise ValueError("collision kernel must be hermitian")
    n = K.shape[0]
    if dims is None:
        if n % 2:
            raise ValueError("pass dims=(particle_dim, target_dim) for odd-sized kernels")
        dims = (n // 2, 2)
    dp, dt = dims
    if dp * dt != n:
        raise ValueError(f"dims {dims} do not match kernel size {n}")
    lam = float(coupling)
    eye = np.eye(n, dtype=complex)
    if mode == EXACT:
        S = expm(-1j * lam * K)
        T = 1j * (eye - S)
    elif mode == BORN:
        T = -lam * K + 0.5j * lam**2 * (K @ K)
        S = eye + 1j * T
    else:
        raise ValueError(f"unknown collision mode {mode!r}")
    return CollisionOperator(S=S, T=T, particle_dim=dp, target_dim=dt, mode=mode, coupling=lam, kernel=K)


def collision_from_unitary(S: np.ndarray, dims: tuple[int, int]) -> CollisionOperator:
    """Exact collision from a given unitary (used by the toy fixtures)."""
    S = np.asarray(S, dtype=complex)
    if np.linalg.norm(dagger(S) @ S - np.eye(S.shape[0]), 2) > 1e-10:
        raise ValueError("S is not unitary")
    dp, dt = dims
    if dp * dt != S.shape[0]:
        raise ValueError(f"dims {dims} do not match matrix size {S.shape[0]}")
    T = 1j * (np.eye(S.shape[0]) - S)
    return CollisionOperator(S=S, T=T, particle_dim=dp, target_dim=dt, mode=EXACT, coupling=1.0)


def _vec(state) -> np.ndarray:
    return state.vector if isinstance(state, TargetState) else np.asarray(state, dtype=complex).ravel()


def _check_target(c: CollisionOperator, v: np.ndarray) -> None:
    if v.size != c.target_dim:
        raise ValueError(f"target state has dimension {v.size}, collision expects {c.target_dim}")


def target_block(c: CollisionOperator, l, m) -> np.ndarray:
    """``<l| T |m>`` as a particle-space operator."""
    lv, mv = _vec(l), _vec(m)
    _check_target(c, lv)
    _check_target(c, mv)
    return np.einsum("i,aibj,j->ab", lv.conj(), c.T4, mv)


def extract_d_m(c: CollisionOperator, m) -> np.ndarray:
    """Diagonal target block ``D_M = <m| T |m>`` (particle space)."""
    return target_block(c, m, m)


def _a_e(c: CollisionOperator, l, m, d_m: np.ndarray | None = None) -> np.ndarray:
    lv, mv = _vec(l), _vec(m)
    if d_m is None:
        d_m = extract_d_m(c, mv)
    return target_block(c, lv, mv) - d_m * np.vdot(lv, mv)


def extract_a_e(c: CollisionOperator, l: TargetState, m: TargetState) -> np.ndarray:
    """Footprint amplitude ``A_E = <l|T|m> - <m|T|m><l|m>`` for the target
    changing from ``m`` to ``l``."""
    if l.label == m.label:
        raise ValueError("A_E is defined only for l != m")
    return _a_e(c, l, m)


def check_basis(basis: Sequence, dim: int, tol: float = 1e-10) -> np.ndarray:
    vecs = np.array([_vec(b) for b in basis])
    if vecs.shape != (dim, dim):
        raise ValueError(f"basis has {len(basis)} vectors, target dimension is {dim}")
    if np.linalg.norm(vecs.conj() @ vecs.T - np.eye(dim)) > tol:
        raise ValueError("basis is not orthonormal")
    return vecs


@dataclass(frozen=True)
class SlabOperators:
    """Particle-space blocks of one target's scattering operator.

    ``D_M[m]`` for each ensemble label, ``A_E[(l, m)]`` for each basis index
    ``l`` (zero blocks dropped), ``A_M[(n, m)] = D_M[m] - D_M[n]``.
    """

    D_M: Mapping[int, np.ndarray]
    A_E: Mapping[tuple[int, int], np.ndarray]
    A_M: Mapping[tuple[int, int], np.ndarray]
    weights: Mapping[int, float]


def slab_operators(c: CollisionOperator, ensemble: Sequence[TargetState], basis: Sequence | None = None) -> SlabOperators:
    check_ensemble(ensemble)
    basis = computational_basis(c.target_dim) if basis is None else basis
    vecs = check_basis(basis, c.target_dim)
    D = {m.label: extract_d_m(c, m) for m in ensemble}
    A_E = {}
    for m in ensemble:
        for li, lv in enumerate(vecs):
            a = _a_e(c, lv, m, D[m.label])
            if np.any(a):
                A_E[(li, m.label)] = a
    A_M = {(n.label, m.label): D[m.label] - D[n.label] for n in ensemble for m in ensemble}
    return SlabOperators(D_M=D, A_E=A_E, A_M=A_M, weights={m.label: m.weight for m in ensemble})


def check_unitarity_relation(ops: SlabOperators, c: CollisionOperator, m: TargetState, basis: Sequence) -> float:
    """Norm of ``sum_l A_E^dag A_E + i D_M - i D_M^dag + D_M^dag D_M``.

    Zero for an exactly unitary collision; the sum runs over the complete
    orthonormal ``basis``.
    """
    vecs = check_basis(basis, c.target_dim)
    D = ops.D_M[m.label] if m.label in ops.D_M else extract_d_m(c, m)
    acc = 1j * D - 1j * dagger(D) + dagger(D) @ D
    for lv in vecs:
        a = _a_e(c, lv, m, D)
        acc = acc + dagger(a) @ a
    return float(np.linalg.norm(acc, 2))
