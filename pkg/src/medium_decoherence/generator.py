"""Continuous-time limit of the slab map: Lindblad generator, RK4 integration
and the coherent / mixed split of the density matrix.

Convention: every jump operator ``A`` carries a ``rate`` multiplying

    L_A[rho] = 2 A rho A^dag - A^dag A rho - rho A^dag A

so a slab with crossing rate ``v/delta`` contributes mixture jumps
``A_M^{n,m}`` at rate ``(v/delta) q_n q_m / 4`` and footprint jumps
``A_E^{(l,m)}`` at rate ``(v/delta) q_m / 2``.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import expm, schur

from .collision import computational_basis, slab_operators
from .linalg import dagger, purity
from .slabstep import SlabSpec

BRANCH_TOL = 1e-8


@dataclass(frozen=True)
class LindbladGenerator:
    h_eff: np.ndarray
    jumps_mixture: tuple = ()
    jumps_footprint: tuple = ()
    v_over_delta: float = 1.0
    h_quadratic: np.ndarray | None = field(default=None, repr=False)
    _stack: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        h = np.asarray(self.h_eff, dtype=complex)
        if np.max(np.abs(h - dagger(h)), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(h), initial=0.0)):
            raise ValueError("effective hamiltonian is not hermitian")
        jm = tuple((np.asarray(a, dtype=complex), float(r)) for a, r in self.jumps_mixture)
        jf = tuple((np.asarray(a, dtype=complex), float(r)) for a, r in self.jumps_footprint)
        if any(r < 0 for _, r in jm + jf):
            raise ValueError("jump rates must be non-negative")
        object.__setattr__(self, "h_eff", h)
        object.__setattr__(self, "jumps_mixture", jm)
        object.__setattr__(self, "jumps_footprint", jf)
        jumps = jm + jf
        d = h.shape[0]
        if jumps:
            ops = np.array([a for a, _ in jumps])
            rates = np.array([r for _, r in jumps])
            damping = np.einsum("k,kji,kjl->il", rates, ops.conj(), ops)
        else:
            ops = np.zeros((0, d, d), dtype=complex)
            rates = np.zeros(0)
            damping = np.zeros((d, d), dtype=complex)
        object.__setattr__(self, "_stack", (ops, rates, damping))

    @property
    def dim(self) -> int:
        return self.h_eff.shape[0]

    @property
    def jumps(self) -> tuple:
        return self.jumps_mixture + self.jumps_footprint

    @property
    def damping(self) -> np.ndarray:
        """``sum rate A^dag A``."""
        return self._stack[2]

    @property
    def h_nonhermitian(self) -> np.ndarray:
        """``H_eff - i sum rate A^dag A``, the generator of the coherent part."""
        return self.h_eff - 1j * self.damping

    def jump_term(self, rho: np.ndarray) -> np.ndarray:
        """``2 sum rate A rho A^dag``."""
        ops, rates, _ = self._stack
        if not rates.size:
            return np.zeros_like(rho)
        sandwiched = np.matmul(np.matmul(ops, rho), ops.conj().transpose(0, 2, 1))
        return 2.0 * np.tensordot(rates, sandwiched, axes=1)

    def coherent_rhs(self, rho: np.ndarray) -> np.ndarray:
        H = self.h_nonhermitian
        return -1j * (H @ rho - rho @ dagger(H))

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        return self.coherent_rhs(rho) + self.jump_term(rho)

    def norm_estimate(self) -> float:
        ops, rates, _ = self._stack
        jn = sum(4.0 * r * np.linalg.norm(a, 2) ** 2 for a, r in zip(ops, rates))
        return 2.0 * float(np.linalg.norm(self.h_eff, 2)) + float(jn)

    def liouvillian(self) -> np.ndarray:
        """Matrix of ``rhs`` acting on row-major ``vec(rho)``."""
        d = self.dim
        eye = np.eye(d)
        H = self.h_nonhermitian
        L = -1j * (np.kron(H, eye) - np.kron(eye, H.conj()))
        ops, rates, _ = self._stack
        for a, r in zip(ops, rates):
            L += 2.0 * r * np.kron(a, a.conj())
        return L

    def without_footprint(self) -> "LindbladGenerator":
        return LindbladGenerator(self.h_eff, self.jumps_mixture, (), self.v_over_delta, self.h_quadratic)

    def without_mixture(self) -> "LindbladGenerator":
        return LindbladGenerator(self.h_eff, (), self.jumps_footprint, self.v_over_delta, self.h_quadratic)


def zero_generator(dim: int) -> LindbladGenerator:
    return LindbladGenerator(np.zeros((dim, dim), dtype=complex))


def amplitude_damping_generator(gamma: float) -> LindbladGenerator:
    """Two-level decay ``|1> -> |0>`` whose excited population falls as
    ``exp(-2 gamma t)``."""
    lower = np.array([[0, 1], [0, 0]], dtype=complex)
    return LindbladGenerator(np.zeros((2, 2), dtype=complex), (), ((lower, gamma),))


def build_generator(slab: SlabSpec, basis: Sequence | None = None, keep_quadratic: bool = False) -> LindbladGenerator:
    """Lindblad generator of a slab crossed at rate ``v/delta``.

    ``H_eff = -(v/delta)/2 (Dbar + Dbar^dag)`` with ``Dbar = sum_j sum_m q_m D_M``.
    The term quadratic in ``Dbar`` (second order in the density) is dropped
    from ``H_eff`` unless ``keep_quadratic``, in which case its hermitian
    part is added.
    """
    rate = slab.rate
    dp = slab.particle_dim
    d_bar = np.zeros((dp, dp), dtype=complex)
    mixture, footprint = [], []
    for ens, c in zip(slab.targets, slab.collisions):
        ops = slab_operators(c, ens, basis if basis is not None else computational_basis(c.target_dim))
        for m, q in ops.weights.items():
            d_bar += q * ops.D_M[m]
        for (n, m), a in ops.A_M.items():
            if n != m and np.any(a):
                mixture.append((a, rate * ops.weights[n] * ops.weights[m] / 4.0))
        for (l, m), a in ops.A_E.items():
            footprint.append((a, rate * ops.weights[m] / 2.0))
    h_eff = -0.5 * rate * (d_bar + dagger(d_bar))
    quad = 0.5j * rate * (d_bar @ d_bar)
    if keep_quadratic:
        h_eff = h_eff + (quad + dagger(quad)) / 2.0
    return LindbladGenerator(h_eff, tuple(mixture), tuple(footprint), rate, quad)


def pre_lindblad_hamiltonian(gen: LindbladGenerator, slab: SlabSpec) -> np.ndarray:
    """Non-hermitian ``-(v/delta)(Dbar - (i/2) Dbar^2)`` of the pre-Lindblad
    form, for comparison with :attr:`LindbladGenerator.h_nonhermitian`."""
    from .slabstep import mean_d

    d_bar = mean_d(slab)
    return -slab.rate * (d_bar - 0.5j * d_bar @ d_bar)


def principal_log_unitary(S: np.ndarray, unitary_tol: float = 1e-10) -> np.ndarray:
    S = np.asarray(S, dtype=complex)
    if np.linalg.norm(dagger(S) @ S - np.eye(S.shape[0]), 2) > unitary_tol:
        raise ValueError("matrix is not unitary")
    # complex Schur form of a normal matrix is diagonal with unitary Z
    D, Z = schur(S, output="complex")
    ev = np.diag(D)
    if np.any(np.abs(ev + 1.0) < BRANCH_TOL):
        raise ValueError("branch-cut failure: S has an eigenvalue at -1")
    return Z @ np.diag(np.log(ev)) @ dagger(Z)


def effective_hamiltonian_from_S(S: np.ndarray, slab_or_rate) -> np.ndarray:
    """``H = i (v/delta) log S`` so that ``S = exp(-i H delta/v)``."""
    rate = slab_or_rate.rate if isinstance(slab_or_rate, SlabSpec) else float(slab_or_rate)
    H = 1j * rate * principal_log_unitary(S)
    return (H + dagger(H)) / 2.0


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def traces(self) -> np.ndarray:
        return np.real(np.einsum("tii->t", self.states))

    def purities(self) -> np.ndarray:
        return np.array([purity(r) for r in self.states])

    def min_eigenvalues(self) -> np.ndarray:
        return np.array([np.linalg.eigvalsh((r + dagger(r)) / 2)[0] for r in self.states])


def _rk4(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _steps(t_final: float, dt: float) -> int:
    if dt <= 0 or t_final < 0:
        raise ValueError("need dt > 0 and t_final >= 0")
    n = int(round(t_final / dt))
    if abs(n * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise ValueError(f"t_final={t_final} is not a multiple of dt={dt}")
    return n


def _check_dt(gen: LindbladGenerator, dt: float) -> None:
    if dt * gen.norm_estimate() > 0.1:
        warnings.warn(f"dt * |generator| = {dt * gen.norm_estimate():.3g} > 0.1; RK4 may be inaccurate", stacklevel=3)


def evolve(
    rho0: np.ndarray,
    gen: LindbladGenerator,
    t_final: float,
    dt: float,
    save_every: int = 1,
    max_trace_step: float = 1e-6,
) -> Trajectory:
    """Fixed-step RK4 integration of the master equation."""
    n = _steps(t_final, dt)
    _check_dt(gen, dt)
    rho = np.array(rho0, dtype=complex)
    times, states = [0.0], [rho.copy()]
    tr = np.trace(rho).real
    for k in range(1, n + 1):
        rho = _rk4(gen.rhs, rho, dt)
        new_tr = np.trace(rho).real
        if not np.isfinite(new_tr) or abs(new_tr - tr) > max_trace_step:
            raise FloatingPointError(f"trace drift {abs(new_tr - tr):.3g} at step {k}; reduce dt")
        tr = new_tr
        if k % save_every == 0 or k == n:
            times.append(k * dt)
            states.append(rho.copy())
    return Trajectory(np.array(times), np.array(states))


def split_evolve(
    rho0: np.ndarray,
    gen: LindbladGenerator,
    t_final: float,
    dt: float,
    save_every: int = 1,
    max_trace_step: float = 1e-6,
) -> tuple[Trajectory, Trajectory]:
    """Evolve ``rho = rho_coh + rho_mix`` with ``rho_coh(0) = rho0``,
    ``rho_mix(0) = 0``.

    ``rho_coh`` follows the non-hermitian hamiltonian flow alone;
    ``rho_mix`` follows the full master equation plus the source
    ``2 sum rate A rho_coh A^dag``.
    """
    n = _steps(t_final, dt)
    _check_dt(gen, dt)
    coh = np.array(rho0, dtype=complex)
    mix = np.zeros_like(coh)

    def f(pair):
        c, m = pair
        return np.array([gen.coherent_rhs(c), gen.rhs(m) + gen.jump_term(c)])

    y = np.array([coh, mix])
    times, cs, ms = [0.0], [coh.copy()], [mix.copy()]
    tr = np.trace(coh).real
    for k in range(1, n + 1):
        y = _rk4(f, y, dt)
        new_tr = np.trace(y[0] + y[1]).real
        if not np.isfinite(new_tr) or abs(new_tr - tr) > max_trace_step:
            raise FloatingPointError(f"trace drift {abs(new_tr - tr):.3g} at step {k}; reduce dt")
        tr = new_tr
        if k % save_every == 0 or k == n:
            times.append(k * dt)
            cs.append(y[0].copy())
            ms.append(y[1].copy())
    t = np.array(times)
    return Trajectory(t, np.array(cs)), Trajectory(t, np.array(ms))


def propagate_exact(rho0: np.ndarray, gen: LindbladGenerator, t: float) -> np.ndarray:
    """``exp(t L) rho0`` through the dense Liouvillian (small dimensions)."""
    d = gen.dim
    vec = expm(t * gen.liouvillian()) @ np.asarray(rho0, dtype=complex).reshape(-1)
    return vec.reshape(d, d)


def write_trajectory_csv(
    path,
    traj: Trajectory,
    elements: Iterable[tuple[int, int]] = ((0, 0),),
    time_unit: str = "1/energy (hbar=1)",
) -> None:
    """One row per saved step: t, trace, purity, smallest eigenvalue and the
    real/imaginary parts of the requested matrix elements."""
    elements = list(elements)
    header = [f"t [{time_unit}]", "trace", "purity", "min_eigenvalue"]
    for i, j in elements:
        header += [f"re_rho_{i}_{j}", f"im_rho_{i}_{j}"]
    mins = traj.min_eigenvalues()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for t, rho, lo in zip(traj.times, traj.states, mins):
            row = [repr(float(t)), repr(float(np.trace(rho).real)), repr(purity(rho)), repr(float(lo))]
            for i, j in elements:
                row += [repr(float(rho[i, j].real)), repr(float(rho[i, j].imag))]
            w.writerow(row)
