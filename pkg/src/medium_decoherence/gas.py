"""Particle crossing a homogeneous gas, in momentum space.

Units: hbar = 1. Fourier convention ``V~(q) = (2 pi)^-d  int V(x) exp(-i q.x) d^dx``
so that ``<k'|V|k> = V~(k' - k)`` for plane waves normalised to
``delta(k - k')``. The on-shell T-matrix ``T_E`` reduces to ``V~`` at first
Born order and the forward amplitude is ``f = -(2 pi)^(d-1) m_r T_E``.

The mean-field hamiltonian is diagonal in the particle momentum; the
decoherence kernels are regularised on a finite grid: momentum deltas
become Kronecker deltas and energy deltas Lorentzians of width ``eta``.
Kernels are implemented for the 1-D geometry (motion along the slab
normal); the hamiltonian and refraction index work in 1 and 3 dimensions.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .generator import LindbladGenerator

TWO_PI = 2.0 * np.pi
HEAVY_TARGET = "heavy-target"
HEAVY_PARTICLE = "heavy-particle"


# --- grids and inputs -----------------------------------------------------

@dataclass(frozen=True)
class MomentumGrid:
    """Uniform wave-number lattice symmetric about 0 (odd point count)."""

    points: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.points, dtype=float)
        if k.ndim != 1 or k.size < 3 or k.size % 2 == 0:
            raise ValueError("momentum grid needs an odd number (>= 3) of points")
        dk = np.diff(k)
        if np.any(dk <= 0) or np.ptp(dk) > 1e-9 * dk[0]:
            raise ValueError("momentum grid must be uniform and increasing")
        if abs(k[0] + k[-1]) > 1e-9 * dk[0]:
            raise ValueError("momentum grid must be symmetric about 0")
        object.__setattr__(self, "points", k)

    @classmethod
    def uniform(cls, k_max: float, n_points: int) -> "MomentumGrid":
        return cls(np.linspace(-k_max, k_max, n_points))

    @property
    def spacing(self) -> float:
        return float(self.points[1] - self.points[0])

    @property
    def extent(self) -> float:
        return float(self.points[-1])

    def __len__(self) -> int:
        return self.points.size

    def index_of(self, k: float) -> int:
        i = int(round((k - self.points[0]) / self.spacing))
        if not 0 <= i < self.points.size or abs(self.points[i] - k) > 1e-9 * self.spacing:
            raise ValueError(f"k = {k} is not a grid point")
        return i


@dataclass(frozen=True)
class Potential:
    """Fourier transform ``V~(q)`` of the particle-target potential."""

    name: str
    transform: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    dimension: int = 1
    params: dict = field(default_factory=dict)

    def __call__(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return np.asarray(self.transform(q), dtype=complex)


def _qnorm(q: np.ndarray, dim: int) -> np.ndarray:
    return np.abs(q) if dim == 1 or q.ndim == 0 or q.shape[-1] != dim else np.linalg.norm(q, axis=-1)


def contact_potential(strength: float, dimension: int = 1) -> Potential:
    """``V(x) = g delta(x)``."""
    val = strength / TWO_PI**dimension
    return Potential("contact", lambda q: np.full(np.shape(_qnorm(q, dimension)), val), dimension, {"strength": strength})


def gaussian_potential(depth: float, range_: float, dimension: int = 1) -> Potential:
    """``V(x) = V0 exp(-|x|^2 / 2a^2)``."""
    pref = depth * range_**dimension / TWO_PI ** (dimension / 2)
    return Potential(
        "gaussian",
        lambda q: pref * np.exp(-0.5 * (_qnorm(q, dimension) * range_) ** 2),
        dimension,
        {"depth": depth, "range": range_},
    )


def yukawa_potential(strength: float, screening: float, dimension: int = 3) -> Potential:
    """``g exp(-mu r)/r`` in 3-D, ``g exp(-mu |x|)`` in 1-D."""
    if dimension == 3:
        pref = 4 * np.pi * strength / TWO_PI**3
        f = lambda q: pref / (_qnorm(q, 3) ** 2 + screening**2)
    elif dimension == 1:
        f = lambda q: strength * screening / (np.pi * (q**2 + screening**2))
    else:
        raise ValueError("yukawa potential is defined for dimension 1 or 3")
    return Potential("yukawa", f, dimension, {"strength": strength, "screening": screening})


def load_potential_csv(path, dimension: int = 1) -> Potential:
    """Tabulated ``V~(q)`` from a CSV with columns ``q, re, im`` (a header row
    is allowed). Linear interpolation, zero outside the table."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(x) for x in row[:3]])
            except ValueError:
                if rows:
                    raise
    tab = np.array(rows)
    order = np.argsort(tab[:, 0])
    q, re, im = tab[order].T

    def f(x):
        x = _qnorm(x, dimension) if dimension > 1 else x
        return np.interp(x, q, re, left=0, right=0) + 1j * np.interp(x, q, im, left=0, right=0)

    return Potential("tabulated", f, dimension, {"path": str(path)})


NAMED_POTENTIALS = {
    "contact": contact_potential,
    "gaussian": gaussian_potential,
    "yukawa": yukawa_potential,
}


TMatrix = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


def born_t_matrix(potential: Potential) -> TMatrix:
    """First Born ``T_E(k', k; m) = V~(k' - k)`` (mass independent)."""

    def t(k_out, k_in, mass):
        return potential(np.asarray(k_out, dtype=float) - np.asarray(k_in, dtype=float))

    return t


def contact_t_matrix_1d(strength: float) -> TMatrix:
    """Exact on-shell T-matrix of ``g delta(x)`` in one dimension,
    ``(g / 2 pi) / (1 + i m g / |k|)``; depends on energy and mass only."""

    def t(k_out, k_in, mass):
        k = np.abs(np.asarray(k_in, dtype=float))
        return (strength / TWO_PI) / (1.0 + 1j * mass * strength / k)

    return t


@dataclass(frozen=True)
class TargetMomenta:
    """Target states ``A_m(k2)`` on a uniform target-momentum grid with
    weights ``q_m``. ``sum_k2 |A_m|^2 dk2 = 1`` for each member."""

    grid: np.ndarray
    amplitudes: Sequence[np.ndarray]
    weights: Sequence[float]

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        amps = tuple(np.asarray(a, dtype=complex) for a in self.amplitudes)
        w = tuple(float(x) for x in self.weights)
        if len(amps) != len(w) or not amps:
            raise ValueError("need one weight per target amplitude")
        if abs(sum(w) - 1.0) > 1e-12:
            raise ValueError(f"target weights sum to {sum(w)}")
        if any(a.shape != g.shape for a in amps):
            raise ValueError("target amplitudes must live on the target grid")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "weights", w)

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0]) if self.grid.size > 1 else 1.0

    def distribution(self) -> np.ndarray:
        """``P(k2) = sum_m q_m |A_m(k2)|^2``."""
        return sum(q * np.abs(a) ** 2 for q, a in zip(self.weights, self.amplitudes))

    def norm(self) -> float:
        return float(np.sum(self.distribution()) * self.spacing)

    def mean_momentum(self) -> float:
        return float(np.sum(self.grid * self.distribution()) * self.spacing)

    @classmethod
    def gaussian(cls, width: float, k_extent: float, n_points: int, centers: Sequence[float] = (0.0,),
                 weights: Sequence[float] | None = None) -> "TargetMomenta":
        g = np.linspace(-k_extent, k_extent, n_points)
        dk = g[1] - g[0]
        amps = []
        for c in centers:
            a = np.exp(-((g - c) ** 2) / (4 * width**2)).astype(complex)
            amps.append(a / np.sqrt(np.sum(np.abs(a) ** 2) * dk))
        weights = [1.0 / len(centers)] * len(centers) if weights is None else weights
        return cls(g, amps, weights)

    @classmethod
    def at_rest(cls) -> "TargetMomenta":
        """Every target exactly at rest: a single-point grid at ``k2 = 0``."""
        return cls(np.zeros(1), [np.ones(1, dtype=complex)], [1.0])


@dataclass(frozen=True)
class GasConfig:
    m1: float
    m2: float
    density: float
    grid: MomentumGrid
    potential: Potential
    dimension: int = 1
    v1: float | None = None
    targets: TargetMomenta | None = None
    t_matrix: TMatrix | None = field(default=None, repr=False)
    eta: float | None = None
    gas_at_rest: bool = True

    def __post_init__(self):
        if self.m1 <= 0 or self.m2 <= 0 or self.density < 0:
            raise ValueError("masses must be positive and the density non-negative")
        if self.dimension not in (1, 3):
            raise ValueError("dimension must be 1 or 3")
        if self.t_matrix is None:
            object.__setattr__(self, "t_matrix", born_t_matrix(self.potential))
        if self.eta is not None and self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.gas_at_rest and self.targets is not None:
            mean = self.targets.mean_momentum()
            if abs(mean) > 1e-9 * max(1.0, float(np.max(np.abs(self.targets.grid)))):
                raise ValueError(f"gas at rest needs zero mean target momentum, got {mean}")

    @property
    def m_t(self) -> float:
        return self.m1 + self.m2

    @property
    def m_r(self) -> float:
        return self.m1 * self.m2 / self.m_t

    @property
    def prefactor(self) -> float:
        """``(2 pi)^d n``."""
        return TWO_PI**self.dimension * self.density

    def forward_t(self, k, mass: float) -> np.ndarray:
        return self.t_matrix(k, k, mass)

    def forward_amplitude(self, k, mass: float | None = None) -> np.ndarray:
        """``f(k, k; m) = -(2 pi)^(d-1) m T_E(k, k; m)``; ``m`` defaults to ``m_r``."""
        m = self.m_r if mass is None else mass
        return -(TWO_PI ** (self.dimension - 1)) * m * self.forward_t(k, m)


def _central_difference(f: Callable[[float], complex], x: float, h: float) -> complex:
    return (f(x + h) - f(x - h)) / (2.0 * h)


# --- mean-field hamiltonian -------------------------------------------------

def hamiltonian_diag_heavy_target(cfg: GasConfig, k: float, order: int = 0) -> complex:
    """``<k|H|k>`` in powers of ``m1/m2`` (order 0 or 1)."""
    if cfg.m1 >= cfg.m2:
        raise ValueError("heavy-target expansion needs m1/m2 < 1")
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    cfg.grid.index_of(k)
    if order == 0:
        return complex(cfg.prefactor * cfg.forward_t(k, cfg.m1))
    mr = cfg.m_r
    deriv = _central_difference(lambda x: complex(cfg.forward_t(x, mr)), k, cfg.grid.spacing)
    return complex(cfg.prefactor * (cfg.forward_t(k, mr) - (cfg.m1 / cfg.m2) * k * deriv))


def _target_distribution(cfg: GasConfig, tol: float = 1e-6) -> tuple[np.ndarray, np.ndarray, float]:
    if cfg.targets is None:
        raise ValueError("heavy-particle quantities need target momentum distributions")
    norm = cfg.targets.norm()
    if abs(norm - 1.0) > tol:
        raise ValueError(f"target distribution is not normalised on its grid (norm {norm})")
    return cfg.targets.grid, cfg.targets.distribution(), cfg.targets.spacing


def hamiltonian_diag_heavy_particle(cfg: GasConfig, k: float, order: int = 0) -> complex:
    """``<k|H|k>`` in powers of ``m2/m1``: the forward T-matrix at relative
    momentum ``K = (m2/m1) k - k2`` averaged over the target distribution."""
    if cfg.m2 >= cfg.m1:
        raise ValueError("heavy-particle expansion needs m2/m1 < 1")
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    cfg.grid.index_of(k)
    k2, P, dk2 = _target_distribution(cfg)
    ratio = cfg.m2 / cfg.m1
    K = ratio * k - k2
    if order == 0:
        return complex(cfg.prefactor * np.sum(P * cfg.forward_t(K, cfg.m2)) * dk2)
    mr = cfg.m_r
    h = dk2 if k2.size > 1 else cfg.grid.spacing
    t = cfg.forward_t(K, mr)
    dt = (cfg.forward_t(K + h, mr) - cfg.forward_t(K - h, mr)) / (2.0 * h)
    integrand = (1.0 + ratio * k2 / k) * t + ratio * k2 * dt
    return complex(cfg.prefactor * np.sum(P * integrand) * dk2)


def hamiltonian_diagonal(cfg: GasConfig, limit: str = HEAVY_TARGET, order: int = 0) -> np.ndarray:
    """Medium hamiltonian on the whole grid. It is diagonal in momentum, so
    only the diagonal is stored."""
    fn = _hamiltonian_fn(limit)
    return np.array([fn(cfg, float(k), order) for k in cfg.grid.points])


def _hamiltonian_fn(limit: str):
    if limit == HEAVY_TARGET:
        return hamiltonian_diag_heavy_target
    if limit == HEAVY_PARTICLE:
        return hamiltonian_diag_heavy_particle
    raise ValueError(f"unknown limit {limit!r}")


# --- refraction index -------------------------------------------------------

@dataclass(frozen=True)
class RefractionIndex:
    ratio: complex          # k'/k from the square-root formula
    linearized: complex     # first order in the medium energy (Fermi-type form)
    difference: complex     # ratio - linearized
    energy: complex         # <k|H|k>


def index_from_energy(energy: complex, k: float, m1: float, warn_above: float = 0.1) -> RefractionIndex:
    """``k'/k = sqrt(1 - <k|H|k> / (k^2/2m1))`` and its linearisation."""
    kinetic = k**2 / (2.0 * m1)
    x = energy / kinetic
    arg = 1.0 - x
    if arg.real < 0:
        raise ValueError("medium energy exceeds the kinetic energy: outside the weak-potential regime")
    if abs(x) > warn_above:
        warnings.warn(f"|<k|H|k>| / E_k = {abs(x):.3g}; linearised index is unreliable", stacklevel=2)
    ratio = complex(np.sqrt(complex(arg)))
    lin = complex(1.0 - x / 2.0)
    return RefractionIndex(ratio, lin, ratio - lin, complex(energy))


def refraction_index(cfg: GasConfig, k: float, limit: str = HEAVY_TARGET, order: int = 0) -> RefractionIndex:
    """Complex ``k'/k`` of the gas. The linearised form equals
    ``1 + 2 pi n (m1/m_r) F / k^2`` with ``F`` the (mass-corrected) forward
    amplitude entering the chosen expansion."""
    energy = _hamiltonian_fn(limit)(cfg, k, order)
    return index_from_energy(energy, k, cfg.m1)


def fermi_index(cfg: GasConfig, k: float, amplitude_mass: float | None = None) -> complex:
    """Fermi's ``1 + 2 pi n f(k,k) / k^2`` with the two-body forward amplitude
    (reduced mass by default)."""
    f = cfg.forward_amplitude(k, amplitude_mass)
    return complex(1.0 + TWO_PI * cfg.density * f / k**2)


def index_from_generator(gen: LindbladGenerator, basis_index: int, k: float, m1: float) -> RefractionIndex:
    """Refraction index from the coherent (non-hermitian) hamiltonian of a
    slab generator whose particle basis state ``basis_index`` is the plane
    wave ``k``."""
    energy = gen.h_nonhermitian[basis_index, basis_index]
    return index_from_energy(complex(energy), k, m1, warn_above=np.inf)


# --- decoherence kernels ----------------------------------------------------

def broadened_delta(x, eta: float):
    """Lorentzian ``(1/pi) eta / (x^2 + eta^2)`` standing in for ``delta(x)``."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    x = np.asarray(x, dtype=float)
    return eta / (np.pi * (x**2 + eta**2))


@dataclass(frozen=True)
class MomentumKernel:
    """Jump family ``A_s = sum_q c_s(q) |q + s dk><q|`` on a momentum grid.

    ``shifts[i]`` is the integer momentum transfer in grid units and
    ``coefficients[i, q]`` the amplitude ``c_s(q)``; transfers leaving the
    grid have zero amplitude. Each ``A_s`` enters the master equation as
    ``A rho A^dag - {A^dag A, rho}/2``.
    """

    grid: MomentumGrid
    shifts: np.ndarray
    coefficients: np.ndarray
    eta: float
    energy_spacing: float

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2

    def loss(self) -> np.ndarray:
        """Diagonal of ``sum_s A_s^dag A_s``: total scattering rate out of each ``q``."""
        return self.weights.sum(axis=0)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """``sum_s A_s rho A_s^dag``."""
        M = len(self.grid)
        out = np.zeros((M, M), dtype=complex)
        for s, c in zip(self.shifts, self.coefficients):
            x = c[:, None] * rho * c.conj()[None, :]
            if s >= 0:
                out[s:, s:] += x[: M - s, : M - s]
            else:
                out[:s, :s] += x[-s:, -s:]
        return out

    def lindblad_rhs(self, rho: np.ndarray) -> np.ndarray:
        g = self.loss()
        return self.apply(rho) - 0.5 * (g[:, None] * rho + rho * g[None, :])

    def jump_operators(self) -> list[np.ndarray]:
        M = len(self.grid)
        ops = []
        for s, c in zip(self.shifts, self.coefficients):
            A = np.zeros((M, M), dtype=complex)
            q = np.arange(M)
            ok = (q + s >= 0) & (q + s < M)
            A[q[ok] + s, q[ok]] = c[ok]
            ops.append(A)
        return ops

    def superoperator(self) -> np.ndarray:
        """Dense matrix of :meth:`apply` on row-major ``vec(rho)``."""
        M = len(self.grid)
        S = np.zeros((M * M, M * M), dtype=complex)
        for A in self.jump_operators():
            S += np.kron(A, A.conj())
        return S

    def energy_drift(self, rho: np.ndarray, mass: float) -> float:
        """``d<p^2/2m>/dt`` produced by the kernel (hamiltonian diagonal in
        momentum does not contribute)."""
        k = self.grid.points
        E = k**2 / (2 * mass)
        M = k.size
        pop = np.real(np.diag(rho))
        total = 0.0
        idx = np.arange(M)
        for s, w in zip(self.shifts, self.weights):
            ok = (idx + s >= 0) & (idx + s < M)
            total += np.sum(w[ok] * (E[idx[ok] + s] - E[idx[ok]]) * pop[ok])
        return float(total)


def _transfer_shifts(cfg: GasConfig, max_transfer: float | None) -> np.ndarray:
    M = len(cfg.grid)
    smax = M - 1
    if max_transfer is not None:
        smax = min(smax, int(np.floor(max_transfer / cfg.grid.spacing + 1e-9)))
    return np.arange(-smax, smax + 1)


def _require_1d(cfg: GasConfig) -> None:
    if cfg.dimension != 1:
        raise NotImplementedError("decoherence kernels are implemented for the 1-D geometry")
    if cfg.eta is None:
        raise ValueError("kernel needs the broadening width eta")


def _check_resolution(eta: float, spacing: float) -> None:
    if eta < 2.0 * spacing:
        raise ValueError(f"eta = {eta} does not resolve the grid energy spacing {spacing} (need eta >= 2x)")


def _kernel(cfg: GasConfig, shifts: np.ndarray, weight_fn, spacing: float) -> MomentumKernel:
    k = cfg.grid.points
    dk = cfg.grid.spacing
    M = k.size
    pref = cfg.density * TWO_PI ** (cfg.dimension + 1) * dk
    coeffs = np.zeros((shifts.size, M), dtype=complex)
    idx = np.arange(M)
    for i, s in enumerate(shifts):
        p = s * dk
        ok = (idx + s >= 0) & (idx + s < M)
        w = weight_fn(k[ok], p)
        coeffs[i, ok] = cfg.potential(p) * np.sqrt(pref * w)
    keep = np.any(coeffs != 0, axis=1)
    return MomentumKernel(cfg.grid, shifts[keep], coeffs[keep], cfg.eta, spacing)


def decoherence_kernel_heavy_target(cfg: GasConfig, max_transfer: float | None = None) -> MomentumKernel:
    """Zeroth order in ``m1/m2``: elastic scattering off static centres,

        rho(k',k) <- n (2pi)^2 sum_p V~(p) V~*(p) delta_eta(E_k - E_{k-p}) rho(k'-p, k-p).

    The energy delta is taken as the geometric mean of the row and column
    Lorentzians, which makes the family completely positive on the grid and
    reproduces the single-delta form on the diagonal. Independent of the
    target wave functions.
    """
    _require_1d(cfg)
    spacing = cfg.grid.extent * cfg.grid.spacing / cfg.m1
    _check_resolution(cfg.eta, spacing)

    def weight(q, p):
        return broadened_delta(((q + p) ** 2 - q**2) / (2 * cfg.m1), cfg.eta)

    return _kernel(cfg, _transfer_shifts(cfg, max_transfer), weight, spacing)


def decoherence_kernel_heavy_particle(cfg: GasConfig, max_transfer: float | None = None) -> MomentumKernel:
    """Zeroth order in ``m2/m1``: momentum kicks weighted by the target
    recoil distribution,

        |c_p|^2 = n (2pi)^2 dk |V~(p)|^2 sum_q2 P(q2) dq2 delta_eta(E(m2 v1 - q2 + p) - E(m2 v1 - q2))

    with ``E(x) = x^2 / 2 m2``; independent of the particle momentum.
    """
    _require_1d(cfg)
    if cfg.v1 is None:
        raise ValueError("heavy-particle kernel needs the particle speed v1")
    q2, P, dq2 = _target_distribution(cfg)
    u = cfg.m2 * cfg.v1 - q2
    spacing = (np.max(np.abs(u)) + cfg.grid.extent) * cfg.grid.spacing / cfg.m2
    _check_resolution(cfg.eta, spacing)

    def weight(q, p):
        de = ((u + p) ** 2 - u**2) / (2 * cfg.m2)
        return np.full(q.shape, np.sum(P * broadened_delta(de, cfg.eta)) * dq2)

    return _kernel(cfg, _transfer_shifts(cfg, max_transfer), weight, spacing)


def decoherence_kernel_recoil(cfg: GasConfig, max_transfer: float | None = None) -> MomentumKernel:
    """Finite-mass kernel with exact two-body energy conservation in the
    relative coordinate, averaged over the target distribution. Tends to
    the heavy-target kernel for ``m1/m2 -> 0`` and to the heavy-particle one
    for ``m2/m1 -> 0``; used to check both limits."""
    _require_1d(cfg)
    q2, P, dq2 = _target_distribution(cfg)
    m1, m2, mt, mr = cfg.m1, cfg.m2, cfg.m_t, cfg.m_r
    spacing = (m2 * cfg.grid.extent + m1 * np.max(np.abs(q2))) / mt * cfg.grid.spacing / mr
    _check_resolution(cfg.eta, spacing)

    def e_rel(k1, k2):
        return (m2 * k1 - m1 * k2) ** 2 / (2.0 * mr * mt**2)

    def weight(q, p):
        de = e_rel(q[:, None] + p, q2[None, :] - p) - e_rel(q[:, None], q2[None, :])
        return broadened_delta(de, cfg.eta) @ P * dq2

    return _kernel(cfg, _transfer_shifts(cfg, max_transfer), weight, spacing)


@dataclass(frozen=True)
class GasLindblad:
    """Master equation of the particle in the gas: kinetic energy plus the
    real part of the medium energy as hamiltonian (both diagonal), and the
    momentum kernel as dissipator."""

    energies: np.ndarray
    kernel: MomentumKernel

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        e = self.energies
        return -1j * (e[:, None] - e[None, :]) * rho + self.kernel.lindblad_rhs(rho)

    def as_generator(self) -> LindbladGenerator:
        """Dense :class:`LindbladGenerator` (small grids only)."""
        jumps = tuple((A, 0.5) for A in self.kernel.jump_operators())
        return LindbladGenerator(np.diag(self.energies).astype(complex), (), jumps)


def gas_lindblad(cfg: GasConfig, kernel: MomentumKernel, limit: str = HEAVY_TARGET, order: int = 0) -> GasLindblad:
    k = cfg.grid.points
    medium = np.real(hamiltonian_diagonal(cfg, limit, order))
    return GasLindblad(k**2 / (2 * cfg.m1) + medium, kernel)


def mean_kinetic_energy_drift(cfg: GasConfig, rho: np.ndarray, kernel: MomentumKernel | None = None) -> float:
    """``d<p^2/2m1>/dt`` under the assembled heavy-target gas generator."""
    kernel = decoherence_kernel_heavy_target(cfg) if kernel is None else kernel
    return kernel.energy_drift(rho, cfg.m1)


def momentum_packet(grid: MomentumGrid, center: float, width: float) -> np.ndarray:
    """Normalised Gaussian momentum-space packet as a grid vector."""
    a = np.exp(-((grid.points - center) ** 2) / (4 * width**2)).astype(complex)
    return a / np.linalg.norm(a)
