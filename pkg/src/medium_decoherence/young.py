"""Two-slit interference behind a slab of medium, and the locality argument
that keeps the two paths' crossed terms out of the mixed part.

On the screen the coherent part gives the vacuum fringes at wavenumber
``Re k'`` damped by ``exp(-2 Im k' L)``; what the damping removes reappears
as an approximately flat background from the mixed part. The background
is modelled as uniform over a central window (10 fringe periods by
default), the only approximation in this module.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.signal import argrelextrema

from .collision import BORN, TargetState, build_collision
from .generator import LindbladGenerator, build_generator, split_evolve
from .linalg import StateVector
from .slabstep import SlabSpec


@dataclass(frozen=True)
class YoungConfig:
    slit_separation: float
    screen_distance: float
    wavenumber: float
    medium_wavenumber: complex
    screen_points: np.ndarray | None = None
    window_periods: float = 10.0
    packet_width: float = 1.0
    target_range: float = 1.0

    def __post_init__(self):
        if self.slit_separation <= 0 or self.screen_distance <= 0:
            raise ValueError("slit separation and screen distance must be positive")
        if self.screen_distance < 10 * self.slit_separation:
            raise ValueError("far-field pattern needs L >> D (L >= 10 D)")
        kp = complex(self.medium_wavenumber)
        if kp.real <= 0:
            raise ValueError("Re k' must be positive")
        object.__setattr__(self, "medium_wavenumber", kp)
        if self.screen_points is None:
            half = 0.5 * self.window_periods * self.fringe_period
            object.__setattr__(self, "screen_points", np.linspace(-half, half, 2001))
        x = np.asarray(self.screen_points, dtype=float)
        if x.ndim != 1 or x.size < 3 or np.any(np.diff(x) <= 0):
            raise ValueError("screen points must be increasing")
        dx = np.diff(x)
        if np.ptp(dx) > 1e-9 * dx[0] or abs(x[0] + x[-1]) > 1e-9 * dx[0]:
            raise ValueError("screen grid must be uniform and symmetric about the centre")
        object.__setattr__(self, "screen_points", x)

    @property
    def fringe_period(self) -> float:
        """``2 pi / Re k' * L / D``."""
        return 2 * np.pi / self.medium_wavenumber.real * self.screen_distance / self.slit_separation

    @property
    def damping(self) -> float:
        """``exp(-2 Im k' L)``, the weight left in the coherent fringes."""
        return float(np.exp(-2 * self.medium_wavenumber.imag * self.screen_distance))

    @property
    def spacing(self) -> float:
        return float(self.screen_points[1] - self.screen_points[0])

    @classmethod
    def from_index(cls, index: complex, wavenumber: float, **kw) -> "YoungConfig":
        """Build from a refraction index ``k'/k``."""
        return cls(wavenumber=wavenumber, medium_wavenumber=complex(index) * wavenumber, **kw)


def vacuum_fringes(cfg: YoungConfig) -> np.ndarray:
    """Far-field two-slit intensity at wavenumber ``Re k'``, unit integral."""
    x = cfg.screen_points
    k = cfg.medium_wavenumber.real
    I = np.cos(k * cfg.slit_separation * x / (2 * cfg.screen_distance)) ** 2
    return I / (I.sum() * cfg.spacing)


def background(cfg: YoungConfig) -> np.ndarray:
    """Uniform unit-integral background over the central window."""
    half = 0.5 * cfg.window_periods * cfg.fringe_period
    inside = np.abs(cfg.screen_points) <= half * (1 + 1e-12)
    if not inside.any():
        raise ValueError("screen grid does not sample the background window")
    return inside / (inside.sum() * cfg.spacing)


def pattern(cfg: YoungConfig) -> np.ndarray:
    """``I(x) = B(x) + exp(-2 Im k' L) I_vac(x)``; integrates to 1."""
    if cfg.medium_wavenumber.imag < 0:
        raise ValueError("Im k' < 0 would mean gain in the medium")
    d = cfg.damping
    return d * vacuum_fringes(cfg) + (1.0 - d) * background(cfg)


def visibility_formula(x: float) -> float:
    """``2 e^{-2x} / (1 - e^{-2x})`` with ``x = Im k' L``."""
    if x <= 0:
        return float("inf")
    e = np.exp(-2 * x)
    return float(2 * e / -np.expm1(-2 * x))


@dataclass(frozen=True)
class Visibility:
    ratio: float            # oscillation amplitude over background
    contrast: float         # (I_max - I_min) / (I_max + I_min)
    i_max: float
    i_min: float
    background_zero: bool

    def to_json(self) -> dict:
        d = asdict(self)
        if not np.isfinite(self.ratio):
            d["ratio"] = None
        return d


def _extrema(intensity: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if np.ptp(intensity) == 0:
        return np.array([], int), np.array([], int)
    maxima = argrelextrema(intensity, np.greater_equal, order=1)[0]
    minima = argrelextrema(intensity, np.less_equal, order=1)[0]
    return maxima, minima


def visibility(intensity: Sequence[float], rel_floor: float = 1e-12) -> Visibility:
    """Central-peak visibility: ``(I_max - I_min) / I_min`` with ``I_max`` the
    maximum nearest the centre and ``I_min`` the adjacent minima. A zero
    background gives an infinite ratio and ``background_zero=True``."""
    I = np.asarray(intensity, dtype=float)
    maxima, minima = _extrema(I)
    if maxima.size + minima.size < 3 or not maxima.size or not minima.size:
        raise ValueError("pattern has fewer than 3 extrema near the centre")
    c = I.size // 2
    imax_i = maxima[np.argmin(np.abs(maxima - c))]
    near = minima[np.argsort(np.abs(minima - imax_i))[:2]]
    i_max = float(I[imax_i])
    i_min = float(np.mean(I[near]))
    zero = i_min <= rel_floor * i_max
    ratio = float("inf") if zero else (i_max - i_min) / i_min
    return Visibility(ratio, (i_max - i_min) / (i_max + i_min), i_max, i_min, bool(zero))


def fringe_spacing(intensity: Sequence[float], x: Sequence[float], n_fringes: int = 3) -> float:
    """Mean distance between the ``n_fringes`` maxima on either side of the
    centre."""
    I = np.asarray(intensity, dtype=float)
    x = np.asarray(x, dtype=float)
    maxima, _ = _extrema(I)
    if maxima.size < 2:
        raise ValueError("need at least two maxima to measure the fringe spacing")
    c = I.size // 2
    order = maxima[np.argsort(np.abs(maxima - c))[: 2 * n_fringes + 1]]
    return float(np.mean(np.diff(np.sort(x[order]))))


def visibility_sweep(base: YoungConfig, damping_exponents: Sequence[float]) -> list[dict]:
    """Measured vs predicted visibility for ``x = Im k' L`` over the sweep."""
    rows = []
    for xi in damping_exponents:
        kp = complex(base.medium_wavenumber.real, xi / base.screen_distance)
        cfg = YoungConfig(base.slit_separation, base.screen_distance, base.wavenumber, kp,
                          base.screen_points, base.window_periods)
        v = visibility(pattern(cfg))
        f = visibility_formula(xi)
        rows.append({"x": float(xi), "measured": v.ratio, "formula": f,
                     "relative_deviation": abs(v.ratio - f) / f})
    return rows


def write_pattern_csv(path, cfg: YoungConfig, intensity: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write("x [length],intensity [1/length]\n")
        for xi, ii in zip(cfg.screen_points, intensity):
            fh.write(f"{xi:.12e},{ii:.12e}\n")


def write_visibility_json(path, cfg: YoungConfig, vis: Visibility) -> None:
    x = cfg.medium_wavenumber.imag * cfg.screen_distance
    f = visibility_formula(x)
    record = {
        "im_k_prime_L": x,
        "measured": vis.to_json(),
        "formula": None if not np.isfinite(f) else f,
        "fringe_period": cfg.fringe_period,
        "units": "hbar = 1; lengths in config units",
    }
    with open(path, "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)


# --- crossed terms ------------------------------------------------------

def position_grid(half_width: float, n_points: int) -> np.ndarray:
    return np.linspace(-half_width, half_width, n_points)


def gaussian_packet(x: np.ndarray, center: float, width: float, wavenumber: float = 0.0) -> np.ndarray:
    """Normalised Gaussian packet sampled on the grid (unit vector norm)."""
    a = np.exp(-((x - center) ** 2) / (4 * width**2) + 1j * wavenumber * x)
    return a / np.linalg.norm(a)


def target_profile(x: np.ndarray, center: float, range_: float, cutoff: float = 4.0) -> np.ndarray:
    """Gaussian interaction profile truncated to exactly zero beyond
    ``cutoff`` ranges, so each target has compact support."""
    g = np.exp(-0.5 * ((x - center) / range_) ** 2)
    return np.where(np.abs(x - center) <= cutoff * range_, g, 0.0)


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def local_target_slab(
    x: np.ndarray,
    centers: Sequence[float],
    range_: float,
    coupling: float,
    weights: tuple[float, float] = (0.7, 0.3),
    flip: float = 1.0,
    shift: float = 1.0,
    mode: str = BORN,
    width: float = 1.0,
    speed: float = 1.0,
) -> SlabSpec:
    """Two-level targets sitting at ``centers``. Each couples through
    ``g(x - x_j) (flip sigma_x + shift sigma_z)``: ``sigma_x`` changes the
    target state (footprint), ``sigma_z`` makes ``D_M`` depend on it (mixture).
    Target ensemble ``{|0>: q0, |1>: q1}``."""
    h = flip * SIGMA_X + shift * SIGMA_Z
    eye = np.eye(2, dtype=complex)
    ens = [TargetState(0, eye[0], weights[0]), TargetState(1, eye[1], weights[1])]
    cols, targets = [], []
    for c in centers:
        K = np.kron(np.diag(target_profile(x, c, range_)), h)
        cols.append(build_collision(K, coupling, mode, (x.size, 2)))
        targets.append([TargetState(t.label, t.vector, t.weight, c) for t in ens])
    return SlabSpec(targets, cols, width=width, speed=speed)


@dataclass(frozen=True)
class CrossedFeedback:
    mixture: float
    footprint: float
    total: float


def _as_vector(v) -> np.ndarray:
    if isinstance(v, StateVector):
        v = v.amplitudes
    v = np.asarray(v, dtype=complex).ravel()
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ValueError("packets must be normalised")
    return v


def _feedback(jumps, phi, psi) -> np.ndarray:
    if not jumps:
        return np.zeros((phi.size, phi.size), dtype=complex)
    ops = np.array([a for a, _ in jumps])
    rates = np.array([r for _, r in jumps])
    aphi = ops @ phi
    apsi = ops @ psi
    return 2.0 * np.einsum("k,ki,kj->ij", rates, aphi, apsi.conj())


def crossed_term_feedback(phi, psi, slab_or_generator) -> CrossedFeedback:
    """Spectral norm of ``2 sum rate A |phi><psi| A^dag``, the source the
    crossed block of the coherent part feeds into the mixed part, for the
    mixture and footprint families separately and together."""
    phi, psi = _as_vector(phi), _as_vector(psi)
    gen = slab_or_generator if isinstance(slab_or_generator, LindbladGenerator) else build_generator(slab_or_generator)
    fm = _feedback(gen.jumps_mixture, phi, psi)
    ff = _feedback(gen.jumps_footprint, phi, psi)
    n = lambda m: float(np.linalg.norm(m, 2))
    return CrossedFeedback(n(fm), n(ff), n(fm + ff))


def feedback_sweep(
    x: np.ndarray,
    separations: Sequence[float],
    packet_width: float,
    target_range: float,
    coupling: float = 0.1,
    target_spacing: float | None = None,
) -> list[tuple[float, CrossedFeedback]]:
    """Crossed-term feedback for packets at ``-s/2`` and ``+s/2`` in a row of
    targets filling the grid (spacing ``target_range`` by default)."""
    spacing = target_range if target_spacing is None else target_spacing
    edge = x[-1] - 4 * target_range
    centers = np.arange(-edge, edge + 1e-9, spacing)
    gen = build_generator(local_target_slab(x, centers, target_range, coupling))
    out = []
    for s in separations:
        phi = gaussian_packet(x, -s / 2, packet_width)
        psi = gaussian_packet(x, s / 2, packet_width)
        out.append((float(s), crossed_term_feedback(phi, psi, gen)))
    return out


def mixed_part_comparison(
    phi: np.ndarray,
    psi: np.ndarray,
    gen: LindbladGenerator,
    t_final: float,
    dt: float,
) -> float:
    """Largest distance along the trajectory between the mixed parts grown
    from the coherent input ``(|phi> + |psi>)/sqrt 2`` and from the
    incoherent ``(|phi><phi| + |psi><psi|)/2``."""
    phi, psi = _as_vector(phi), _as_vector(psi)
    s = phi + psi
    coherent = np.outer(s, s.conj()) / np.vdot(s, s).real
    incoherent = 0.5 * (np.outer(phi, phi.conj()) + np.outer(psi, psi.conj()))
    _, mix_a = split_evolve(coherent, gen, t_final, dt)
    _, mix_b = split_evolve(incoherent, gen, t_final, dt)
    return float(max(np.linalg.norm(a - b, 2) for a, b in zip(mix_a.states, mix_b.states)))
