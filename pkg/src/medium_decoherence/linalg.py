"""Dense complex linear algebra for particle/target tensor spaces.

Subsystem 0 is always the particle; subsystems 1..N are the targets in slab
order. Operators and states are plain numpy arrays; the small dataclasses
below only attach the subsystem dimensions so that tensor products and
partial traces can do their bookkeeping.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_TOL = 1e-12
POSITIVITY_TOL = 1e-9


def _as_dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"invalid subsystem dimensions {dims}")
    return dims


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    dims: tuple[int, ...] = ()
    normalized: bool = field(init=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        dims = _as_dims(self.dims or (amps.size,))
        if int(np.prod(dims)) != amps.size:
            raise ValueError(f"dims {dims} do not match vector length {amps.size}")
        norm = np.linalg.norm(amps)
        if not np.isfinite(norm):
            raise ValueError("state vector has non-finite norm")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "normalized", bool(abs(norm - 1.0) < 1e-12))

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


@dataclass(frozen=True)
class DensityMatrix:
    elements: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        rho = np.asarray(self.elements, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        dims = _as_dims(self.dims or (rho.shape[0],))
        if int(np.prod(dims)) != rho.shape[0]:
            raise ValueError(f"dims {dims} do not match matrix size {rho.shape[0]}")
        object.__setattr__(self, "elements", rho)
        object.__setattr__(self, "dims", dims)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.elements))


@dataclass(frozen=True)
class LinearOperator:
    """Operator on the subsystems listed in ``acts_on`` (indices into the
    global subsystem list, particle = 0)."""

    elements: np.ndarray
    dims: tuple[int, ...] = ()
    acts_on: tuple[int, ...] = ()

    def __post_init__(self):
        op = np.asarray(self.elements, dtype=complex)
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise ValueError(f"operator must be square, got shape {op.shape}")
        dims = _as_dims(self.dims or (op.shape[0],))
        acts_on = tuple(self.acts_on) or tuple(range(len(dims)))
        if len(acts_on) != len(dims):
            raise ValueError("acts_on must name one subsystem per dimension")
        if int(np.prod(dims)) != op.shape[0]:
            raise ValueError(f"dims {dims} do not match operator size {op.shape[0]}")
        object.__setattr__(self, "elements", op)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "acts_on", acts_on)


def tensor(a, b):
    """Kronecker product of two operators, states or density matrices.

    Plain arrays are accepted too (1-D arrays are states, 2-D operators).
    Dimensions are concatenated, ``a`` first.
    """
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.elements, b.elements), a.dims + b.dims)
    if isinstance(a, LinearOperator) and isinstance(b, LinearOperator):
        shift = max(a.acts_on) + 1
        acts_on = a.acts_on + tuple(shift + i for i in range(len(b.dims)))
        return LinearOperator(np.kron(a.elements, b.elements), a.dims + b.dims, acts_on)
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        return np.kron(a, b)
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1,) * factors[0].ndim, dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def partial_trace(rho, keep: Iterable[int], dims: Sequence[int] | None = None):
    """Reduce ``rho`` to the subsystems in ``keep``.

    ``rho`` may be a :class:`DensityMatrix` (dims taken from it) or a square
    array together with ``dims``. The kept subsystems stay in their original
    order. Returns the same kind that was passed in.
    """
    wrap = isinstance(rho, DensityMatrix)
    if wrap:
        mat, dims = rho.elements, rho.dims
    else:
        mat = np.asarray(rho)
        dims = _as_dims(dims if dims is not None else (mat.shape[0],))
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"subsystem indices {keep} out of range for {n} subsystems")
    if int(np.prod(dims)) != mat.shape[0]:
        raise ValueError(f"dims {tuple(dims)} do not match matrix size {mat.shape[0]}")

    traced = [i for i in range(n) if i not in keep]
    t = mat.reshape(tuple(dims) * 2)
    # contract each traced pair (row index i, column index i + n)
    row_labels = list(range(n))
    col_labels = [i + n if i in keep else i for i in range(n)]
    out_labels = [i for i in keep] + [i + n for i in keep]
    reduced = np.einsum(t, row_labels + col_labels, out_labels)
    kept_dims = tuple(dims[i] for i in keep)
    d = int(np.prod(kept_dims))
    reduced = reduced.reshape(d, d)
    if wrap:
        return DensityMatrix(reduced, kept_dims)
    return reduced


def apply_local(op: np.ndarray, psi: np.ndarray, dims: Sequence[int], sites: Sequence[int]) -> np.ndarray:
    """Apply an operator acting on ``sites`` (in the given order) to a state vector.

    The operator's own index order is the concatenation of the listed sites.
    Avoids building the embedded full-space matrix.
    """
    dims = tuple(dims)
    sub = tuple(dims[s] for s in sites)
    k = len(sites)
    t = psi.reshape(dims)
    op_t = op.reshape(sub + sub)
    moved = np.tensordot(op_t, t, axes=(list(range(k, 2 * k)), list(sites)))
    # tensordot puts the op's output axes first; restore the original order
    rest = [i for i in range(len(dims)) if i not in sites]
    order = list(sites) + rest
    inverse = np.argsort(order)
    return np.transpose(moved, inverse).reshape(-1)


def embed(op: np.ndarray, dims: Sequence[int], sites: Sequence[int]) -> np.ndarray:
    """Dense full-space matrix of a local operator. Only for small spaces."""
    d = int(np.prod(dims))
    cols = [apply_local(op, e, dims, sites) for e in np.eye(d, dtype=complex)]
    return np.array(cols).T


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    return float(np.max(np.abs(a - dagger(a)), initial=0.0)) <= tol * scale


@dataclass(frozen=True)
class Diagnostics:
    hermiticity_defect: float
    min_eigenvalue: float
    trace_deviation: float
    hermitian: bool
    positive: bool

    @property
    def ok(self) -> bool:
        return self.hermitian and self.positive


def validate(
    rho,
    hermiticity_tol: float = HERMITICITY_TOL,
    positivity_tol: float = POSITIVITY_TOL,
    expected_trace: float | None = 1.0,
) -> Diagnostics:
    """Hermiticity defect ``||rho - rho^dag||_2 / 2``, smallest eigenvalue of
    the hermitian part and ``|Tr rho - expected_trace|``."""
    mat = rho.elements if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    herm_defect = float(np.linalg.norm(mat - dagger(mat), 2)) / 2.0
    min_eig = float(np.linalg.eigvalsh((mat + dagger(mat)) / 2.0)[0])
    tr = np.trace(mat)
    trace_dev = 0.0 if expected_trace is None else float(abs(tr - expected_trace))
    scale = max(1.0, float(np.max(np.abs(mat))))
    return Diagnostics(
        hermiticity_defect=herm_defect,
        min_eigenvalue=min_eig,
        trace_deviation=trace_dev,
        hermitian=herm_defect <= hermiticity_tol * scale,
        positive=min_eig >= -positivity_tol,
    )


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho)


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (g + dagger(g)) / 2.0
    return scale * h / np.linalg.norm(h, 2)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))
