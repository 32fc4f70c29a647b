import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medium_decoherence.collision import (
    BORN,
    EXACT,
    TargetState,
    build_collision,
    check_ensemble,
    check_unitarity_relation,
    collision_from_unitary,
    computational_basis,
    extract_a_e,
    extract_d_m,
    pure_ensemble,
    slab_operators,
)
from medium_decoherence.linalg import random_hermitian, random_state, random_unitary
from medium_decoherence.oracle import fit_power_law, random_ensemble


def _from_t(T, dims):
    """Collision wrapper around an arbitrary T (for block-extraction tests)."""
    from medium_decoherence.collision import CollisionOperator

    return CollisionOperator(np.eye(T.shape[0]) + 1j * T, T, dims[0], dims[1])


def test_zero_coupling_is_identity():
    K = random_hermitian(6, np.random.default_rng(0))
    for mode in (EXACT, BORN):
        c = build_collision(K, 0.0, mode, (3, 2))
        assert np.allclose(c.S, np.eye(6)) and np.allclose(c.T, 0)


def test_rejects_non_hermitian_kernel():
    with pytest.raises(ValueError):
        build_collision(np.array([[0, 1], [0, 0]]), 0.1, EXACT, (1, 2))
    with pytest.raises(ValueError):
        build_collision(np.eye(4), 0.1, "third-order", (2, 2))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 5.0))
def test_exact_mode_is_unitary(seed, lam):
    K = random_hermitian(8, np.random.default_rng(seed))
    assert build_collision(K, lam, EXACT, (4, 2)).unitarity_defect() <= 1e-12


def test_born_unitarity_defect_scaling():
    """The truncation leaves S^dag S - 1 = lam^4 K^4 / 4: the defect is
    bounded by O(lam^3) and its measured exponent is 4."""
    K = random_hermitian(8, np.random.default_rng(1))
    lams = [0.02, 0.04, 0.08]
    defects = [build_collision(K, l, BORN, (4, 2)).unitarity_defect() for l in lams]
    slope, _ = fit_power_law(lams, defects)
    assert slope == pytest.approx(4.0, abs=0.1)
    K4 = np.linalg.matrix_power(K, 4)
    assert defects[0] == pytest.approx(np.linalg.norm(lams[0] ** 4 * K4 / 4, 2), rel=1e-6)


def test_target_state_validation():
    with pytest.raises(ValueError):
        TargetState(0, [1.0, 1.0])
    with pytest.raises(ValueError):
        check_ensemble([TargetState(0, [1, 0], 0.5), TargetState(1, [0, 1], 0.4)])
    with pytest.raises(ValueError):
        check_ensemble([TargetState(0, [1, 0], 0.5), TargetState(0, [0, 1], 0.5)])


def test_d_m_examples():
    rng = np.random.default_rng(2)
    a, b = np.eye(2)
    A = rng.normal(size=(3, 3))
    c = _from_t(np.kron(A, np.outer(a, a)), (3, 2))
    assert np.allclose(extract_d_m(c, TargetState(1, b)), 0)
    assert np.allclose(extract_d_m(c, TargetState(0, a)), A)
    T = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    m = random_state(2, rng)
    oracle = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            oracle[i, j] = sum(m[x].conj() * T[2 * i + x, 2 * j + y] * m[y] for x in range(2) for y in range(2))
    assert np.allclose(extract_d_m(_from_t(T, (3, 2)), TargetState(0, m)), oracle)
    with pytest.raises(ValueError):
        extract_d_m(c, TargetState(0, np.ones(3) / np.sqrt(3)))


def test_a_e_examples():
    rng = np.random.default_rng(3)
    l, m = np.eye(2)
    A = rng.normal(size=(2, 2))
    c = _from_t(np.kron(A, np.outer(l, m)), (2, 2))
    assert np.allclose(extract_a_e(c, TargetState(1, l), TargetState(0, m)), A)
    zero = _from_t(np.zeros((4, 4)), (2, 2))
    assert np.allclose(extract_a_e(zero, TargetState(1, l), TargetState(0, m)), 0)
    with pytest.raises(ValueError):
        extract_a_e(c, TargetState(0, l), TargetState(0, m))
    T = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    lv, mv = random_state(2, rng), random_state(2, rng)
    block = lambda u, v: np.array([[sum(u[x].conj() * T[2 * i + x, 2 * j + y] * v[y] for x in range(2) for y in range(2))
                                    for j in range(2)] for i in range(2)])
    oracle = block(lv, mv) - block(mv, mv) * np.vdot(lv, mv)
    assert np.allclose(extract_a_e(_from_t(T, (2, 2)), TargetState(1, lv), TargetState(0, mv)), oracle)


def test_a_e_depends_only_on_its_block():
    rng = np.random.default_rng(4)
    e0, e1, e2 = np.eye(3)
    T = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    B = rng.normal(size=(2, 2))
    # adding B (x) |m><m'| with m' orthogonal to m leaves A_E^(l,m) alone
    extra = np.kron(B, np.outer(e0, e2))
    l, m = TargetState(1, e1), TargetState(0, e0)
    a1 = extract_a_e(_from_t(T, (2, 3)), l, m)
    a2 = extract_a_e(_from_t(T + extra, (2, 3)), l, m)
    assert np.allclose(a1, a2)


def test_slab_operators_structure():
    rng = np.random.default_rng(5)
    c = build_collision(random_hermitian(8, rng), 0.3, EXACT, (4, 2))
    ens = random_ensemble(2, rng)
    ops = slab_operators(c, ens)
    for (n, m), a in ops.A_M.items():
        assert np.array_equal(a, ops.D_M[m] - ops.D_M[n])
        if n == m:
            assert not np.any(a)
    assert sum(ops.weights.values()) == pytest.approx(1.0)


def test_unitarity_relation_zero_t():
    c = collision_from_unitary(np.eye(4), (2, 2))
    m = TargetState(0, [1, 0])
    assert check_unitarity_relation(slab_operators(c, [m]), c, m, computational_basis(2)) == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_unitarity_relation_exact(seed, lam):
    rng = np.random.default_rng(seed)
    c = build_collision(random_hermitian(6, rng), lam, EXACT, (3, 2))
    ens = random_ensemble(2, rng)
    basis = [TargetState(i, v) for i, v in enumerate(random_unitary(2, rng).T)]
    ops = slab_operators(c, ens, basis)
    for m in ens:
        assert check_unitarity_relation(ops, c, m, basis) <= 1e-10


def test_unitarity_relation_needs_complete_basis():
    c = build_collision(random_hermitian(6, np.random.default_rng(6)), 0.2, EXACT, (3, 2))
    m = pure_ensemble([1, 0])[0]
    with pytest.raises(ValueError):
        check_unitarity_relation(slab_operators(c, [m]), c, m, computational_basis(2)[:1])
