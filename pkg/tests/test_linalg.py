from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from xyqfim import linalg
from xyqfim.errors import DimensionMismatchError, NegativeEigenvalueError, NotHermitianError

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def complex_matrices(n: int, m: int | None = None):
    shape = (n, n if m is None else m)
    part = hnp.arrays(np.float64, shape, elements=finite)
    return st.tuples(part, part).map(lambda ab: ab[0] + 1j * ab[1])


def test_vec_is_column_stacking():
    a = np.array([[1, 2], [3, 4]])
    assert np.array_equal(linalg.vec(a), [1, 3, 2, 4])


def test_unvec_rejects_bad_length():
    with pytest.raises(DimensionMismatchError):
        linalg.unvec(np.arange(5), 2)


@given(complex_matrices(3))
def test_unvec_inverts_vec(a):
    assert np.array_equal(linalg.unvec(linalg.vec(a), 3), a)


@settings(max_examples=50)
@given(complex_matrices(2), complex_matrices(2, 3), complex_matrices(3))
def test_vec_of_product_identity(a, x, b):
    # vec(A X B) = (B^T kron A) vec(X)
    lhs = linalg.vec(a @ x @ b)
    rhs = linalg.kron(b.T, a) @ linalg.vec(x)
    assert np.allclose(lhs, rhs, atol=1e-9 * (1 + np.abs(lhs).max()))


def test_kron_shape_and_entries():
    k = linalg.kron(np.eye(2), [[0, 1], [1, 0]])
    assert k.shape == (4, 4)
    assert k[0, 1] == 1 and k[2, 3] == 1 and k[0, 3] == 0


def test_eig_hermitian_known_spectrum():
    h = np.array([[2, 1j], [-1j, 2]])
    spec = linalg.eig_hermitian(h)
    assert np.allclose(spec.eigenvalues, [1, 3])
    assert np.allclose(spec.reconstruct(), h)


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        linalg.eig_hermitian([[1, 2], [0, 1]])


def test_eig_hermitian_block_structure_keeps_tiny_eigenvalues_clean():
    # Two decoupled blocks with wildly different scales; a global solver would
    # smear rounding error of the large block into the small one.
    big = np.array([[1.0, 0.5], [0.5, 1.0]])
    small = 1e-14 * np.array([[2.0, 1.0], [1.0, 2.0]])
    h = np.zeros((4, 4))
    h[np.ix_([0, 3], [0, 3])] = big
    h[np.ix_([1, 2], [1, 2])] = small
    spec = linalg.eig_hermitian(h)
    assert np.allclose(spec.eigenvalues[:2], [1e-14, 3e-14], rtol=1e-12, atol=0)
    v = spec.eigenvectors[:, 0]
    assert np.count_nonzero(np.abs(v) > 1e-15) == 2


@settings(max_examples=60)
@given(complex_matrices(4))
def test_eig_hermitian_property(a):
    h = a + a.conj().T
    spec = linalg.eig_hermitian(h)
    v = spec.eigenvectors
    assert np.all(np.diff(spec.eigenvalues) >= 0)
    assert np.allclose(v.conj().T @ v, np.eye(4), atol=1e-10)
    assert np.allclose(spec.reconstruct(), h, atol=1e-9 * (1 + np.abs(h).max()))


def test_solve_on_support_full_rank_matches_solve(rng):
    a = rng.normal(size=(5, 5))
    m = a @ a.T + np.eye(5)
    b = rng.normal(size=5)
    res = linalg.solve_on_support(m, b)
    assert np.allclose(res.solution, np.linalg.solve(m, b))
    assert res.rank == 5 and res.outside_support_norm == 0.0 and res.is_clean(1e-12)


def test_solve_on_support_singular_reports_kernel_component():
    m = np.diag([2.0, 1.0, 0.0])
    res = linalg.solve_on_support(m, np.array([2.0, 3.0, 4.0]))
    assert np.allclose(res.solution, [1.0, 3.0, 0.0])
    assert res.rank == 2
    assert res.outside_support_norm == pytest.approx(4.0)
    assert not res.is_clean(1e-8)


def test_solve_on_support_rejects_negative_operator():
    with pytest.raises(NegativeEigenvalueError):
        linalg.solve_on_support(np.diag([1.0, -0.5]), np.ones(2))


def test_solve_on_support_dimension_check():
    with pytest.raises(DimensionMismatchError):
        linalg.solve_on_support(np.eye(3), np.ones(2))


@settings(max_examples=40)
@given(st.integers(0, 2**31 - 1))
def test_solve_on_support_agrees_with_pinv(seed):
    r = np.random.default_rng(seed)
    g = r.normal(size=(4, 2)) + 1j * r.normal(size=(4, 2))
    m = g @ g.conj().T  # rank 2 PSD
    b = r.normal(size=4) + 1j * r.normal(size=4)
    res = linalg.solve_on_support(m, b)
    assert np.allclose(res.solution, np.linalg.pinv(m, rcond=1e-12, hermitian=True) @ b, atol=1e-8)
    assert res.rank == 2
