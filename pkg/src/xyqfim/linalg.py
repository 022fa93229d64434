"""
Dense complex linear algebra used by the QFIM engine.

Conventions
-----------
``vec`` stacks columns: component ``j * rows + i`` of ``vec(A)`` is ``A[i, j]``.
With this ordering ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numpy.typing import ArrayLike, NDArray
from scipy.sparse.csgraph import connected_components

from .errors import DimensionMismatchError, NegativeEigenvalueError, NotHermitianError

DEFAULT_CUTOFF_REL = 1e-12
HERMITIAN_RTOL = 1e-10


def as_matrix(a: ArrayLike) -> NDArray[np.complex128]:
    """Return ``a`` as a 2-D complex128 array, checking that it is non-empty."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatchError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    return m


def matrices_close(a: ArrayLike, b: ArrayLike, atol: float) -> bool:
    """Elementwise comparison with an explicit absolute tolerance."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    return bool(np.all(np.abs(a - b) <= atol))


def vec(a: ArrayLike) -> NDArray[np.complex128]:
    """Column-stacking vectorization.

    >>> vec([[1, 2], [3, 4]]).real
    array([1., 3., 2., 4.])
    """
    return as_matrix(a).reshape(-1, order="F")


def unvec(v: ArrayLike, rows: int) -> NDArray[np.complex128]:
    """Inverse of :func:`vec` for a matrix with ``rows`` rows."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if rows < 1 or v.size == 0 or v.size % rows:
        raise DimensionMismatchError(f"vector of length {v.size} cannot be reshaped with {rows} rows")
    return v.reshape((rows, v.size // rows), order="F")


def kron(a: ArrayLike, b: ArrayLike) -> NDArray[np.complex128]:
    return np.kron(as_matrix(a), as_matrix(b))


def hermitian_defect(h: ArrayLike) -> float:
    """Relative Frobenius distance ``||H - H^dag|| / max(1, ||H||)``."""
    h = np.asarray(h)
    return float(np.linalg.norm(h - h.conj().T) / max(1.0, np.linalg.norm(h)))


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigenvalues in ascending order; ``eigenvectors[:, i]`` pairs with ``eigenvalues[i]``."""

    eigenvalues: NDArray[np.float64]
    eigenvectors: NDArray[np.complex128]

    def reconstruct(self) -> NDArray[np.complex128]:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def diagonal_blocks(h: NDArray) -> list[NDArray[np.intp]]:
    """Index sets of the irreducible diagonal blocks of ``h``.

    Two indices share a block when they are linked by a chain of exactly
    non-zero entries.
    """
    n_blocks, labels = connected_components(sp.csr_matrix(h != 0), directed=False)
    return [np.flatnonzero(labels == k) for k in range(n_blocks)]


def eig_hermitian(h: ArrayLike, rtol: float = HERMITIAN_RTOL) -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix.

    The input is checked for hermiticity (relative Frobenius tolerance ``rtol``)
    and the exactly Hermitian part is decomposed. A matrix that is
    block diagonal up to a permutation is decomposed block by block, so
    eigenvectors never mix across blocks and small eigenvalues of one block
    are resolved relative to that block's norm rather than the whole
    matrix's. Degenerate eigenspaces come back in an arbitrary orthonormal
    basis.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionMismatchError(f"Hermitian matrix must be square, got {h.shape}")
    defect = hermitian_defect(h)
    if defect > rtol:
        raise NotHermitianError(f"matrix is not Hermitian (relative defect {defect:.3e})")
    h = 0.5 * (h + h.conj().T)
    n = h.shape[0]
    blocks = diagonal_blocks(h)
    if len(blocks) == 1:
        w, v = np.linalg.eigh(h)
        return HermitianSpectrum(eigenvalues=w, eigenvectors=v)

    w = np.empty(n)
    v = np.zeros((n, n), dtype=np.complex128)
    col = 0
    for idx in blocks:
        wb, vb = np.linalg.eigh(h[np.ix_(idx, idx)])
        w[col : col + idx.size] = wb
        v[idx, col : col + idx.size] = vb
        col += idx.size
    order = np.argsort(w, kind="stable")
    return HermitianSpectrum(eigenvalues=w[order], eigenvectors=v[:, order])


@dataclass(frozen=True)
class SupportSolve:
    """Result of :func:`solve_on_support`.

    ``outside_support_norm`` is the 2-norm of the part of the right-hand side
    lying in the numerical kernel of the operator; that part is dropped.
    """

    solution: NDArray[np.complex128]
    outside_support_norm: float
    cutoff_used: float
    rank: int

    def is_clean(self, tol: float) -> bool:
        return self.outside_support_norm <= tol


def solve_on_support(
    m: ArrayLike | HermitianSpectrum,
    b: ArrayLike,
    cutoff_rel: float = DEFAULT_CUTOFF_REL,
) -> SupportSolve:
    """Minimal-norm solution of ``M x = P b`` for Hermitian PSD ``M``.

    ``P`` projects onto the span of eigenvectors whose eigenvalue exceeds
    ``cutoff_rel * lambda_max``. A precomputed :class:`HermitianSpectrum` may be
    passed instead of ``M`` to reuse one factorization for many right-hand sides.

    Raises
    ------
    NegativeEigenvalueError
        If ``M`` has an eigenvalue below ``-cutoff_rel * lambda_max``.
    """
    spec = m if isinstance(m, HermitianSpectrum) else eig_hermitian(m)
    w, v = spec.eigenvalues, spec.eigenvectors
    b = np.asarray(b, dtype=np.complex128)
    if b.shape != (w.size,):
        raise DimensionMismatchError(f"right-hand side of shape {b.shape} does not match operator of size {w.size}")

    lam_max = max(float(w[-1]), 0.0)
    cutoff = cutoff_rel * lam_max
    if w[0] < -cutoff:
        raise NegativeEigenvalueError(f"minimum eigenvalue {w[0]:.3e} below -{cutoff:.3e}")
    keep = w > cutoff
    vk = v[:, keep]
    x = vk @ ((vk.conj().T @ b) / w[keep])

    # kernel component measured directly, not as b - P b, to avoid cancellation
    kernel = v[:, ~keep]
    outside_norm = float(np.linalg.norm(kernel.conj().T @ b))
    return SupportSolve(solution=x, outside_support_norm=outside_norm, cutoff_used=cutoff, rank=int(keep.sum()))
