"""
Quantum Fisher information matrix and symmetric logarithmic derivatives.

Two independent routes are provided:

* the vectorized route, which solves the linear system
  ``Lambda vec(L_i) = 2 vec(d_i rho)`` with ``Lambda = rho^T (x) I + I (x) rho``;
* the spectral route, which sums over pairs of eigenvectors of ``rho``.

The vectorized route is the production path; the spectral route is kept as an
oracle. Both drop contributions from eigenvalue pairs whose sum falls below
``cutoff_rel`` times the largest pair sum, so off-support SLD components are
fixed to zero.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import linalg
from .errors import DimensionMismatchError, InvalidStateError, NumericalError, StepUnderflowError

STATE_ATOL = 1e-12
DERIVATIVE_ATOL = 1e-10
RANK_WARNING_RTOL = 1e-8
IMAG_RESIDUE_TOL = 1e-10
COMMUTE_TOL = 1e-8
WEAK_TOL = 1e-10

Matrix = NDArray[np.complex128]


def check_density_matrix(rho: ArrayLike, atol: float = STATE_ATOL) -> Matrix:
    """Validate and return ``rho`` as a complex array.

    Checks hermiticity, unit trace and positivity, each to ``atol``.
    """
    rho = linalg.as_matrix(rho)
    n, m = rho.shape
    if n != m:
        raise DimensionMismatchError(f"density matrix must be square, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise InvalidStateError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > atol:
        raise InvalidStateError(f"density matrix has trace {tr:.15g}")
    lam_min = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lam_min < -atol:
        raise InvalidStateError(f"density matrix has negative eigenvalue {lam_min:.3e}")
    return rho


def check_derivative(d: ArrayLike, n: int, atol: float = DERIVATIVE_ATOL) -> Matrix:
    d = linalg.as_matrix(d)
    if d.shape != (n, n):
        raise DimensionMismatchError(f"derivative has shape {d.shape}, expected {(n, n)}")
    if np.max(np.abs(d - d.conj().T), initial=0.0) > atol:
        raise InvalidStateError("state derivative is not Hermitian")
    if abs(np.trace(d)) > atol:
        raise InvalidStateError(f"state derivative has non-zero trace {np.trace(d):.3e}")
    return d


def default_fd_steps(theta: ArrayLike, rel: float = 1e-5) -> NDArray[np.float64]:
    theta = np.asarray(theta, dtype=float)
    return rel * np.maximum(1.0, np.abs(theta))


def fd_derivatives(
    state_at: Callable[[NDArray[np.float64]], ArrayLike],
    theta: ArrayLike,
    h: ArrayLike | float | None = None,
) -> list[Matrix]:
    """Central-difference derivatives of ``state_at`` at ``theta``.

    ``h`` is a scalar or per-parameter step; by default
    ``1e-5 * max(1, |theta_i|)``. Results are Hermitian-symmetrized.
    """
    theta = np.asarray(theta, dtype=float).reshape(-1)
    steps = default_fd_steps(theta) if h is None else np.broadcast_to(np.asarray(h, dtype=float), theta.shape)
    if np.any(~(steps > 0)):
        raise StepUnderflowError(f"finite-difference steps must be > 0, got {steps}")
    out = []
    for i, hi in enumerate(steps):
        e = np.zeros_like(theta)
        e[i] = hi
        plus = np.asarray(state_at(theta + e), dtype=np.complex128)
        minus = np.asarray(state_at(theta - e), dtype=np.complex128)
        d = (plus - minus) / (2.0 * hi)
        out.append(0.5 * (d + d.conj().T))
    return out


@dataclass(frozen=True)
class ParametricStateFamily:
    """A map ``theta -> rho(theta)`` together with its parameter derivatives.

    ``state_at`` and ``derivatives_at`` must be free of side effects so that a
    family can be evaluated from several threads at once. When
    ``derivatives_at`` is ``None`` central finite differences are used, with
    step ``fd_step * max(1, |theta_i|)``.
    """

    parameter_names: tuple[str, ...]
    state_at: Callable[[NDArray[np.float64]], ArrayLike]
    dimension: int
    derivatives_at: Callable[[NDArray[np.float64]], Sequence[ArrayLike]] | None = None
    fd_step: float = 1e-5

    @property
    def num_parameters(self) -> int:
        return len(self.parameter_names)

    def _point(self, theta: ArrayLike) -> NDArray[np.float64]:
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.size != self.num_parameters:
            raise DimensionMismatchError(f"expected {self.num_parameters} parameters, got {theta.size}")
        return theta

    def state(self, theta: ArrayLike) -> Matrix:
        rho = check_density_matrix(self.state_at(self._point(theta)))
        if rho.shape[0] != self.dimension:
            raise DimensionMismatchError(f"state has dimension {rho.shape[0]}, family declares {self.dimension}")
        return rho

    def derivatives(self, theta: ArrayLike) -> list[Matrix]:
        theta = self._point(theta)
        if self.derivatives_at is None:
            raw = fd_derivatives(self.state_at, theta, default_fd_steps(theta, self.fd_step))
        else:
            raw = list(self.derivatives_at(theta))
        if len(raw) != self.num_parameters:
            raise DimensionMismatchError(f"expected {self.num_parameters} derivatives, got {len(raw)}")
        return [check_derivative(d, self.dimension) for d in raw]


def linear_family(rho0: ArrayLike, deltas: Sequence[ArrayLike], names: Sequence[str] | None = None) -> ParametricStateFamily:
    """The family ``rho0 + sum_i theta_i * deltas[i]`` with exact derivatives.

    Any local QFIM problem (a state and its derivatives at one point) is
    realized by such a family at ``theta = 0``.
    """
    rho0 = check_density_matrix(rho0)
    deltas = tuple(check_derivative(d, rho0.shape[0]) for d in deltas)
    if names is None:
        names = tuple(f"theta{i + 1}" for i in range(len(deltas)))

    def state_at(theta):
        return rho0 + sum(t * d for t, d in zip(theta, deltas))

    return ParametricStateFamily(
        parameter_names=tuple(names),
        state_at=state_at,
        dimension=rho0.shape[0],
        derivatives_at=lambda theta: deltas,
    )


def random_density_matrix(rng: np.random.Generator, n: int, mix: float = 0.1) -> Matrix:
    """Full-rank random state: a normalized Ginibre matrix mixed with ``I/n``."""
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    w = g @ g.conj().T
    rho = (1 - mix) * w / np.trace(w).real + mix * np.eye(n) / n
    return 0.5 * (rho + rho.conj().T)


def random_traceless_hermitian(rng: np.random.Generator, n: int) -> Matrix:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = 0.5 * (g + g.conj().T)
    return h - np.trace(h) / n * np.eye(n)


def random_full_rank_family(rng: np.random.Generator, n: int = 4, d: int = 2) -> ParametricStateFamily:
    """Random full-rank linear family, meant to be evaluated at ``theta = 0``."""
    return linear_family(random_density_matrix(rng, n), [random_traceless_hermitian(rng, n) for _ in range(d)])


def build_lambda(rho: ArrayLike) -> Matrix:
    """``rho^T (x) I + I (x) rho``; its eigenvalues are all pair sums ``p_k + p_l``."""
    rho = linalg.as_matrix(rho)
    eye = np.eye(rho.shape[0])
    return linalg.kron(rho.T, eye) + linalg.kron(eye, rho)


@dataclass(frozen=True)
class QFIMatrix:
    """Real symmetric QFIM plus diagnostics of the computation that produced it."""

    entries: NDArray[np.float64]
    parameter_names: tuple[str, ...]
    method: str
    outside_support_norms: tuple[float, ...] = ()
    rank_deficient: bool = False
    imag_residue: float = 0.0

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __getitem__(self, idx):
        return self.entries[idx]


@dataclass(frozen=True)
class SLDSet:
    """One Hermitian SLD per parameter.

    ``outside_support_norms[i]`` is the norm of the part of ``vec(d_i rho)``
    outside the support of ``Lambda`` (always 0 for the spectral route).
    """

    operators: tuple[Matrix, ...]
    parameter_names: tuple[str, ...]
    method: str
    outside_support_norms: tuple[float, ...] = ()
    rank_deficient: bool = False

    def __len__(self) -> int:
        return len(self.operators)

    def __getitem__(self, i: int) -> Matrix:
        return self.operators[i]


def lyapunov_residual(rho: ArrayLike, drho: ArrayLike, sld: ArrayLike) -> float:
    """``||2 d rho - (L rho + rho L)||_F / max(1, ||d rho||_F)``."""
    rho, drho, sld = (np.asarray(a) for a in (rho, drho, sld))
    r = 2.0 * drho - (sld @ rho + rho @ sld)
    return float(np.linalg.norm(r) / max(1.0, np.linalg.norm(drho)))


def qfim_from_slds(rho: ArrayLike, slds: SLDSet | Sequence[ArrayLike]) -> NDArray[np.float64]:
    """``F_ij = Tr(rho {L_i, L_j}) / 2``."""
    rho = np.asarray(rho)
    ops = list(slds.operators if isinstance(slds, SLDSet) else slds)
    d = len(ops)
    f = np.empty((d, d))
    for i in range(d):
        for j in range(d):
            anti = ops[i] @ ops[j] + ops[j] @ ops[i]
            f[i, j] = 0.5 * np.trace(anti @ rho).real
    return f


def _finalize_qfim(raw: NDArray[np.complex128]) -> tuple[NDArray[np.float64], float]:
    sym = 0.5 * (raw + raw.T)
    residue = float(np.max(np.abs(sym.imag), initial=0.0))
    scale = max(1.0, float(np.max(np.abs(sym.real), initial=0.0)))
    if residue > IMAG_RESIDUE_TOL * scale:
        raise NumericalError(f"QFIM has imaginary residue {residue:.3e}")
    return np.ascontiguousarray(sym.real), residue


def vectorized_solve(
    rho: ArrayLike,
    drhos: Sequence[ArrayLike],
    cutoff_rel: float = linalg.DEFAULT_CUTOFF_REL,
) -> tuple[NDArray[np.complex128], list[Matrix], list[float]]:
    """Apply ``Lambda^+`` to every ``vec(d_i rho)``.

    Returns the raw (unsymmetrized) matrix ``2 vec(d_i)^dag Lambda^+ vec(d_j)``,
    the SLDs and the outside-support norms.
    """
    rho = linalg.as_matrix(rho)
    n = rho.shape[0]
    spectrum = linalg.eig_hermitian(build_lambda(rho))
    vecs = [linalg.vec(d) for d in drhos]
    solves = [linalg.solve_on_support(spectrum, v, cutoff_rel) for v in vecs]
    raw = np.array([[2.0 * np.vdot(vi, s.solution) for s in solves] for vi in vecs], dtype=np.complex128)
    slds = []
    for s in solves:
        op = linalg.unvec(2.0 * s.solution, n)
        slds.append(0.5 * (op + op.conj().T))
    return raw, slds, [s.outside_support_norm for s in solves]


def _rank_flag(norms: Sequence[float], drhos: Sequence[Matrix]) -> bool:
    return any(nrm > RANK_WARNING_RTOL * np.linalg.norm(d) for nrm, d in zip(norms, drhos))


def qfim_vectorized(
    family: ParametricStateFamily,
    theta: ArrayLike,
    cutoff_rel: float = linalg.DEFAULT_CUTOFF_REL,
) -> QFIMatrix:
    """QFIM via ``F_ij = 2 vec(d_i rho)^dag Lambda^+ vec(d_j rho)``.

    ``rank_deficient`` is set when some derivative has a component outside the
    support of ``Lambda`` larger than ``1e-8 * ||d_i rho||``: that component is
    discarded and the QFIM underestimates the information it carries.
    """
    rho = family.state(theta)
    drhos = family.derivatives(theta)
    raw, _, norms = vectorized_solve(rho, drhos, cutoff_rel)
    entries, residue = _finalize_qfim(raw)
    return QFIMatrix(
        entries=entries,
        parameter_names=family.parameter_names,
        method="vectorized",
        outside_support_norms=tuple(norms),
        rank_deficient=_rank_flag(norms, drhos),
        imag_residue=residue,
    )


def sld_vectorized(
    family: ParametricStateFamily,
    theta: ArrayLike,
    cutoff_rel: float = linalg.DEFAULT_CUTOFF_REL,
) -> SLDSet:
    rho = family.state(theta)
    drhos = family.derivatives(theta)
    _, slds, norms = vectorized_solve(rho, drhos, cutoff_rel)
    return SLDSet(
        operators=tuple(slds),
        parameter_names=family.parameter_names,
        method="vectorized",
        outside_support_norms=tuple(norms),
        rank_deficient=_rank_flag(norms, drhos),
    )


def _spectral_parts(rho: Matrix, cutoff_rel: float):
    spec = linalg.eig_hermitian(rho)
    p, v = spec.eigenvalues, spec.eigenvectors
    denom = p[:, None] + p[None, :]
    keep = denom > cutoff_rel * max(float(denom.max()), 0.0)
    inv = np.zeros_like(denom)
    inv[keep] = 1.0 / denom[keep]
    return v, inv


def qfim_spectral(
    family: ParametricStateFamily,
    theta: ArrayLike,
    cutoff_rel: float = linalg.DEFAULT_CUTOFF_REL,
) -> QFIMatrix:
    """QFIM from the eigendecomposition of ``rho``.

    ``F_ij = 2 sum_{k,l} <k|d_i rho|l><l|d_j rho|k> / (p_k + p_l)`` over pairs
    with ``p_k + p_l`` above the cutoff.
    """
    rho = family.state(theta)
    drhos = family.derivatives(theta)
    v, inv = _spectral_parts(rho, cutoff_rel)
    rotated = [v.conj().T @ d @ v for d in drhos]
    d = len(rotated)
    raw = np.empty((d, d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            raw[i, j] = 2.0 * np.sum(rotated[i] * rotated[j].T * inv)
    entries, residue = _finalize_qfim(raw)
    return QFIMatrix(entries=entries, parameter_names=family.parameter_names, method="spectral", imag_residue=residue)


def sld_spectral(
    family: ParametricStateFamily,
    theta: ArrayLike,
    cutoff_rel: float = linalg.DEFAULT_CUTOFF_REL,
) -> SLDSet:
    rho = family.state(theta)
    v, inv = _spectral_parts(rho, cutoff_rel)
    ops = []
    for d in family.derivatives(theta):
        op = v @ (2.0 * (v.conj().T @ d @ v) * inv) @ v.conj().T
        ops.append(0.5 * (op + op.conj().T))
    return SLDSet(operators=tuple(ops), parameter_names=family.parameter_names, method="spectral")


@dataclass(frozen=True)
class SaturationReport:
    """Compatibility diagnostics for a set of SLDs.

    ``commute_flag``: every ``||[L_i, L_j]||_F <= tol * ||L_i|| ||L_j||``.
    ``weak_flag``: every ``|Tr(rho [L_i, L_j])| <= weak_tol * ||L_i|| ||L_j||``;
    it is also set whenever ``commute_flag`` is, since commuting SLDs satisfy
    the weak condition exactly.
    """

    commutator_norms: NDArray[np.float64]
    weak_condition_values: NDArray[np.complex128]
    commute_flag: bool
    weak_flag: bool
    tol: float = COMMUTE_TOL
    weak_tol: float = WEAK_TOL
    sld_norms: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))

    @property
    def max_commutator_norm(self) -> float:
        return float(np.max(self.commutator_norms, initial=0.0))

    @property
    def max_weak_value(self) -> float:
        return float(np.max(np.abs(self.weak_condition_values), initial=0.0))


def saturation_report(
    rho: ArrayLike,
    slds: SLDSet | Sequence[ArrayLike],
    tol: float = COMMUTE_TOL,
    weak_tol: float = WEAK_TOL,
) -> SaturationReport:
    rho = linalg.as_matrix(rho)
    ops = list(slds.operators if isinstance(slds, SLDSet) else slds)
    for op in ops:
        if np.shape(op) != rho.shape:
            raise DimensionMismatchError(f"SLD of shape {np.shape(op)} does not match state {rho.shape}")
    d = len(ops)
    norms = np.array([np.linalg.norm(op) for op in ops])
    comm = np.zeros((d, d))
    weak = np.zeros((d, d), dtype=np.complex128)
    commute = weak_ok = True
    for i in range(d):
        for j in range(i + 1, d):
            c = ops[i] @ ops[j] - ops[j] @ ops[i]
            comm[i, j] = comm[j, i] = np.linalg.norm(c)
            w = np.trace(rho @ c)
            weak[i, j], weak[j, i] = w, -w
            scale = norms[i] * norms[j]
            commute &= bool(comm[i, j] <= tol * scale)
            weak_ok &= bool(abs(w) <= weak_tol * scale)
    return SaturationReport(
        commutator_norms=comm,
        weak_condition_values=weak,
        commute_flag=commute,
        weak_flag=weak_ok or commute,
        tol=tol,
        weak_tol=weak_tol,
        sld_norms=norms,
    )
