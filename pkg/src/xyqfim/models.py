"""
Thermal states of the two-qubit Heisenberg XY models.

Two families are provided, both in the computational basis
``|00>, |01>, |10>, |11>`` with the Boltzmann constant set to 1:

``xy-aniso``
    anisotropic XY coupling (``J = 1``), parameters ``(gamma, T)``. The Gibbs
    state has entries ``a`` (corners of the diagonal), ``x`` (anti-corners),
    ``b`` and ``z`` (central block).
``xy-iso-field``
    isotropic XY coupling ``J`` in a field ``B`` along z, parameters ``(B, T)``.
    Entries ``c`` at ``|00><00|``, ``d`` at ``|11><11|``, and ``t``/``y`` in the
    central block.

Every entry is a ratio of hyperbolic functions. They are evaluated after
dividing numerator and denominator by the dominant exponential, which keeps
the formulas finite down to arbitrarily small temperatures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from .errors import DomainError, UnknownNameError
from .qfim import ParametricStateFamily

ANISO = "xy-aniso"
ISO_FIELD = "xy-iso-field"
MODELS = (ANISO, ISO_FIELD)

SQRT_HALF = np.sqrt(0.5)

Matrix = NDArray[np.complex128]


def _check_temperature(T: float) -> None:
    if not (np.isfinite(T) and T > 0):
        raise DomainError(f"temperature must be finite and > 0, got T={T}")


@dataclass(frozen=True)
class AnisotropicXYParams:
    gamma: float
    T: float

    J = 1.0

    def __post_init__(self):
        _check_temperature(self.T)
        if not np.isfinite(self.gamma):
            raise DomainError(f"gamma must be finite, got {self.gamma}")

    @property
    def beta(self) -> float:
        return 1.0 / self.T


@dataclass(frozen=True)
class IsotropicFieldParams:
    B: float
    T: float
    J: float = 1.0

    def __post_init__(self):
        _check_temperature(self.T)
        if not np.isfinite(self.B):
            raise DomainError(f"B must be finite, got {self.B}")
        if not np.isfinite(self.J) or self.J == 0:
            raise DomainError(f"J must be finite and non-zero, got {self.J}")

    @property
    def beta(self) -> float:
        return 1.0 / self.T


class GibbsEntriesAniso(NamedTuple):
    a: float
    b: float
    x: float
    z: float


class GibbsEntriesIso(NamedTuple):
    c: float
    d: float
    y: float
    t: float


def _ch(u: float, m: float) -> float:
    """``cosh(u) * exp(-m)``."""
    return 0.5 * (np.exp(u - m) + np.exp(-u - m))


def _sh(u: float, m: float) -> float:
    """``sinh(u) * exp(-m)``."""
    return 0.5 * (np.exp(u - m) - np.exp(-u - m))


def _ratio(num: float, den: float) -> float:
    return num / (2.0 * den)


def _ratio_derivative(num: float, dnum: float, den: float, dden: float) -> float:
    """Derivative of ``num / (2 den)``."""
    return (dnum * den - num * dden) / (2.0 * den * den)


def aniso_matrix(e: GibbsEntriesAniso) -> Matrix:
    a, b, x, z = e
    return np.array([[a, 0, 0, x], [0, b, z, 0], [0, z, b, 0], [x, 0, 0, a]], dtype=np.complex128)


def iso_matrix(e: GibbsEntriesIso) -> Matrix:
    c, d, y, t = e
    return np.array([[c, 0, 0, 0], [0, t, y, 0], [0, y, t, 0], [0, 0, 0, d]], dtype=np.complex128)


def _aniso_terms(p: AnisotropicXYParams):
    """Scaled numerators, denominator and their gamma/beta derivatives."""
    beta, g = p.beta, p.gamma
    m = beta * max(1.0, abs(g))
    chg, shg = _ch(beta * g, m), _sh(beta * g, m)
    chb, shb = _ch(beta, m), _sh(beta, m)
    num = (chg, chb, -shg, -shb)
    den = chg + chb
    d_gamma = (beta * shg, 0.0, -beta * chg, 0.0)
    dden_gamma = beta * shg
    d_beta = (g * shg, shb, -g * chg, -chb)
    dden_beta = g * shg + shb
    return num, den, (d_gamma, dden_gamma), (d_beta, dden_beta)


def gibbs_entries_aniso(p: AnisotropicXYParams) -> GibbsEntriesAniso:
    num, den, _, _ = _aniso_terms(p)
    return GibbsEntriesAniso(*(_ratio(n, den) for n in num))


def gibbs_aniso(p: AnisotropicXYParams) -> tuple[Matrix, GibbsEntriesAniso]:
    """Gibbs state ``exp(-H/T)/Z`` of the anisotropic model and its entries."""
    e = gibbs_entries_aniso(p)
    return aniso_matrix(e), e


def d_entries_aniso(p: AnisotropicXYParams) -> tuple[GibbsEntriesAniso, GibbsEntriesAniso]:
    """``(d/dgamma, d/dT)`` of ``(a, b, x, z)``."""
    num, den, (dg, ddg), (db, ddb) = _aniso_terms(p)
    wrt_gamma = GibbsEntriesAniso(*(_ratio_derivative(n, dn, den, ddg) for n, dn in zip(num, dg)))
    # d/dT = -beta^2 d/dbeta
    wrt_T = GibbsEntriesAniso(*(-p.beta**2 * _ratio_derivative(n, dn, den, ddb) for n, dn in zip(num, db)))
    return wrt_gamma, wrt_T


def d_rho_aniso(p: AnisotropicXYParams) -> tuple[Matrix, Matrix]:
    dg, dT = d_entries_aniso(p)
    return aniso_matrix(dg), aniso_matrix(dT)


def _iso_terms(p: IsotropicFieldParams):
    beta, B, J = p.beta, p.B, p.J
    m = beta * max(abs(B), abs(J))
    em, ep = np.exp(-beta * B - m), np.exp(beta * B - m)
    chJ, shJ = _ch(beta * J, m), _sh(beta * J, m)
    shB = _sh(beta * B, m)
    num = (em, ep, -shJ, chJ)
    den = 0.5 * (em + ep) + chJ
    d_B = (-beta * em, beta * ep, 0.0, 0.0)
    dden_B = beta * shB
    d_beta = (-B * em, B * ep, -J * chJ, J * shJ)
    dden_beta = B * shB + J * shJ
    return num, den, (d_B, dden_B), (d_beta, dden_beta)


def gibbs_entries_iso(p: IsotropicFieldParams) -> GibbsEntriesIso:
    num, den, _, _ = _iso_terms(p)
    return GibbsEntriesIso(*(_ratio(n, den) for n in num))


def gibbs_iso_field(p: IsotropicFieldParams) -> tuple[Matrix, GibbsEntriesIso]:
    """Gibbs state of the isotropic XY model in a field, and its entries."""
    e = gibbs_entries_iso(p)
    return iso_matrix(e), e


def d_entries_iso(p: IsotropicFieldParams) -> tuple[GibbsEntriesIso, GibbsEntriesIso]:
    """``(d/dB, d/dT)`` of ``(c, d, y, t)``."""
    num, den, (dB, ddB), (db, ddb) = _iso_terms(p)
    wrt_B = GibbsEntriesIso(*(_ratio_derivative(n, dn, den, ddB) for n, dn in zip(num, dB)))
    wrt_T = GibbsEntriesIso(*(-p.beta**2 * _ratio_derivative(n, dn, den, ddb) for n, dn in zip(num, db)))
    return wrt_B, wrt_T


def d_rho_iso_field(p: IsotropicFieldParams) -> tuple[Matrix, Matrix]:
    dB, dT = d_entries_iso(p)
    return iso_matrix(dB), iso_matrix(dT)


def aniso_family() -> ParametricStateFamily:
    """Family over ``theta = (gamma, T)`` with analytic derivatives."""
    return ParametricStateFamily(
        parameter_names=("gamma", "T"),
        state_at=lambda th: gibbs_aniso(AnisotropicXYParams(th[0], th[1]))[0],
        derivatives_at=lambda th: d_rho_aniso(AnisotropicXYParams(th[0], th[1])),
        dimension=4,
    )


def iso_field_family(J: float = 1.0) -> ParametricStateFamily:
    """Family over ``theta = (B, T)`` at fixed coupling ``J``."""
    IsotropicFieldParams(0.0, 1.0, J)  # validates J
    return ParametricStateFamily(
        parameter_names=("B", "T"),
        state_at=lambda th: gibbs_iso_field(IsotropicFieldParams(th[0], th[1], J))[0],
        derivatives_at=lambda th: d_rho_iso_field(IsotropicFieldParams(th[0], th[1], J)),
        dimension=4,
    )


def family_for(model: str, J: float = 1.0) -> ParametricStateFamily:
    if model == ANISO:
        return aniso_family()
    if model == ISO_FIELD:
        return iso_field_family(J)
    raise UnknownNameError(f"unknown model {model!r}; expected one of {MODELS}")


# Hamiltonians, with sigma^+- = (sigma^x +- i sigma^y) / 2 so that sigma^+ = |0><1|.
# Used to cross-check the closed-form Gibbs entries.

_SP = np.array([[0, 1], [0, 0]], dtype=np.complex128)
_SM = _SP.T.copy()
_SZ = np.diag([1.0, -1.0]).astype(np.complex128)
_I2 = np.eye(2, dtype=np.complex128)


def hamiltonian_aniso(gamma: float, J: float = 1.0) -> Matrix:
    hop = np.kron(_SP, _SM) + np.kron(_SM, _SP)
    pair = np.kron(_SP, _SP) + np.kron(_SM, _SM)
    return J * hop + J * gamma * pair


def hamiltonian_iso_field(B: float, J: float = 1.0) -> Matrix:
    zeeman = 0.5 * B * (np.kron(_SZ, _I2) + np.kron(_I2, _SZ))
    return zeeman + J * (np.kron(_SP, _SM) + np.kron(_SM, _SP))


def _ket(*amps: float) -> NDArray[np.complex128]:
    return np.array(amps, dtype=np.complex128)


KET_00 = _ket(1, 0, 0, 0)
KET_11 = _ket(0, 0, 0, 1)
PSI_PLUS = SQRT_HALF * _ket(0, 1, 1, 0)
PSI_MINUS = SQRT_HALF * _ket(0, 1, -1, 0)
CHI_PLUS = SQRT_HALF * _ket(1, 0, 0, 1)
CHI_MINUS = SQRT_HALF * _ket(1, 0, 0, -1)


@dataclass(frozen=True)
class OptimalBasis:
    """Four orthonormal two-qubit states shared by both SLDs of a model."""

    labels: tuple[str, ...]
    vectors: tuple[NDArray[np.complex128], ...]

    def as_matrix(self) -> Matrix:
        """Basis vectors as columns."""
        return np.column_stack(self.vectors)


def optimal_basis(model: str) -> OptimalBasis:
    if model == ANISO:
        return OptimalBasis(("-psi-", "psi+", "-chi-", "chi+"), (-PSI_MINUS, PSI_PLUS, -CHI_MINUS, CHI_PLUS))
    if model == ISO_FIELD:
        return OptimalBasis(("00", "psi+", "-psi-", "11"), (KET_00, PSI_PLUS, -PSI_MINUS, KET_11))
    raise UnknownNameError(f"unknown model {model!r}; expected one of {MODELS}")


def eigen_residual(op: Matrix, v: NDArray[np.complex128]) -> float:
    """``||A v - (v^dag A v) v||`` for a unit vector ``v``."""
    av = op @ v
    return float(np.linalg.norm(av - np.vdot(v, av) * v))
