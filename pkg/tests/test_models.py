from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from xyqfim import models, qfim
from xyqfim.errors import DomainError, UnknownNameError
from xyqfim.models import AnisotropicXYParams, IsotropicFieldParams

temps = st.floats(0.05, 5.0)
couplings = st.floats(-2.0, 2.0)


def gibbs_by_expm(h, T):
    w = scipy.linalg.expm(-h / T)
    return w / np.trace(w)


def boltzmann_fisher(E, dE, T):
    """Classical Fisher matrix of p_k ~ exp(-E_k/T) over (x, T), given dE_k/dx.

    Exact for these models because their eigenbases do not depend on (x, T).
    """
    E, dE = np.asarray(E, float), np.asarray(dE, float)
    w = np.exp(-(E - E.min()) / T)
    p = w / w.sum()
    g = np.array([dE / T, -E / T**2])
    g -= (g @ p)[:, None]
    return (g * p) @ g.T


# Frozen values from 40-digit evaluation of the Boltzmann Fisher matrix.
FROZEN_ANISO = [
    ((0.3, 0.7), (0.63961942989489451, -0.041439388804909798, 1.2233841316375841)),
    ((1.0, 1.0), (0.35499358540350652, -0.20998717080701303, 0.41997434161402607)),
    ((-1.5, 0.7), (0.5045693678226341, 0.51550255164069783, 0.92212989523912819)),
    ((0.0, 2.0), (0.11750185610079724, 0.0, 0.029375464025199311)),
]
FROZEN_ISO = [
    ((0.4, 0.6, 1.0), (0.76999196532841154, 0.023832944247427362, 1.7648706601030572)),
    ((0.0, 1.0, 1.0), (0.39322386648296371, 0.0, 0.39322386648296371)),
    ((0.5, 0.3, 1.0), (1.5586418785115788, 2.1052878219052126, 5.9710562479124487)),
    ((-1.2, 1.5, -0.7), (0.18430490412987446, 0.13257731548104719, 0.13430607858150629)),
]


@pytest.mark.parametrize("point,expected", FROZEN_ANISO)
def test_aniso_qfim_frozen(point, expected):
    F = qfim.qfim_vectorized(models.aniso_family(), point).entries
    assert np.allclose([F[0, 0], F[0, 1], F[1, 1]], expected, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("point,expected", FROZEN_ISO)
def test_iso_qfim_frozen(point, expected):
    B, T, J = point
    F = qfim.qfim_vectorized(models.iso_field_family(J), [B, T]).entries
    assert np.allclose([F[0, 0], F[0, 1], F[1, 1]], expected, rtol=1e-10, atol=1e-14)


def test_iso_field_bb_at_zero_field():
    F = qfim.qfim_vectorized(models.iso_field_family(1.0), [0.0, 1.0]).entries
    assert F[0, 0] == pytest.approx(1 / (1 + np.cosh(1.0)), rel=1e-12)
    assert F[0, 0] == pytest.approx(0.39322, abs=5e-6)


@settings(max_examples=40, deadline=None)
@given(couplings, st.floats(0.2, 5.0))
def test_aniso_matches_boltzmann_oracle(gamma, T):
    F = qfim.qfim_vectorized(models.aniso_family(), [gamma, T]).entries
    ref = boltzmann_fisher([1, -1, gamma, -gamma], [0, 0, 1, -1], T)
    assert np.allclose(F, ref, rtol=1e-8, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(couplings, st.floats(0.2, 5.0), st.sampled_from([-1.5, -1.0, 0.5, 1.0]))
def test_iso_matches_boltzmann_oracle(B, T, J):
    F = qfim.qfim_vectorized(models.iso_field_family(J), [B, T]).entries
    ref = boltzmann_fisher([B, -B, J, -J], [1, -1, 0, 0], T)
    assert np.allclose(F, ref, rtol=1e-8, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(couplings, temps)
def test_aniso_gibbs_matches_expm(gamma, T):
    rho, _ = models.gibbs_aniso(AnisotropicXYParams(gamma, T))
    assert np.allclose(rho, gibbs_by_expm(models.hamiltonian_aniso(gamma), T), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(couplings, temps, st.floats(-2.0, 2.0).filter(lambda j: abs(j) > 0.05))
def test_iso_gibbs_matches_expm(B, T, J):
    rho, _ = models.gibbs_iso_field(IsotropicFieldParams(B, T, J))
    assert np.allclose(rho, gibbs_by_expm(models.hamiltonian_iso_field(B, J), T), atol=1e-12)


@pytest.mark.parametrize("T", [1e-3, 1e-6])
def test_gibbs_finite_at_very_low_temperature(T):
    rho, _ = models.gibbs_aniso(AnisotropicXYParams(0.5, T))
    assert np.all(np.isfinite(rho)) and np.trace(rho).real == pytest.approx(1.0)
    d = models.d_rho_aniso(AnisotropicXYParams(0.5, T))
    assert all(np.all(np.isfinite(x)) for x in d)
    rho2, _ = models.gibbs_iso_field(IsotropicFieldParams(0.5, T, 1.0))
    assert np.all(np.isfinite(rho2))


@settings(max_examples=30, deadline=None)
@given(couplings, st.floats(0.25, 3.0))
def test_analytic_derivatives_match_central_differences(x, T):
    for fam in (models.aniso_family(), models.iso_field_family(1.0)):
        exact = fam.derivatives([x, T])
        fd = qfim.fd_derivatives(fam.state_at, [x, T], h=1e-5)
        for a, b in zip(exact, fd):
            assert np.max(np.abs(a - b)) <= 1e-6


def test_hamiltonian_eigenstructure():
    g, B, J = 0.7, 0.4, 1.3
    ha = models.hamiltonian_aniso(g)
    assert np.allclose(ha @ models.PSI_PLUS, models.PSI_PLUS)
    assert np.allclose(ha @ models.PSI_MINUS, -models.PSI_MINUS)
    assert np.allclose(ha @ models.CHI_PLUS, g * models.CHI_PLUS)
    assert np.allclose(ha @ models.CHI_MINUS, -g * models.CHI_MINUS)
    hi = models.hamiltonian_iso_field(B, J)
    assert np.allclose(hi @ models.KET_00, B * models.KET_00)
    assert np.allclose(hi @ models.KET_11, -B * models.KET_11)
    assert np.allclose(hi @ models.PSI_PLUS, J * models.PSI_PLUS)
    assert np.allclose(hi @ models.PSI_MINUS, -J * models.PSI_MINUS)


@pytest.mark.parametrize("model", models.MODELS)
def test_optimal_basis_is_orthonormal(model):
    U = models.optimal_basis(model).as_matrix()
    assert np.allclose(U.conj().T @ U, np.eye(4))


def test_optimal_basis_diagonalizes_slds():
    for model, fam, th in [
        (models.ANISO, models.aniso_family(), [0.6, 0.4]),
        (models.ISO_FIELD, models.iso_field_family(1.0), [-0.3, 0.8]),
    ]:
        slds = qfim.sld_vectorized(fam, th)
        for v in models.optimal_basis(model).vectors:
            for L in slds:
                assert models.eigen_residual(L, v) <= 1e-10


def test_high_temperature_limit_is_maximally_mixed():
    rho, _ = models.gibbs_aniso(AnisotropicXYParams(1.3, 1e14))
    assert np.allclose(rho, np.eye(4) / 4, atol=1e-12, rtol=0)
    rho, _ = models.gibbs_iso_field(IsotropicFieldParams(-0.8, 1e14, 1.0))
    assert np.allclose(rho, np.eye(4) / 4, atol=1e-12, rtol=0)


@settings(max_examples=30, deadline=None)
@given(couplings, st.floats(0.2, 3.0))
def test_iso_state_invariant_under_coupling_sign_up_to_basis(B, T):
    # J -> -J swaps psi+ and psi-; the QFIM is unchanged.
    F1 = qfim.qfim_vectorized(models.iso_field_family(1.0), [B, T]).entries
    F2 = qfim.qfim_vectorized(models.iso_field_family(-1.0), [B, T]).entries
    assert np.allclose(F1, F2, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize(
    "make",
    [
        lambda: AnisotropicXYParams(0.0, -1.0),
        lambda: AnisotropicXYParams(0.0, 0.0),
        lambda: AnisotropicXYParams(np.nan, 1.0),
        lambda: IsotropicFieldParams(0.0, np.inf, 1.0),
        lambda: IsotropicFieldParams(0.0, 1.0, 0.0),
    ],
)
def test_domain_errors(make):
    with pytest.raises(DomainError):
        make()


def test_unknown_model():
    with pytest.raises(UnknownNameError):
        models.family_for("heisenberg")
    with pytest.raises(UnknownNameError):
        models.optimal_basis("heisenberg")
