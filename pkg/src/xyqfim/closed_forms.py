"""
Reference closed-form expressions for the two XY models.

The functions transcribe the known analytic formulas term by term so that they can be
compared with the numerical QFIM; they are deliberately not simplified or
corrected. Direct hyperbolic evaluation overflows for ``T`` below roughly
``max(|gamma|, |B|, |J|) / 700``; beyond that the values are ``inf``/``nan``.

Known discrepancy: with the Gibbs entries defined as in :mod:`xyqfim.models`
(``c`` carries ``exp(-beta B)``), the reference ``F_BT`` has the opposite sign to the QFIM of
that state. All other expressions agree with the numerical route.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from .errors import DomainError, UnknownNameError
from .models import AnisotropicXYParams, IsotropicFieldParams

ch, sh, exp = np.cosh, np.sinh, np.exp


def _aniso(gamma: float, T: float) -> tuple[float, float, float]:
    p = AnisotropicXYParams(gamma, T)
    return p.gamma, p.T, p.beta


def _iso(B: float, T: float, J: float) -> tuple[float, float, float, float]:
    p = IsotropicFieldParams(B, T, J)
    return p.B, p.T, p.J, p.beta


def _cosh_sum4(b: float, g: float) -> float:
    return ch(b * (g - 2)) + ch(b * (2 + g)) + ch(b * (1 - 2 * g)) + ch(b * (1 + 2 * g))


def aniso_var_gamma_min(gamma: float, T: float) -> float:
    g, T, b = _aniso(gamma, T)
    return T**2 * (1 + g**2 + (1 + g**2) * ch(b) * ch(b * g) - 2 * g * sh(b) * sh(b * g))


def aniso_var_T_min(gamma: float, T: float) -> float:
    g, T, b = _aniso(gamma, T)
    return T**4 * (1.5 + _cosh_sum4(b, g) / (4 * (ch(b) + ch(b * g))))


def aniso_var_gamma_ind(gamma: float, T: float) -> float:
    g, T, b = _aniso(gamma, T)
    s = ch(b) + ch(b * g)
    return 4 * T**2 * s**3 / (6 * s + _cosh_sum4(b, g))


def aniso_var_T_ind(gamma: float, T: float) -> float:
    g, T, b = _aniso(gamma, T)
    den = (1 + g**2) * (1 + ch(b) * ch(b * g)) - 2 * g * sh(b) * sh(b * g)
    return T**4 * (ch(b) + ch(b * g)) ** 2 / den


def aniso_gamma_ratio(gamma: float, T: float) -> float:
    g, T, b = _aniso(gamma, T)
    q = 1 + ch(b) * ch(b * g)
    return q * ((1 + g**2) * q - 2 * g * sh(b) * sh(b * g)) / (2 * (ch(b) + ch(b * g)) ** 2)


def _iso_common(B: float, T: float, J: float):
    B, T, J, b = _iso(B, T, J)
    E = exp(b * B)
    K = 1 + E**2 + 2 * E * ch(b * J)
    P = (1 + E**2) * (B**2 + J**2) * ch(b * J) + 2 * (E * (B**2 + J**2) - B * (-1 + E**2) * J * sh(b * J))
    return B, T, J, b, E, K, P


def iso_F_BB(B: float, T: float, J: float = 1.0) -> float:
    B, T, J, b, E, K, _ = _iso_common(B, T, J)
    return 2 * E * (2 * E + (1 + E**2) * ch(b * J)) / (T**2 * K**2)


def iso_F_BT(B: float, T: float, J: float = 1.0) -> float:
    B, T, J, b, E, K, _ = _iso_common(B, T, J)
    return 2 * E * (2 * B * E + B * (1 + E**2) * ch(b * J) - (-1 + E**2) * J * sh(b * J)) / (T**3 * K**2)


def iso_F_TT(B: float, T: float, J: float = 1.0) -> float:
    B, T, J, b, E, K, P = _iso_common(B, T, J)
    return exp(-2 * b * B) * K / (4 * T**4 * (ch(b * B) + ch(b * J)) ** 3) * P


def iso_var_B_min(B: float, T: float, J: float = 1.0) -> float:
    B, T, J, b, E, K, P = _iso_common(B, T, J)
    return exp(-4 * b * B) * T**2 * K**3 / (16 * J**2 * (ch(b * B) + ch(b * J)) ** 3) * P


def iso_var_T_min(B: float, T: float, J: float = 1.0) -> float:
    B, T, J, b, E, _, _ = _iso_common(B, T, J)
    return exp(-b * B) * T**4 * (2 * E + (1 + E**2) * ch(b * J)) / (2 * J**2)


def iso_var_B_ind(B: float, T: float, J: float = 1.0) -> float:
    B, T, J, b, E, K, _ = _iso_common(B, T, J)
    return T**2 * exp(-b * B) * K**2 / (2 * (2 * E + (1 + E**2) * ch(b * J)))


def iso_var_T_ind(B: float, T: float, J: float = 1.0) -> float:
    B, T, J, b = _iso(B, T, J)
    den = (B**2 + J**2) * (1 + ch(b * B) * ch(b * J)) - 2 * B * J * sh(b * B) * sh(b * J)
    return T**4 * (ch(b * B) + ch(b * J)) ** 2 / den


def iso_gamma_ratio(B: float, T: float, J: float = 1.0) -> float:
    B, T, J, b, E, K, P = _iso_common(B, T, J)
    return (2 * E + (1 + E**2) * ch(b * J)) * P / (2 * J**2 * K**2)


CLOSED_FORMS: dict[str, Callable[..., float]] = {
    "aniso.var_gamma_min": aniso_var_gamma_min,
    "aniso.var_T_min": aniso_var_T_min,
    "aniso.var_gamma_ind": aniso_var_gamma_ind,
    "aniso.var_T_ind": aniso_var_T_ind,
    "aniso.gamma_ratio": aniso_gamma_ratio,
    "iso.F_BB": iso_F_BB,
    "iso.F_BT": iso_F_BT,
    "iso.F_TT": iso_F_TT,
    "iso.var_B_min": iso_var_B_min,
    "iso.var_T_min": iso_var_T_min,
    "iso.var_B_ind": iso_var_B_ind,
    "iso.var_T_ind": iso_var_T_ind,
    "iso.gamma_ratio": iso_gamma_ratio,
}


def closed_form_eval(name: str, params: AnisotropicXYParams | IsotropicFieldParams | dict) -> float:
    """Evaluate a named closed form at ``params``.

    ``params`` is a parameter record or a mapping with the same field names.
    """
    try:
        fn = CLOSED_FORMS[name]
    except KeyError:
        raise UnknownNameError(f"unknown closed form {name!r}") from None
    if isinstance(params, AnisotropicXYParams):
        kwargs = {"gamma": params.gamma, "T": params.T}
    elif isinstance(params, IsotropicFieldParams):
        kwargs = {"B": params.B, "T": params.T, "J": params.J}
    else:
        kwargs = dict(params)
    wants_iso = name.startswith("iso.")
    if wants_iso != ("B" in kwargs):
        raise DomainError(f"closed form {name!r} does not apply to parameters {sorted(kwargs)}")
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return float(fn(**kwargs))
