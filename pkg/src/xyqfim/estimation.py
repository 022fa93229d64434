"""
Cramér–Rao bounds from a two-parameter QFIM, and grid scans of the XY models.

For a 2x2 QFIM ``F`` the simultaneous bounds are the diagonal of ``F^-1``,
the individual bounds are ``1 / F_ii``, and

    Gamma = Delta_sim / Delta_ind,
    Delta_sim = (var_sim_1 + var_sim_2) / 2,
    Delta_ind = var_ind_1 + var_ind_2.

The factor 1/2 on the simultaneous total accounts for the simultaneous
scheme spending one set of resources on both parameters; without it Gamma
could never drop below 1.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import closed_forms, linalg, models, qfim
from .errors import DimensionMismatchError, UnknownNameError, XYQFIMError

DEGENERATE_RTOL = 1e-14


def _as_2x2(F: ArrayLike) -> NDArray[np.float64]:
    F = np.asarray(F, dtype=float)
    if F.shape != (2, 2):
        raise DimensionMismatchError(f"expected a 2x2 QFIM, got shape {F.shape}")
    return F


def crb_simultaneous(F: ArrayLike) -> tuple[tuple[float, float], float, float, bool]:
    """Diagonal of ``F^-1``, the off-diagonal term ``F_12 / det F``, ``det F``, and a degeneracy flag.

    ``F`` is treated as degenerate when ``det F <= 1e-14 * (F_11 F_22 + 1)``;
    the variances are then ``inf`` and the cross term ``nan``.
    """
    F = _as_2x2(F)
    det = float(F[0, 0] * F[1, 1] - F[0, 1] * F[1, 0])
    if det <= DEGENERATE_RTOL * (F[0, 0] * F[1, 1] + 1.0):
        return (math.inf, math.inf), math.nan, det, True
    return (F[1, 1] / det, F[0, 0] / det), F[0, 1] / det, det, False


def crb_individual(F: ArrayLike) -> tuple[tuple[float, float], bool]:
    F = _as_2x2(F)
    out = []
    degenerate = False
    for f in (F[0, 0], F[1, 1]):
        if f <= DEGENERATE_RTOL:
            out.append(math.inf)
            degenerate = True
        else:
            out.append(1.0 / f)
    return (out[0], out[1]), degenerate


def gamma_ratio(F: ArrayLike) -> float:
    """Ratio of the simultaneous to the individual total variance (``inf`` if degenerate)."""
    var_sim, _, _, _ = crb_simultaneous(F)
    var_ind, _ = crb_individual(F)
    return _gamma(var_sim, var_ind)


def _gamma(var_sim, var_ind) -> float:
    total_ind = var_ind[0] + var_ind[1]
    if not math.isfinite(total_ind):
        return math.nan
    return 0.5 * (var_sim[0] + var_sim[1]) / total_ind


@dataclass(frozen=True)
class CRBReport:
    var_sim: tuple[float, float]
    var_ind: tuple[float, float]
    cross_bound: float
    gamma_ratio: float
    det_F: float
    degenerate_flag: bool


def crb_report(F: ArrayLike) -> CRBReport:
    var_sim, cross, det, deg_sim = crb_simultaneous(F)
    var_ind, deg_ind = crb_individual(F)
    return CRBReport(
        var_sim=var_sim,
        var_ind=var_ind,
        cross_bound=cross,
        gamma_ratio=_gamma(var_sim, var_ind),
        det_F=det,
        degenerate_flag=deg_sim or deg_ind,
    )


# column -> closed form compared against it
CLOSED_FORM_COLUMNS = {
    models.ANISO: {
        "var_sim_1": "aniso.var_gamma_min",
        "var_sim_2": "aniso.var_T_min",
        "var_ind_1": "aniso.var_gamma_ind",
        "var_ind_2": "aniso.var_T_ind",
        "gamma_ratio": "aniso.gamma_ratio",
    },
    models.ISO_FIELD: {
        "F11": "iso.F_BB",
        "F12": "iso.F_BT",
        "F22": "iso.F_TT",
        "var_sim_1": "iso.var_B_min",
        "var_sim_2": "iso.var_T_min",
        "var_ind_1": "iso.var_B_ind",
        "var_ind_2": "iso.var_T_ind",
        "gamma_ratio": "iso.gamma_ratio",
    },
}

PARAMETER_COLUMNS = {models.ANISO: ("gamma", "T"), models.ISO_FIELD: ("B", "T", "J")}

VALUE_COLUMNS = (
    "F11",
    "F12",
    "F22",
    "var_sim_1",
    "var_sim_2",
    "var_ind_1",
    "var_ind_2",
    "cross_bound",
    "gamma_ratio",
    "det_F",
)
FLAG_COLUMNS = ("degenerate", "rank_deficient", "commute_flag", "weak_flag", "max_commutator", "max_weak_trace", "error")


def columns(model: str) -> tuple[str, ...]:
    """Fixed column order of scan output for ``model``."""
    if model not in PARAMETER_COLUMNS:
        raise UnknownNameError(f"unknown model {model!r}")
    deltas = tuple(f"delta_{c}" for c in CLOSED_FORM_COLUMNS[model])
    return PARAMETER_COLUMNS[model] + VALUE_COLUMNS + FLAG_COLUMNS + deltas


def relative_delta(numeric: float, reference: float) -> float:
    """``|numeric - reference| / max(1, |reference|)``; equal infinities give 0."""
    if numeric == reference:
        return 0.0
    if not (math.isfinite(numeric) and math.isfinite(reference)):
        return math.inf if not (math.isnan(numeric) or math.isnan(reference)) else math.nan
    return abs(numeric - reference) / max(1.0, abs(reference))


def make_params(model: str, point: Mapping[str, float]):
    if model == models.ANISO:
        return models.AnisotropicXYParams(point["gamma"], point["T"])
    if model == models.ISO_FIELD:
        return models.IsotropicFieldParams(point["B"], point["T"], point.get("J", 1.0))
    raise UnknownNameError(f"unknown model {model!r}")


@dataclass(frozen=True)
class PointResult:
    """Everything computed at one parameter point."""

    model: str
    point: dict[str, float]
    qfim: qfim.QFIMatrix | None = None
    slds: qfim.SLDSet | None = None
    rho: NDArray[np.complex128] | None = None
    report: CRBReport | None = None
    saturation: qfim.SaturationReport | None = None
    closed_form: dict[str, float] = field(default_factory=dict)
    deltas: dict[str, float] = field(default_factory=dict)
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error

    def row(self) -> dict[str, object]:
        """Flat record with the columns of :func:`columns`."""
        out: dict[str, object] = {c: math.nan for c in columns(self.model)}
        for name in PARAMETER_COLUMNS[self.model]:
            out[name] = float(self.point.get(name, 1.0 if name == "J" else math.nan))
        out.update(degenerate=False, rank_deficient=False, commute_flag=False, weak_flag=False, error=self.error)
        if not self.ok:
            return out
        F = self.qfim.entries
        r = self.report
        out.update(
            F11=F[0, 0],
            F12=F[0, 1],
            F22=F[1, 1],
            var_sim_1=r.var_sim[0],
            var_sim_2=r.var_sim[1],
            var_ind_1=r.var_ind[0],
            var_ind_2=r.var_ind[1],
            cross_bound=r.cross_bound,
            gamma_ratio=r.gamma_ratio,
            det_F=r.det_F,
            degenerate=r.degenerate_flag,
            rank_deficient=self.qfim.rank_deficient,
            commute_flag=self.saturation.commute_flag,
            weak_flag=self.saturation.weak_flag,
            max_commutator=self.saturation.max_commutator_norm,
            max_weak_trace=self.saturation.max_weak_value,
        )
        for col, d in self.deltas.items():
            out[f"delta_{col}"] = d
        return out


def compute_point(
    model: str,
    point: Mapping[str, float],
    cutoff_rel: float = linalg.DEFAULT_CUTOFF_REL,
    fd_step: float | None = None,
) -> PointResult:
    """QFIM (vectorized route), SLDs, bounds, saturation and closed-form deltas at one point.

    Domain violations are returned as a result with ``error`` set rather than raised.
    With ``fd_step`` the analytic derivatives are replaced by central differences.
    """
    point = {k: float(v) for k, v in point.items()}
    try:
        params = make_params(model, point)
        family = models.family_for(model, point.get("J", 1.0))
        if fd_step is not None:
            family = qfim.ParametricStateFamily(
                parameter_names=family.parameter_names,
                state_at=family.state_at,
                dimension=family.dimension,
                fd_step=fd_step,
            )
        theta = [getattr(params, name) for name in family.parameter_names]
        rho = family.state(theta)
        drhos = family.derivatives(theta)
        raw, slds, norms = qfim.vectorized_solve(rho, drhos, cutoff_rel)
        entries, residue = qfim._finalize_qfim(raw)
    except XYQFIMError as exc:
        return PointResult(model=model, point=point, error=f"{type(exc).__name__}: {exc}")

    rank_flag = qfim._rank_flag(norms, drhos)
    F = qfim.QFIMatrix(entries, family.parameter_names, "vectorized", tuple(norms), rank_flag, residue)
    sld_set = qfim.SLDSet(tuple(slds), family.parameter_names, "vectorized", tuple(norms), rank_flag)
    report = crb_report(entries)
    numeric = {
        "F11": entries[0, 0],
        "F12": entries[0, 1],
        "F22": entries[1, 1],
        "var_sim_1": report.var_sim[0],
        "var_sim_2": report.var_sim[1],
        "var_ind_1": report.var_ind[0],
        "var_ind_2": report.var_ind[1],
        "gamma_ratio": report.gamma_ratio,
    }
    cf_values, deltas = {}, {}
    for col, name in CLOSED_FORM_COLUMNS[model].items():
        cf_values[col] = closed_forms.closed_form_eval(name, params)
        deltas[col] = relative_delta(float(numeric[col]), cf_values[col])
    return PointResult(
        model=model,
        point=point,
        qfim=F,
        slds=sld_set,
        rho=rho,
        report=report,
        saturation=qfim.saturation_report(rho, sld_set),
        closed_form=cf_values,
        deltas=deltas,
    )


def grid_points(model: str, grid: Mapping[str, Sequence[float] | float]) -> list[dict[str, float]]:
    """Cartesian product of the axes in parameter-column order (first axis slowest).

    Scalars are accepted as single-point axes; ``J`` defaults to 1 for the field model.
    """
    names = PARAMETER_COLUMNS.get(model)
    if names is None:
        raise UnknownNameError(f"unknown model {model!r}")
    unknown = set(grid) - set(names)
    if unknown:
        raise UnknownNameError(f"parameters {sorted(unknown)} do not belong to model {model!r}")
    axes = []
    for name in names:
        if name not in grid:
            if name == "J":
                axes.append([1.0])
                continue
            raise DimensionMismatchError(f"missing grid axis {name!r}")
        axes.append([float(v) for v in np.atleast_1d(grid[name])])
    return [dict(zip(names, combo)) for combo in product(*axes)]


def scan(
    model: str,
    grid: Mapping[str, Sequence[float] | float],
    cutoff_rel: float = linalg.DEFAULT_CUTOFF_REL,
    fd_step: float | None = None,
    workers: int = 1,
) -> list[PointResult]:
    """Evaluate :func:`compute_point` over a grid.

    Results are ordered lexicographically by grid index whatever ``workers`` is.
    """
    points = grid_points(model, grid)

    def one(p):
        return compute_point(model, p, cutoff_rel=cutoff_rel, fd_step=fd_step)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, points))
    return [one(p) for p in points]


def find_optima(
    rows: Iterable[PointResult | Mapping[str, object]],
    column: str,
    tolerance: float = 0.0,
) -> list[dict[str, object]]:
    """All rows whose ``column`` is within ``tolerance`` of the column minimum.

    Ties are all returned. Rows carrying an error or a non-finite value are ignored.
    """
    records = [r.row() if isinstance(r, PointResult) else dict(r) for r in rows]
    if not records:
        raise ValueError("find_optima needs at least one row")
    if column not in records[0]:
        raise UnknownNameError(f"unknown column {column!r}")
    usable = [r for r in records if not r.get("error") and math.isfinite(float(r[column]))]
    if not usable:
        raise ValueError(f"no finite values in column {column!r}")
    best = min(float(r[column]) for r in usable)
    return [r for r in usable if float(r[column]) <= best + tolerance]
