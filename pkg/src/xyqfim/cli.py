"""Command-line interface: ``xyqfim compute | scan | check``.

Exit codes: 0 success, 1 check failure, 2 domain or configuration error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from . import checks as checksuite
from . import estimation, linalg, models, serialize
from .errors import XYQFIMError

log = logging.getLogger("xyqfim")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

POINT_FLAGS = {"gamma": "gamma", "T": "T", "B": "B", "J": "J"}


class ConfigError(XYQFIMError, ValueError):
    pass


def parse_grid(text: str) -> tuple[float, ...]:
    """``start:stop:step`` -> inclusive axis values (rounded to 12 decimals)."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise ConfigError(f"grid spec {text!r} is not of the form start:stop:step") from None
    if not step > 0:
        raise ConfigError(f"grid step must be > 0 in {text!r}")
    if start > stop:
        raise ConfigError(f"grid start must be <= stop in {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + k * step, 12) for k in range(n))


@dataclass
class RunConfig:
    command: str
    model: str | None = None
    point: dict[str, float] = field(default_factory=dict)
    grid: dict[str, tuple[float, ...]] = field(default_factory=dict)
    output: str | None = None
    format: str = "csv"
    checks: tuple[str, ...] = ()
    seed: int = checksuite.DEFAULT_SEED
    samples: int = 200
    cutoff_rel: float = linalg.DEFAULT_CUTOFF_REL
    fd_step: float | None = None
    workers: int = 1

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        point = {name: getattr(ns, name) for name in POINT_FLAGS if getattr(ns, name, None) is not None}
        grid = {name: parse_grid(getattr(ns, f"grid_{name}")) for name in POINT_FLAGS if getattr(ns, f"grid_{name}", None)}
        cfg = cls(
            command=ns.command,
            model=ns.model,
            point=point,
            grid=grid,
            output=ns.output,
            format=ns.format or ("json" if ns.command == "compute" else "csv"),
            checks=tuple(c.strip() for c in (ns.checks or "").split(",") if c.strip()),
            seed=ns.seed,
            samples=ns.samples,
            cutoff_rel=ns.cutoff_rel,
            fd_step=ns.fd_step,
            workers=ns.workers,
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.cutoff_rel < 0:
            raise ConfigError("--cutoff-rel must be >= 0")
        if self.fd_step is not None and not self.fd_step > 0:
            raise ConfigError("--fd-step must be > 0")
        if self.command == "check":
            if not self.checks:
                raise ConfigError("--checks must name at least one of " + ",".join(checksuite.CHECKS))
            bad = set(self.checks) - set(checksuite.CHECKS)
            if bad:
                raise ConfigError(f"unknown checks {sorted(bad)}")
            return
        if self.model is None:
            raise ConfigError("--model is required")
        names = estimation.PARAMETER_COLUMNS[self.model]
        foreign = (set(self.point) | set(self.grid)) - set(names)
        if foreign:
            raise ConfigError(f"parameters {sorted(foreign)} do not apply to model {self.model}")
        both = set(self.point) & set(self.grid)
        if both:
            raise ConfigError(f"parameters {sorted(both)} given both as a point and as a grid")
        required = [n for n in names if n != "J"]
        if self.command == "compute":
            if self.grid:
                raise ConfigError("compute takes point parameters only; use scan for grids")
            missing = [n for n in required if n not in self.point]
        else:
            if not self.grid:
                raise ConfigError("scan needs at least one --grid-* axis")
            missing = [n for n in required if n not in self.point and n not in self.grid]
        if missing:
            raise ConfigError(f"missing parameters {missing} for model {self.model}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xyqfim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_point=True, with_grid=False):
        p.add_argument("--model", choices=models.MODELS)
        if with_point:
            for name in POINT_FLAGS:
                p.add_argument(f"--{name}", type=float, default=None)
        if with_grid:
            for name in POINT_FLAGS:
                p.add_argument(f"--grid-{name}", metavar="START:STOP:STEP", default=None)
        p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--cutoff-rel", type=float, default=linalg.DEFAULT_CUTOFF_REL)
        p.add_argument("--fd-step", type=float, default=None, help="use central differences with this relative step")
        p.add_argument("--checks", default=None)
        p.add_argument("--seed", type=int, default=checksuite.DEFAULT_SEED)
        p.add_argument("--samples", type=int, default=200, help="random families for the oracle check")
        p.add_argument("--workers", type=int, default=1)

    common(sub.add_parser("compute", help="QFIM, SLDs and bounds at one parameter point"))
    common(sub.add_parser("scan", help="grid scan emitting CSV/JSON"), with_grid=True)
    common(sub.add_parser("check", help="run verification suites"), with_grid=True)
    return parser


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _compute_record(res: estimation.PointResult) -> dict[str, object]:
    rec = res.row()
    rec["model"] = res.model
    if res.ok:
        rec["sld_eigenvalues"] = {
            name: np.linalg.eigvalsh(op).tolist() for name, op in zip(res.slds.parameter_names, res.slds.operators)
        }
        rec["commutator_norms"] = res.saturation.commutator_norms.tolist()
        w = res.saturation.weak_condition_values
        rec["weak_condition_values"] = {"real": w.real.tolist(), "imag": w.imag.tolist()}
        rec["closed_form"] = dict(res.closed_form)
        rec["outside_support_norms"] = list(res.qfim.outside_support_norms)
    return rec


def cmd_compute(cfg: RunConfig) -> int:
    res = estimation.compute_point(cfg.model, cfg.point, cutoff_rel=cfg.cutoff_rel, fd_step=cfg.fd_step)
    if not res.ok:
        log.error(res.error)
        return EXIT_CONFIG
    cols = estimation.columns(cfg.model)
    text = serialize.to_json(_compute_record(res)) if cfg.format == "json" else serialize.to_csv([res.row()], cols)
    _write(text, cfg.output)
    return EXIT_OK


def cmd_scan(cfg: RunConfig) -> int:
    grid: dict[str, object] = dict(cfg.grid)
    grid.update(cfg.point)
    results = estimation.scan(cfg.model, grid, cutoff_rel=cfg.cutoff_rel, fd_step=cfg.fd_step, workers=cfg.workers)
    rows = [r.row() for r in results]
    cols = estimation.columns(cfg.model)
    text = serialize.to_csv(rows, cols) if cfg.format == "csv" else serialize.to_json(rows, cols)
    _write(text, cfg.output)
    errors = [r for r in results if not r.ok]
    if errors:
        log.error("%d of %d grid points failed, first: %s", len(errors), len(results), errors[0].error)
        return EXIT_CONFIG
    return EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    model_list = (cfg.model,) if cfg.model else models.MODELS
    grids = None
    if cfg.grid and cfg.model:
        grid = dict(checksuite.REFERENCE_GRIDS[cfg.model])
        grid.update(cfg.grid)
        grid.update(cfg.point)
        grids = {cfg.model: grid}
    results = checksuite.run_checks(cfg.checks, model_list, cfg.samples, cfg.seed, cfg.cutoff_rel, grids)
    lines = []
    for r in results:
        lines.append(r.line())
        lines.extend(r.details)
    failed = [r.name for r in results if not r.passed]
    lines.append("all checks passed" if not failed else "failed checks: " + ", ".join(failed))
    _write("\n".join(lines) + "\n", cfg.output)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


COMMANDS = {"compute": cmd_compute, "scan": cmd_scan, "check": cmd_check}


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    """Rewrite ``--flag -1:1:0.1`` as ``--flag=-1:1:0.1`` so argparse accepts it."""
    value_flags = {f"--{n}" for n in POINT_FLAGS} | {f"--grid-{n}" for n in POINT_FLAGS}
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in value_flags:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = _glue_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = RunConfig.from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    except XYQFIMError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
