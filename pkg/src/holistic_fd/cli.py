"""holistic-fd command line.

Errors go to stderr as one JSON object per line, for example
``{"error": "malformed_spec", "exit": 3, "message": "..."}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from holistic_fd.algebra import parse_rational
from holistic_fd.coefficients import (
    NonCanonicalModelError,
    coefficient_csv,
    extract_coefficients,
)
from holistic_fd.construct import ConstructionError, UnsupportedPdeError, construct_iterative
from holistic_fd.equivalent import consistency_order, equivalent_pde
from holistic_fd.model import ModelSeries
from holistic_fd.pde import PdeParseError, PdeSpec, parse_pde
from holistic_fd.simulate import (
    NAMED_MODELS,
    SimulationError,
    StepSizeError,
    moments_csv,
    point_release_moments,
    stability_scan,
    STABLE_TOL,
    trajectory_csv,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SPEC = 3
EXIT_UNSUPPORTED = 4
EXIT_IO = 5
EXIT_NUMERIC = 6

_DEFAULT_GAMMA = {"nu1": 2, "nu2": 3, "kappa2": 3}


class CliError(Exception):
    def __init__(self, kind: str, code: int, message: str):
        super().__init__(message)
        self.kind = kind
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D401 - argparse hook
        raise CliError("usage", EXIT_USAGE, message)


def parse_values(text: str) -> list[float]:
    """``a:b:step`` (inclusive, exact rational stepping) or a comma list."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            a, b, step = (parse_rational(p) for p in parts)
            if step <= 0 or b < a:
                raise ValueError
            n = int((b - a) / step)
            return [float(a + i * step) for i in range(n + 1)]
        return [float(parse_rational(p)) for p in text.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError):
        raise CliError("malformed_spec", EXIT_SPEC, f"bad value list {text!r}") from None


def _number(text: str) -> float:
    try:
        return float(parse_rational(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


@dataclass
class RunConfig:
    subcommand: str
    pde: PdeSpec | None = None
    pde_text: str | None = None
    gamma_order: int | None = None
    eps_order: int | None = None
    model_name: str | None = None
    model_file: Path | None = None
    which: str | None = None
    eps: float | None = None
    h: float = 1.0
    T: float | None = None
    dt: float | None = None
    samples: int = 10
    theta_samples: int = 256
    z_values: list[float] = field(default_factory=list)
    shanks: int = 0
    max_h: int = 4
    strict: bool = False
    out: Path | None = None
    report: Path | None = None
    trajectory: Path | None = None
    moments: Path | None = None
    fmt: str = "json"

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        cfg = cls(ns.command)
        for name in ("gamma_order", "eps_order", "which", "eps", "T", "dt", "strict",
                     "max_h", "fmt", "shanks"):
            if hasattr(ns, name) and getattr(ns, name) is not None:
                setattr(cfg, name, getattr(ns, name))
        if getattr(ns, "h", None) is not None:
            cfg.h = ns.h
        if getattr(ns, "samples", None) is not None:
            cfg.samples = ns.samples
        if getattr(ns, "theta_samples", None) is not None:
            cfg.theta_samples = ns.theta_samples
        for name in ("out", "report", "trajectory", "moments", "model_file"):
            val = getattr(ns, name, None)
            setattr(cfg, name, Path(val) if val else None)
        cfg.model_name = getattr(ns, "model", None)
        if getattr(ns, "pde", None):
            cfg.pde_text = ns.pde
            try:
                cfg.pde = parse_pde(ns.pde)
            except PdeParseError as exc:
                raise CliError("malformed_spec", EXIT_SPEC, str(exc)) from None
        if getattr(ns, "z", None):
            cfg.z_values = parse_values(ns.z)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        def need(cond: bool, msg: str) -> None:
            if not cond:
                raise CliError("usage", EXIT_USAGE, msg)

        sources = sum(x is not None for x in (self.model_name, self.model_file)) + (
            self.gamma_order is not None and self.pde is not None
        )
        if self.subcommand == "derive":
            need(self.pde is not None, "derive needs --pde")
            need(self.gamma_order is not None and self.gamma_order >= 1, "derive needs --gamma >= 1")
        elif self.subcommand == "equivalent":
            need(sources == 1, "equivalent needs exactly one of --model, --model-file, --pde with --gamma")
            need(self.max_h >= 0, "--max-h must be non-negative")
        elif self.subcommand == "coefficients":
            need(self.which is not None, "coefficients needs --which")
            need(bool(self.z_values), "coefficients needs --z")
            need(self.shanks >= 0, "--shanks must be non-negative")
        elif self.subcommand == "simulate":
            need(sources == 1, "simulate needs exactly one model source")
            need(self.eps is not None, "simulate needs --eps")
            need(self.T is not None and self.T > 0, "simulate needs --T > 0")
            need(self.h > 0, "--h must be positive")
            need(self.dt is None or self.dt > 0, "--dt must be positive")
            need(self.trajectory is not None or self.moments is not None,
                 "simulate needs --trajectory and/or --moments")
        elif self.subcommand == "stability":
            need(sources == 1, "stability needs exactly one model source")
            need(bool(self.z_values), "stability needs --z")
            need(self.theta_samples >= 64, "--theta-samples must be at least 64")
            need(self.h > 0, "--h must be positive")


# {{{ commands


def _derive(cfg: RunConfig) -> ModelSeries:
    assert cfg.pde is not None and cfg.gamma_order is not None
    eps_order = cfg.eps_order if cfg.eps_order is not None else 1
    try:
        _, model = construct_iterative(cfg.pde, cfg.gamma_order, eps_order)
    except UnsupportedPdeError as exc:
        raise CliError("unsupported_pde", EXIT_UNSUPPORTED, str(exc)) from None
    except ConstructionError as exc:
        raise CliError("construction_failed", EXIT_NUMERIC, str(exc)) from None
    return model


def _load_model(cfg: RunConfig) -> ModelSeries:
    if cfg.model_name is not None:
        return NAMED_MODELS[cfg.model_name]()
    if cfg.model_file is not None:
        try:
            text = cfg.model_file.read_text()
        except OSError as exc:
            raise CliError("io_error", EXIT_IO, f"{cfg.model_file}: {exc.strerror}") from None
        try:
            return ModelSeries.from_json(text)
        except (ValueError, KeyError, TypeError) as exc:
            raise CliError("malformed_spec", EXIT_SPEC, f"bad model file: {exc}") from None
    return _derive(cfg)


def _emit(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        path.write_text(text)
    except OSError as exc:
        raise CliError("io_error", EXIT_IO, f"{path}: {exc.strerror}") from None


def cmd_derive(cfg: RunConfig) -> None:
    model = _derive(cfg)
    report = model.report()
    if cfg.out is not None:
        _emit(cfg.out, model.to_json())
        _emit(cfg.report, report)
    elif cfg.report is not None:
        _emit(cfg.report, report)
        _emit(None, model.to_json() if cfg.fmt == "json" else report)
    else:
        _emit(None, model.to_json() if cfg.fmt == "json" else report)


def cmd_equivalent(cfg: RunConfig) -> None:
    model = _load_model(cfg)
    series = equivalent_pde(model, cfg.max_h)
    _emit(cfg.out, series.to_text() if cfg.fmt == "text" else series.to_csv())
    if cfg.pde is not None and cfg.pde.is_derivative_form:
        order = consistency_order(model, cfg.pde, max_h_order=cfg.max_h)
        sys.stderr.write(f"consistency_order={order}\n")


def cmd_coefficients(cfg: RunConfig) -> None:
    assert cfg.which is not None
    gamma = cfg.gamma_order if cfg.gamma_order is not None else _DEFAULT_GAMMA[cfg.which]
    # enough eps orders for 2*shanks+1 partial sums of every coefficient
    eps_order = cfg.eps_order if cfg.eps_order is not None else max(10, 4 * cfg.shanks + 2)
    pde = cfg.pde if cfg.pde is not None else parse_pde("ut = -eps*ux + uxx")
    model = _derive(RunConfig("derive", pde=pde, gamma_order=gamma, eps_order=eps_order))
    try:
        found = {c.name: c for c in extract_coefficients(model, source=f"gamma{gamma}_eps{eps_order}")}
    except NonCanonicalModelError as exc:
        raise CliError("unsupported_pde", EXIT_UNSUPPORTED, str(exc)) from None
    if cfg.which not in found:
        raise CliError("unsupported_pde", EXIT_UNSUPPORTED,
                       f"{cfg.which} is absent from the gamma-order {gamma} model")
    try:
        text = coefficient_csv(found[cfg.which], cfg.z_values, cfg.shanks)
    except ValueError as exc:
        raise CliError("usage", EXIT_USAGE, str(exc)) from None
    _emit(cfg.out, text)


def cmd_simulate(cfg: RunConfig) -> None:
    model = _load_model(cfg)
    assert cfg.eps is not None and cfg.T is not None
    try:
        rep = point_release_moments(
            model, cfg.eps, cfg.h, cfg.T, cfg.dt, samples=cfg.samples, strict=cfg.strict
        )
    except (SimulationError, StepSizeError) as exc:
        raise CliError("numerical_failure", EXIT_NUMERIC, str(exc)) from None
    if rep.contaminated:
        sys.stderr.write(f"warning: boundary wrap mass {rep.wrap_mass:.3e}\n")
    if cfg.trajectory is not None:
        _emit(cfg.trajectory, trajectory_csv(rep.states, origin=rep.grid_points // 2))
    if cfg.moments is not None:
        _emit(cfg.moments, moments_csv(rep))


def cmd_stability(cfg: RunConfig) -> None:
    model = _load_model(cfg)
    rows = stability_scan(model, cfg.z_values, h=cfg.h, samples=cfg.theta_samples)
    lines = ["eps_h,max_growth,stable"]
    lines += [f"{z:.12e},{g:.12e},{int(g <= STABLE_TOL)}" for z, g in rows]
    _emit(cfg.out, "\n".join(lines) + "\n")


COMMANDS = {
    "derive": cmd_derive,
    "equivalent": cmd_equivalent,
    "coefficients": cmd_coefficients,
    "simulate": cmd_simulate,
    "stability": cmd_stability,
}

# }}}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="holistic-fd", description="Holistic finite difference models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model_flags(sp, named: bool = True):
        sp.add_argument("--pde", help='e.g. "ut = -eps*ux + uxx"')
        sp.add_argument("--gamma", dest="gamma_order", type=int, help="gamma truncation order l")
        sp.add_argument("--eps-order", type=int, help="eps truncation order E")
        if named:
            sp.add_argument("--model", choices=sorted(NAMED_MODELS))
            sp.add_argument("--model-file", help="ModelSeries JSON written by derive")

    d = sub.add_parser("derive", help="construct a model")
    model_flags(d, named=False)
    d.add_argument("--out", help="ModelSeries JSON path")
    d.add_argument("--report", help="text report path")
    d.add_argument("--format", dest="fmt", choices=["json", "text"], default="json")

    e = sub.add_parser("equivalent", help="equivalent PDE of a model")
    model_flags(e)
    e.add_argument("--max-h", type=int, default=4)
    e.add_argument("--out")
    e.add_argument("--format", dest="fmt", choices=["csv", "text"], default="csv")

    c = sub.add_parser("coefficients", help="nu1, nu2, kappa2 against z = eps*h")
    model_flags(c, named=False)
    c.add_argument("--which", choices=["nu1", "nu2", "kappa2"], required=True)
    c.add_argument("--z", required=True, help="a:b:step or comma list")
    c.add_argument("--shanks", type=int, default=0, help="Shanks iterations")
    c.add_argument("--out")

    s = sub.add_parser("simulate", help="point-release simulation")
    model_flags(s)
    s.add_argument("--eps", type=_number, required=True)
    s.add_argument("--h", type=_number, default=1.0)
    s.add_argument("--T", type=_number, required=True)
    s.add_argument("--dt", type=_number, help="time step (default: auto)")
    s.add_argument("--samples", type=int, default=10)
    s.add_argument("--strict", action="store_true", help="reject dt above the RK4 limit")
    s.add_argument("--trajectory", help="trajectory CSV path")
    s.add_argument("--moments", help="moment CSV path")

    st = sub.add_parser("stability", help="max growth rate against eps*h")
    model_flags(st)
    st.add_argument("--z", required=True, help="eps*h values, a:b:step or comma list")
    st.add_argument("--h", type=_number, default=1.0)
    st.add_argument("--theta-samples", type=int, default=256)
    st.add_argument("--out")
    return p


def run(argv: Sequence[str] | None = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = RunConfig.from_args(ns)
        COMMANDS[cfg.subcommand](cfg)
    except CliError as exc:
        msg = " ".join(str(exc).split())
        sys.stderr.write(json.dumps({"error": exc.kind, "exit": exc.code, "message": msg}) + "\n")
        return exc.code
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
