"""Command-line front end.

    sgflow [--config FILE] {profile,discharge,pressure,validate} [options]

The config file is flat ``key = value`` text using the long option names
(``grid-n`` or ``grid_n``); command-line flags override it.  Output goes to
``--out-dir``, else ``$SGFLOW_OUT_DIR``, else the current directory.

Exit codes: 0 ok, 2 bad configuration, 3 solver failure, 4 failed
cross-check, 5 constraint violation.
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .couette import (
    CouetteProblem,
    make_tc_profile,
    pressure_classical,
    pressure_closed_form,
    pressure_fd_bvp,
    tc_ode_residual,
)
from .errors import ConstraintViolation, SGFlowError, SolverError, ValidationError
from .material import (
    BarusViscosity,
    LengthScales,
    check_dissipativity,
    ellipticity_indicator,
    etas_from_lengths,
    lengths_from_etas,
)
from .poiseuille import (
    BoundaryCondition,
    make_profile,
    ode_residual,
    phi_quadrature,
    phi_strong,
    phi_weak,
)
from .profile import fmt, uniform_grid, write_csv, write_json, write_profile_csv

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_CHECK, EXIT_CONSTRAINT = 0, 2, 3, 4, 5

RESIDUAL_TOL = 1e-3
PHI_GAP_TOL = 1e-8
PRESSURE_BC_TOL = 1e-8
DUAL_GAP_TOL = 1e-6
LAMBDA_TOL = 1e-10

_NUMERIC_KEYS = (
    "lambda0", "lambda1", "lambda2", "lambda3", "lambda4",
    "mu", "eta1", "eta2", "eta3",
    "pressure", "shear_rate", "barus_mu0", "barus_alpha", "barus_p0",
)
_KEYS = _NUMERIC_KEYS + ("flow", "bc", "grid_n", "sweep", "out_dir", "jobs", "format", "scheme")


class ConfigError(Exception):
    pass


class CrossCheckFailure(Exception):
    pass


@dataclass
class RunConfig:
    flow: str
    bc: BoundaryCondition
    lengths: LengthScales
    grid_n: int | None
    fmt: str
    sweep: list = field(default_factory=list)
    out_dir: Path = Path(".")
    jobs: int = 1
    scheme: str = "numerov"
    ratios: tuple = (0.0, 0.0)

    def as_dict(self):
        return {
            "flow": self.flow,
            "bc": self.bc.value,
            "lambda0": self.lengths.ell0,
            "lambda1": self.lengths.ell1,
            "lambda2": self.lengths.ell2,
            "lambda3": self.lengths.ell3,
            "lambda4": self.lengths.ell4,
            "grid_n": self.grid_n,
            "format": self.fmt,
            "sweep": list(self.sweep),
            "scheme": self.scheme,
        }

    def lengths_for(self, lambda1):
        """Lengths for a sweep entry: lambda0 and the lambda2/lambda3 ratios are kept."""
        return LengthScales.from_ell1(lambda1, self.ratios, ell0=self.lengths.ell0)


# -- configuration -----------------------------------------------------------

def read_config_file(path):
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    try:
        text = Path(path).read_text()
        parser.read_string("[sgflow]\n" + text)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    out = {}
    for key, value in parser["sgflow"].items():
        norm = key.replace("-", "_")
        if norm not in _KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        out[norm] = value
    return out


def _float(name, value):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(f"{name} must be finite")
    return out


def _parse_sweep(value):
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        items = value
    else:
        items = [v for v in str(value).replace(";", ",").split(",") if v.strip()]
    sweep = [_float("sweep", v) for v in items]
    if any(v <= 0 for v in sweep):
        raise ConfigError("sweep values must be positive")
    if len(set(sweep)) != len(sweep):
        raise ConfigError("sweep values must be distinct")
    return sweep


def merged_settings(args):
    settings = read_config_file(args.config) if args.config else {}
    for key in _KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def resolve_lengths(settings):
    """Dimensionless lengths from whichever lambdas were given.

    Only lambda1: the spherical case (lambda4 = lambda1/sqrt 2).  Any of
    lambda2..4: lambda1 follows from them, and a given lambda1 must agree.
    """
    lam = {k: _float(k, settings[k]) for k in ("lambda0", "lambda1", "lambda2", "lambda3", "lambda4") if k in settings}
    for k, v in lam.items():
        if v < 0:
            raise ConfigError(f"{k} must be >= 0")
    ell0 = lam.get("lambda0", 0.0)
    parts = [k for k in ("lambda2", "lambda3", "lambda4") if k in lam]
    if not parts:
        return LengthScales.spherical(lam.get("lambda1", 0.0), ell0=ell0)
    lengths = LengthScales(ell0, lam.get("lambda2", 0.0), lam.get("lambda3", 0.0), lam.get("lambda4", 0.0))
    if "lambda1" in lam:
        want = lam["lambda1"] ** 2
        if abs(lengths.ell1**2 - want) > LAMBDA_TOL * max(want, 1e-300):
            raise ConfigError(
                "lambda1^2 must equal 3/4 lambda2^2 + 1/2 lambda3^2 + 2 lambda4^2 "
                f"(got {want!r} vs {lengths.ell1**2!r})"
            )
    return lengths


def build_run_config(args, command):
    s = merged_settings(args)
    flow = str(s.get("flow", "couette" if command == "pressure" else "poiseuille")).lower()
    if flow not in ("poiseuille", "couette"):
        raise ConfigError(f"flow must be poiseuille or couette, got {flow!r}")
    try:
        bc = BoundaryCondition.parse(s.get("bc", "strong"))
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None
    lengths = resolve_lengths(s)
    grid_n = s.get("grid_n")
    if grid_n is not None:
        try:
            grid_n = int(grid_n)
        except (TypeError, ValueError):
            raise ConfigError(f"grid-n must be an integer, got {grid_n!r}") from None
        if grid_n < 3:
            raise ConfigError("grid-n must be >= 3")
    fmt_ = str(s.get("format", "csv")).lower()
    if fmt_ not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    try:
        jobs = int(s.get("jobs", 1))
    except (TypeError, ValueError):
        raise ConfigError("jobs must be an integer") from None
    if jobs < 1:
        raise ConfigError("jobs must be >= 1")
    scheme = str(s.get("scheme", "numerov")).lower()
    if scheme not in ("numerov", "central"):
        raise ConfigError("scheme must be numerov or central")
    out_dir = Path(s.get("out_dir") or os.environ.get("SGFLOW_OUT_DIR") or ".")
    ratios = (0.0, 0.0)
    if lengths.ell1 > 0:
        ratios = (lengths.ell2 / lengths.ell1, lengths.ell3 / lengths.ell1)
    return RunConfig(flow, bc, lengths, grid_n, fmt_, _parse_sweep(s.get("sweep")), out_dir, jobs, scheme, ratios)


# -- helpers -------------------------------------------------------------------

def _tag(lambda1):
    return repr(float(lambda1))


def _parallel(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _plot_stub(path, data_name, xlabel, ylabel, title, using="1:2"):
    sep = "','" if data_name.endswith(".csv") else None
    lines = ["# gnuplot script; run from this directory"]
    if sep:
        lines.append(f"set datafile separator {sep}")
    lines += [
        "set key top right",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        f"plot '{data_name}' using {using} every ::1 with lines title '{title}'",
        "",
    ]
    Path(path).write_text("\n".join(lines))


def _write_series(cfg, stem, header, columns):
    """CSV or JSON depending on ``--format``; returns the file name."""
    if cfg.fmt == "csv":
        name = f"{stem}.csv"
        write_csv(cfg.out_dir / name, header, columns)
    else:
        name = f"{stem}.json"
        write_json(cfg.out_dir / name, {h: list(c) for h, c in zip(header, columns)})
    return name


# -- commands ----------------------------------------------------------------

def _velocity_entry(cfg, lengths, n):
    sigma = uniform_grid(n)
    lam1 = lengths.ell1
    if cfg.flow == "poiseuille":
        prof = make_profile(cfg.bc, lengths, sigma)
        wall = float(prof.u[-1])
        residual = ode_residual(prof, lam1).sup if n >= 201 else None
        classical = 1.0 - sigma**2
        wall_ok = wall == 0.0
    else:
        prof = make_tc_profile(cfg.bc, lam1, sigma)
        wall = float(prof.u[-1]) - 1.0
        residual = tc_ode_residual(prof, lam1).sup if n >= 201 else None
        classical = sigma
        wall_ok = wall == 0.0
    sup_error = float(np.max(np.abs(prof.u - classical)))
    checks = {"wall_residual": wall, "ode_residual": residual, "ode_residual_tol": RESIDUAL_TOL}
    if not wall_ok:
        raise CrossCheckFailure(f"wall condition violated by {wall!r}")
    if residual is not None and not residual <= RESIDUAL_TOL:
        raise CrossCheckFailure(
            f"ODE residual {residual:.3e} exceeds {RESIDUAL_TOL:g} (lambda1={lam1:g}, N={n}); refine the grid"
        )
    return prof, checks, sup_error


def cmd_profile(cfg: RunConfig):
    n = cfg.grid_n or 401
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    if not cfg.sweep:
        prof, checks, _ = _velocity_entry(cfg, cfg.lengths, n)
        name = _write_series(cfg, "profile", ["sigma", "u"], [prof.sigma, prof.u])
        write_json(cfg.out_dir / "meta.json", {"parameters": cfg.as_dict(), "checks": checks, "version": __version__})
        _plot_stub(cfg.out_dir / "profile.plt", name, "sigma", "u", f"{cfg.flow} {cfg.bc.value}")
        return EXIT_OK

    def run(lam1):
        prof, checks, sup_error = _velocity_entry(cfg, cfg.lengths_for(lam1), n)
        name = _write_series(cfg, f"profile_lambda1_{_tag(lam1)}", ["sigma", "u"], [prof.sigma, prof.u])
        phi = math.nan
        if cfg.flow == "poiseuille":
            lam = cfg.lengths_for(lam1)
            phi = phi_strong(lam1) if cfg.bc is BoundaryCondition.STRONG else phi_weak(lam.ell1, lam.ell2, lam.ell3, lam.ell4)
        return {"lambda1": lam1, "file": name, "sup_error": sup_error, "phi": phi, "checks": checks}

    results = _parallel(run, cfg.sweep, cfg.jobs)
    header = ["lambda1", "sup_error", "phi"] if cfg.flow == "poiseuille" else ["lambda1", "sup_error"]
    cols = [[r["lambda1"] for r in results], [r["sup_error"] for r in results]]
    if cfg.flow == "poiseuille":
        cols.append([r["phi"] for r in results])
    write_csv(cfg.out_dir / "sweep_summary.csv", header, cols)
    write_json(cfg.out_dir / "meta.json", {"parameters": cfg.as_dict(), "entries": results, "version": __version__})
    _plot_stub(cfg.out_dir / "sweep_summary.plt", "sweep_summary.csv", "lambda1", "sup |u - u0|", "classical-limit error")
    return EXIT_OK


def cmd_discharge(cfg: RunConfig):
    if cfg.flow != "poiseuille":
        raise ConfigError("discharge applies to poiseuille flow only")
    if not cfg.sweep:
        raise ConfigError("discharge needs a non-empty --sweep list of lambda1 values")
    cfg.out_dir.mkdir(parents=True, exist_ok=True)

    def run(lam1):
        lam = cfg.lengths_for(lam1)
        closed = phi_strong(lam1) if cfg.bc is BoundaryCondition.STRONG else phi_weak(lam.ell1, lam.ell2, lam.ell3, lam.ell4)
        quad = phi_quadrature(cfg.bc, lam).value
        return lam1, closed, quad, abs(closed - quad)

    rows = _parallel(run, cfg.sweep, cfg.jobs)
    write_csv(cfg.out_dir / "phi.csv", ["lambda1", "phi_closed", "phi_quadrature", "gap"], list(zip(*rows)))
    write_json(cfg.out_dir / "meta.json", {"parameters": cfg.as_dict(), "gap_tol": PHI_GAP_TOL, "version": __version__})
    _plot_stub(cfg.out_dir / "phi.plt", "phi.csv", "lambda1", "Phi", f"discharge, {cfg.bc.value}")
    worst = max(r[3] for r in rows)
    if not worst <= PHI_GAP_TOL:
        raise CrossCheckFailure(f"discharge gap {worst:.3e} exceeds {PHI_GAP_TOL:g}")
    return EXIT_OK


def _pressure_entry(cfg, lengths, n):
    if lengths.ell1 == 0.0:
        cl = pressure_classical(uniform_grid(n + 2))
        report = cl.report.to_dict()
        rows = [(cl.sigma, cl.pi_prime, cl.pi, cl.method.value)]
        return rows, report, float(np.max(np.abs(cl.pi - 0.5 * cl.sigma**2)))
    problem = CouetteProblem(1.0, 1.0, 1.0, 1.0, lengths, cfg.bc)
    fd = pressure_fd_bvp(problem, n=n, scheme=cfg.scheme, compare=True)
    cf = pressure_closed_form(problem, uniform_grid(n + 2))
    report = fd.report.to_dict()
    report["bc_residuals"] = {
        "closed_form_pi_prime_at_1": cf.report.bc_residuals["pi_prime_at_1"],
        "closed_form_pi_prime_at_0": cf.report.bc_residuals["pi_prime_at_0"],
        "fd_pi_prime_at_1": fd.report.bc_residuals["pi_prime_at_1"],
    }
    report["closed_form_ode_residual"] = cf.report.sup_residual
    rows = [(s.sigma, s.pi_prime, s.pi, s.method.value) for s in (cf, fd)]
    bc_worst = max(abs(cf.pi_prime[-1]), abs(fd.pi_prime[-1]))
    if not bc_worst <= PRESSURE_BC_TOL:
        raise CrossCheckFailure(f"|pi'(1)| = {bc_worst:.3e} exceeds {PRESSURE_BC_TOL:g}")
    if not report["dual_solver_gap"] <= DUAL_GAP_TOL:
        raise CrossCheckFailure(f"dual solver gap {report['dual_solver_gap']:.3e} exceeds {DUAL_GAP_TOL:g}")
    return rows, report, float(np.max(np.abs(cf.pi - 0.5 * cf.sigma**2)))


def _write_pressure(cfg, stem, rows):
    cols = [[], [], [], []]
    for sigma, pp, pi, method in rows:
        cols[0].extend(sigma)
        cols[1].extend(pp)
        cols[2].extend(pi)
        cols[3].extend([method] * len(sigma))
    return _write_series(cfg, stem, ["sigma", "pi_prime", "pi", "method"], cols)


def cmd_pressure(cfg: RunConfig):
    if cfg.flow != "couette":
        raise ConfigError("pressure applies to couette flow only")
    n = cfg.grid_n or 1600
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    if not cfg.sweep:
        rows, report, _ = _pressure_entry(cfg, cfg.lengths, n)
        name = _write_pressure(cfg, "pressure", rows)
        write_json(cfg.out_dir / "report.json", report)
        write_json(cfg.out_dir / "meta.json", {"parameters": cfg.as_dict(), "version": __version__})
        _plot_stub(cfg.out_dir / "pressure.plt", name, "sigma", "pi", "pressure", using="1:3")
        return EXIT_OK

    def run(lam1):
        rows, report, dist = _pressure_entry(cfg, cfg.lengths_for(lam1), n)
        name = _write_pressure(cfg, f"pressure_lambda1_{_tag(lam1)}", rows)
        write_json(cfg.out_dir / f"report_lambda1_{_tag(lam1)}.json", report)
        return lam1, dist, report.get("dual_solver_gap"), name

    results = _parallel(run, cfg.sweep, cfg.jobs)
    write_csv(
        cfg.out_dir / "sweep_summary.csv",
        ["lambda1", "sup_error", "dual_solver_gap"],
        [[r[0] for r in results], [r[1] for r in results], [r[2] if r[2] is not None else math.nan for r in results]],
    )
    write_json(cfg.out_dir / "meta.json", {"parameters": cfg.as_dict(), "files": [r[3] for r in results], "version": __version__})
    return EXIT_OK


def cmd_validate(args):
    """Dissipativity margins, lambda consistency, optional ellipticity block."""
    s = merged_settings(args)
    has_eta = any(k in s for k in ("eta1", "eta2", "eta3"))
    has_len = any(k in s for k in ("lambda2", "lambda3", "lambda4"))
    if has_eta and has_len:
        raise ConfigError("give either eta1..eta3 or lambda2..lambda4, not both")
    mu = _float("mu", s.get("mu", 1.0))
    if mu <= 0:
        raise ConfigError("mu must be positive")
    out = {"mu": mu}
    if has_eta:
        etas = tuple(_float(k, s.get(k, 0.0)) for k in ("eta1", "eta2", "eta3"))
        report = check_dissipativity(*etas)
        out["dissipativity"] = {"satisfied": report.satisfied, "margins": list(report.margins), "violated": list(report.violated)}
        if not report.satisfied:
            print(json.dumps(out, indent=2, sort_keys=True))
            raise ConstraintViolation(f"dissipativity violated: {', '.join(report.violated)}", report.violated[0])
        lengths = lengths_from_etas(mu, *etas, ell0=_float("lambda0", s.get("lambda0", 0.0)))
        if "lambda1" in s:
            want = _float("lambda1", s["lambda1"])
            out["lambda_consistent"] = abs(lengths.ell1**2 - want**2) <= LAMBDA_TOL * max(want**2, 1e-300)
    else:
        lengths = resolve_lengths(s)
        report = check_dissipativity(*etas_from_lengths(mu, lengths))
        out["dissipativity"] = {"satisfied": report.satisfied, "margins": list(report.margins), "violated": list(report.violated)}
        out["lambda_consistent"] = True
    out["lengths"] = {"ell0": lengths.ell0, "ell1": lengths.ell1, "ell2": lengths.ell2, "ell3": lengths.ell3, "ell4": lengths.ell4}
    if any(k in s for k in ("pressure", "shear_rate", "barus_mu0", "barus_alpha", "barus_p0")):
        law = BarusViscosity(
            _float("barus_mu0", s.get("barus_mu0", mu)),
            _float("barus_alpha", s.get("barus_alpha", 0.0)),
            _float("barus_p0", s.get("barus_p0", 0.0)),
        )
        gamma = _float("shear_rate", s.get("shear_rate", 0.0))
        D = np.zeros((3, 3))
        D[0, 1] = D[1, 0] = 0.5 * gamma
        ell = ellipticity_indicator(law, _float("pressure", s.get("pressure", law.p0)), D, lengths.ell1)
        out["ellipticity"] = {
            "classical_elliptic": ell.classical_elliptic,
            "second_gradient_elliptic": ell.second_gradient_elliptic,
            "min_eigenvalue": ell.min_eigenvalue,
        }
    print(json.dumps(out, indent=2, sort_keys=True))
    if out.get("lambda_consistent") is False:
        raise ConstraintViolation("lambda1 inconsistent with the viscosities", "lambda1 identity")
    return EXIT_OK


# -- entry point ---------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="sgflow", description="Second-gradient fluid: cylindrical flows and checks.")
    p.add_argument("--version", action="version", version=f"sgflow {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--flow", choices=["poiseuille", "couette"])
    common.add_argument("--bc", choices=["strong", "weak"])
    for i in range(5):
        common.add_argument(f"--lambda{i}", type=str, dest=f"lambda{i}", metavar="L")
    common.add_argument("--grid-n", dest="grid_n", type=str, metavar="N")
    common.add_argument("--sweep", help="comma-separated lambda1 values")
    common.add_argument("--out-dir", dest="out_dir")
    common.add_argument("--jobs", type=str)
    common.add_argument("--format", choices=["csv", "json"])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("profile", parents=[common], help="velocity profile(s)")
    sub.add_parser("discharge", parents=[common], help="discharge rate vs lambda1 with quadrature cross-check")
    pr = sub.add_parser("pressure", parents=[common], help="Couette pressure by two solvers")
    pr.add_argument("--scheme", choices=["numerov", "central"])
    va = sub.add_parser("validate", parents=[common], help="material constraints and ellipticity")
    for name in ("mu", "eta1", "eta2", "eta3", "pressure", "shear-rate", "barus-mu0", "barus-alpha", "barus-p0"):
        va.add_argument(f"--{name}", dest=name.replace("-", "_"), type=str)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "validate":
            return cmd_validate(args)
        cfg = build_run_config(args, args.command)
        return {"profile": cmd_profile, "discharge": cmd_discharge, "pressure": cmd_pressure}[args.command](cfg)
    except ConfigError as exc:
        print(f"sgflow: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConstraintViolation as exc:
        print(f"sgflow: constraint violated: {exc.inequality}: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except CrossCheckFailure as exc:
        print(f"sgflow: cross-check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except SolverError as exc:
        print(f"sgflow: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValidationError, SGFlowError) as exc:
        print(f"sgflow: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
