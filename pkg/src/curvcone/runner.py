"""Dispatch an :class:`ExperimentConfig` to the pipelines and persist results."""

from __future__ import annotations

import csv
import json
import logging
import time
from pathlib import Path

import numpy as np

from . import ansatz
from .catalog import SPACE_FORM_CURVATURE, random_smooth_field
from .config import ExperimentConfig
from .conformal import (
    bakry_emery_crosscheck,
    conformal_jet,
    minus_schouten_conformal,
    modified_schouten_conformal,
    relative_frobenius,
)
from .errors import ConfigError, CurvconeError
from .geometry import FiniteDifferenceProvider, conformal_metric, local_geometry
from .lintensor import curvature_symmetry_residual, generalized_eigenvalues

log = logging.getLogger(__name__)

CSV_FILES = {
    "margin": ("margin_profile.csv", "N = ansatz exponent, worst_margin = min cone margin over the grid", ("N", "worst_margin")),
    "eigen": ("eigenvalues.csv", "point_index = grid point, min_eigenvalue = smallest eigenvalue of the checked tensor", ("point_index", "min_eigenvalue")),
    "sectional": ("sectional.csv", "plane_index = sample index (point-major), K = sectional curvature of g_u", ("plane_index", "K")),
}


def _rel(err, ref) -> float:
    return float(np.sqrt((np.asarray(err) ** 2).sum()) / max(np.sqrt((np.asarray(ref) ** 2).sum()), 1.0))


def _run_curvature(cfg: ExperimentConfig, report: ansatz.VerificationReport):
    chart = cfg.chart()
    provider = cfg.provider_obj()
    grid = chart.grid(cfg.grid_resolution)
    geo = local_geometry(chart, grid, provider)
    n = chart.dim
    report.weyl_residual = float(geo.weyl_residual().max())
    report.point_min_eigenvalues = generalized_eigenvalues(geo.schouten, geo.g)[:, 0].tolist()
    report.details.update(
        scalar_min=float(geo.scalar.min()),
        scalar_max=float(geo.scalar.max()),
        points=len(grid),
    )
    sym = curvature_symmetry_residual(geo.riemann)
    report.details["symmetry_residual"] = sym
    report.checks["riemann_symmetries"] = sym <= 1e-9 if provider.kind == "taylor" else sym <= 1e-6
    if chart.name in SPACE_FORM_CURVATURE:
        c = SPACE_FORM_CURVATURE[chart.name]
        g = geo.g
        expected = {
            "scalar": (geo.scalar, np.full(len(grid), n * (n - 1) * c)),
            "ricci": (geo.ricci, (n - 1) * c * g),
            "schouten": (geo.schouten, 0.5 * c * g),
            "einstein": (geo.einstein, -(n - 1) * (n - 2) * c / 2 * g),
        }
        tol = 1e-6 if provider.kind == "taylor" else 1e-4
        for name, (got, want) in expected.items():
            err = _rel(got - want, want)
            report.details[f"space_form_{name}_error"] = err
            report.checks[f"space_form_{name}"] = err <= tol
    sub = grid[: min(50, len(grid))]
    fd = local_geometry(chart, sub, FiniteDifferenceProvider(4, 1e-3))
    ty = local_geometry(chart, sub)
    err = _rel(fd.riemann - ty.riemann, ty.riemann)
    report.details["provider_riemann_error"] = err
    report.checks["provider_agreement"] = err <= 1e-4


def _u_field_from(spec, n):
    if spec in (None, "zero"):
        return ansatz.zero_tensor
    if spec == "minus_schouten":
        return ansatz.minus_schouten_tensor
    if isinstance(spec, dict) and "modified_schouten" in spec:
        p = spec["modified_schouten"]
        return ansatz.modified_schouten_tensor(float(p.get("tau", n - 1)), float(p.get("zeta", 1.0)))
    raise ConfigError(f"unknown U specification {spec!r}")


def _r_term_from(spec):
    if spec in (None, "zero"):
        return ansatz.ZERO_TERM
    if spec == "minus_schouten":
        return ansatz.LowerOrderTerm("minus_schouten", "linear")
    raise ConfigError(f"unknown R specification {spec!r}")


def _run_cone(cfg: ExperimentConfig, report: ansatz.VerificationReport):
    chart = cfg.chart()
    provider = cfg.provider_obj()
    spec = cfg.ansatz
    config = ansatz.AnsatzConfig(
        spec["form"], float(spec["alpha"]), float(spec["beta"]), cfg.cone_spec(), cfg.v_field(chart),
        rho=float(spec.get("rho", 0.0)), r_term=_r_term_from(spec.get("R")),
        u_field=_u_field_from(spec.get("U"), chart.dim), normalize_v=cfg.normalize_band,
    )
    report.config = config.describe()
    grid = chart.grid(cfg.grid_resolution)
    ansatz.search_stage(report, config, chart, grid, cfg.N_max, cfg.margin_req, provider)


def _run_formula_check(cfg: ExperimentConfig, report: ansatz.VerificationReport):
    chart = cfg.chart()
    provider = cfg.provider_obj()
    n = chart.dim
    rng = np.random.default_rng(cfg.seed)
    fc = cfg.formula_check
    tol = 1e-6 if provider.kind == "taylor" else 1e-4
    worst_s, worst_m, worst_be, worst_bm = 0.0, 0.0, 0.0, 0.0
    for _ in range(int(fc["fields"])):
        u = random_smooth_field(n, rng, center=chart.center)
        pts = chart.sample_points(int(fc["points"]), rng)
        geo = local_geometry(chart, pts, provider)
        jet_u = conformal_jet(chart, u, pts, provider, geo=geo)
        direct = local_geometry(conformal_metric(chart, u), pts, provider)
        worst_s = max(worst_s, float(relative_frobenius(
            minus_schouten_conformal(geo.schouten, jet_u, geo.g), -direct.schouten).max()))
        worst_m = max(worst_m, float(relative_frobenius(
            modified_schouten_conformal(geo.modified_schouten(n - 1, 1.0), jet_u, geo.g, n - 1, 1.0),
            direct.modified_schouten(n - 1, 1.0)).max()))
        phi = random_smooth_field(n, rng, scale=0.5, center=chart.center)
        be = bakry_emery_crosscheck(chart, u, phi, float(fc["n_dim"]), pts[:10], provider)
        worst_be = max(worst_be, be["fixed_potential"])
        worst_bm = max(worst_bm, be["fixed_measure"])
    report.details.update(
        schouten_formula_error=worst_s,
        modified_schouten_formula_error=worst_m,
        bakry_emery_fixed_potential_error=worst_be,
        bakry_emery_fixed_measure_error=worst_bm,
        tolerance=tol,
    )
    report.checks["schouten_formula"] = worst_s <= tol
    report.checks["modified_schouten_formula"] = worst_m <= tol
    report.checks["bakry_emery_fixed_potential"] = worst_be <= tol


def run(cfg: ExperimentConfig, out_dir=None) -> ansatz.VerificationReport:
    """Run one experiment; write ``report.json`` and CSV tables when ``out_dir`` is given."""
    start = time.perf_counter()
    chart = cfg.chart()
    provider = cfg.provider_obj()
    grid = None
    try:
        if cfg.task == "thm13":
            grid = chart.grid(cfg.grid_resolution)
            report = ansatz.construct_negative_sectional(
                chart, cfg.v_field(chart), grid, cfg.N_max, cfg.margin_req, provider, cfg.seed,
                int(cfg.sectional["points"]), int(cfg.sectional["planes"]), cfg.normalize_band,
            )
        elif cfg.task == "thm12":
            grid = chart.grid(cfg.grid_resolution)
            report = ansatz.construct_positive_einstein(
                chart, cfg.v_field(chart), grid, cfg.N_max, cfg.margin_req, provider, cfg.seed,
                cfg.normalize_band,
            )
        else:
            report = ansatz.VerificationReport(cfg.task, chart.name, chart.dim, seed=cfg.seed)
            {"curvature": _run_curvature, "cone": _run_cone, "formula_check": _run_formula_check}[cfg.task](
                cfg, report
            )
    except ConfigError:
        raise
    except CurvconeError as exc:
        log.error("%s failed: %s", cfg.task, exc)
        report = ansatz.VerificationReport(cfg.task, chart.name, chart.dim, seed=cfg.seed)
        report.checks["pipeline"] = False
        report.details["error"] = f"{type(exc).__name__}: {exc}"
    report.seed = cfg.seed
    report.config = {"experiment": cfg.to_dict(), **({"ansatz": report.config} if report.config else {})}
    report.wall_clock = time.perf_counter() - start
    if out_dir is not None:
        write_report(report, out_dir)
        emit_plotdata(report, out_dir)
    return report


def write_report(report: ansatz.VerificationReport, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "report.json"
    try:
        path.write_text(json.dumps(report.to_dict(), indent=2, default=_json_default) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write report {path}: {exc}") from exc
    return path


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _write_csv(path: Path, comment: str, header, rows) -> None:
    try:
        with path.open("w", newline="") as fh:
            fh.write(f"# columns: {comment}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def emit_plotdata(report, out_dir) -> list[Path]:
    """Write the margin curve, per-point eigenvalue table and sectional samples as CSV."""
    data = report.to_dict() if hasattr(report, "to_dict") else report
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tables = {
        "margin": [(float(N), float(m)) for N, m in data.get("margin_profile", [])],
        "eigen": list(enumerate(float(x) for x in data.get("point_min_eigenvalues", []))),
        "sectional": list(enumerate(float(k) for k in data.get("sectional_samples", []))),
    }
    paths = []
    for key, (fname, comment, header) in CSV_FILES.items():
        path = out / fname
        _write_csv(path, comment, header, tables[key])
        paths.append(path)
    return paths


def load_report(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read report {path}: {exc}") from exc
