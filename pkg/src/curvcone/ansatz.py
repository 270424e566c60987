"""Exponential ansatz ``u = e^{Nv}`` and the two constructive pipelines.

The operators

    V[u] = ∇²u + α|∇u|² g − β du⊗du + R(x, ∇u) + U(x)
    W[u] = Δu g − ϱ∇²u + α|∇u|² g − β du⊗du + R(x, ∇u) + U(x)

are evaluated on a grid for ``u = e^{Nv}``, and ``N`` is searched until the
eigenvalues ``λ(g⁻¹T[u])`` sit inside the target cone with a prescribed
normalized margin at every grid point.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jet
from .cones import ConeSpec
from .conformal import ConformalJet
from .errors import ExponentOverflow, InternalInconsistency, InvalidInput, NotLocallyConformallyFlat
from .geometry import ChartMetric, LocalGeometry, conformal_metric, local_geometry, scalar_derivatives
from .lintensor import generalized_eigenvalues

log = logging.getLogger(__name__)

EXPONENT_LIMIT = 300.0
CASE_TOL = 1e-9
WEYL_TOL = 1e-6

TensorField = Callable[[np.ndarray, LocalGeometry], np.ndarray]


def thread_count() -> int:
    env = os.environ.get("CURVCONE_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


# --------------------------------------------------------------------------
# lower-order terms and background tensors


def zero_tensor(points, geo: LocalGeometry) -> np.ndarray:
    return np.zeros_like(geo.g)


def minus_schouten_tensor(points, geo: LocalGeometry) -> np.ndarray:
    return -geo.schouten


def modified_schouten_tensor(tau: float, zeta: float) -> TensorField:
    def field(points, geo):
        return geo.modified_schouten(tau, zeta)

    field.__name__ = f"modified_schouten(tau={tau}, zeta={zeta})"
    return field


def _g_norm(form, ginv) -> np.ndarray:
    # |T|_g = sqrt(tr(g⁻¹ T g⁻¹ T))
    m = ginv @ form
    return np.sqrt(np.abs(np.einsum("...ij,...ji->...", m, m)))


@dataclass(frozen=True)
class LowerOrderTerm:
    """``R(x, p)`` with a declared growth class.

    ``growth`` is ``"linear"`` (``|R| ≤ C(1+|p|)``) or ``"subquadratic"``
    (``|R| ≤ γ(x,p)(1+|p|²)`` with ``γ → 0``). Linear growth implies the
    subquadratic bound, so a linear term qualifies for either hypothesis.
    """

    kind: str = "zero"
    growth: str = "linear"
    func: Callable | None = None
    C: float = 0.0
    gamma: Callable | None = None

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "minus_schouten", "custom"):
            raise InvalidInput(f"unknown lower-order term kind {self.kind!r}")
        if self.growth not in ("linear", "subquadratic"):
            raise InvalidInput(f"unknown growth class {self.growth!r}")

    def evaluate(self, points, p, geo: LocalGeometry) -> np.ndarray:
        if self.kind == "zero":
            return np.zeros_like(geo.g)
        if self.kind == "minus_schouten":
            return -geo.schouten
        if self.kind == "constant":
            return np.asarray(self.func(points, geo), dtype=float)
        return np.asarray(self.func(points, p, geo), dtype=float)

    def satisfies(self, growth: str) -> bool:
        return growth == "subquadratic" or self.growth == "linear"

    def check_growth(self, points, geo: LocalGeometry, rng=None, p_max: float = 1e6, samples: int = 13) -> bool:
        """Finite-sample check of the declared growth bound; not a proof."""
        rng = rng if rng is not None else np.random.default_rng(0)
        npts, n = geo.g.shape[:2]
        ginv = geo.ginv
        gammas = []
        for mag in np.logspace(0, np.log10(p_max), samples):
            d = rng.normal(size=(npts, n))
            d *= (mag / np.sqrt(geo.norm2(d)))[:, None]
            size = _g_norm(self.evaluate(points, d, geo), ginv)
            if self.growth == "linear":
                if np.any(size > self.C * (1 + mag) * (1 + 1e-12) + 1e-12):
                    return False
            else:
                gam = np.asarray(self.gamma(points, d), dtype=float)
                if np.any(size > gam * (1 + mag**2) * (1 + 1e-12) + 1e-12):
                    return False
                gammas.append(float(np.max(gam)))
        return self.growth == "linear" or gammas[-1] < gammas[0]


ZERO_TERM = LowerOrderTerm()


@dataclass(frozen=True)
class AnsatzConfig:
    """Parameters of ``V[u]`` (``form="V"``) or ``W[u]`` (``form="W"``)."""

    form: str
    alpha: float
    beta: float
    cone: ConeSpec
    v: Callable
    rho: float = 0.0
    r_term: LowerOrderTerm = ZERO_TERM
    u_field: TensorField = zero_tensor
    normalize_v: float | None = 0.5

    def __post_init__(self):
        if self.form not in ("V", "W"):
            raise InvalidInput(f"form must be 'V' or 'W', got {self.form!r}")

    @property
    def test_vector(self) -> np.ndarray:
        t = np.full(self.cone.dim, float(self.alpha))
        t[-1] = self.alpha - self.beta
        return t

    def describe(self) -> dict:
        return {
            "form": self.form,
            "alpha": self.alpha,
            "beta": self.beta,
            "rho": self.rho if self.form == "W" else None,
            "cone": self.cone.to_dict(),
            "r_term": {"kind": self.r_term.kind, "growth": self.r_term.growth},
            "U": getattr(self.u_field, "__name__", repr(self.u_field)),
            "normalize_v": self.normalize_v,
        }


@dataclass(frozen=True)
class CaseTag:
    tag: str
    reason: str = ""

    def __str__(self) -> str:
        return self.tag


def classify_case(config: AnsatzConfig) -> CaseTag:
    """Which hypothesis of the existence theorems the configuration meets."""
    cone = config.cone
    t = config.test_vector
    m = float(cone.margin(t))
    interior = m > CASE_TOL
    boundary = abs(m) <= CASE_TOL
    r = config.r_term
    if config.form == "V":
        if interior and r.satisfies("subquadratic"):
            return CaseTag("Case_i", f"test vector interior (margin {m:.3g})")
        if config.alpha > 0 and boundary and r.satisfies("linear"):
            return CaseTag("Case_ii", "alpha > 0, test vector on the boundary, linear R")
        return CaseTag("NoCase", _why_not(config, m, interior, boundary))
    if interior and r.satisfies("subquadratic"):
        return CaseTag("Case_i_prime", f"test vector interior (margin {m:.3g})")
    if boundary and r.satisfies("linear"):
        rho_cone = cone.rho()
        if config.rho < rho_cone - CASE_TOL:
            return CaseTag("Case_ii_prime", f"rho {config.rho} < rho_cone {rho_cone:.9g}")
        slack = config.alpha * rho_cone - config.beta
        if abs(config.rho - rho_cone) <= CASE_TOL and slack > 0:
            if not (config.beta < 0 and 1 - config.alpha * rho_cone / config.beta > 0):
                raise InternalInconsistency(
                    f"case (iii)': expected beta < 0 and 1 - alpha*rho/beta > 0, got beta={config.beta}"
                )
            return CaseTag("Case_iii_prime", f"rho = rho_cone = {rho_cone:.9g}, alpha*rho - beta = {slack:.3g}")
    return CaseTag("NoCase", _why_not(config, m, interior, boundary))


def _why_not(config, m, interior, boundary) -> str:
    if not (interior or boundary):
        return f"test vector {config.test_vector.tolist()} lies outside the closed cone (margin {m:.3g})"
    if interior:
        return "test vector interior but R is not subquadratic"
    if config.r_term.growth != "linear":
        return "test vector on the boundary but R is not of linear growth"
    if config.form == "V":
        return f"test vector on the boundary with alpha = {config.alpha} <= 0"
    return f"test vector on the boundary but rho = {config.rho} and alpha*rho_cone - beta fail (ii)'/(iii)'"


# --------------------------------------------------------------------------
# grid data and the ansatz


def normalized_field(v: Callable, vmin: float, vmax: float, band: float) -> Callable:
    """Affine rescaling of ``v`` from ``[vmin, vmax]`` onto ``[1, 1 + band]``."""
    span = vmax - vmin
    if span <= 0:
        raise InvalidInput("cannot normalize a constant function")
    scale = band / span

    def vn(x):
        return (v(x) - vmin) * scale + 1.0

    return vn


@dataclass
class GridData:
    """Background quantities on a fixed point set, reused across ``N`` probes."""

    points: np.ndarray
    geo: LocalGeometry
    v_field: Callable
    v: np.ndarray
    dv: np.ndarray
    hess_v: np.ndarray
    norm2_dv: np.ndarray
    U: np.ndarray

    @property
    def g(self) -> np.ndarray:
        return self.geo.g

    def subset(self, idx) -> "GridData":
        geo = LocalGeometry(self.geo.g[idx], self.geo.dg[idx], self.geo.ddg[idx])
        return GridData(self.points[idx], geo, self.v_field, self.v[idx], self.dv[idx],
                        self.hess_v[idx], self.norm2_dv[idx], self.U[idx])


def prepare_grid(config: AnsatzConfig, chart: ChartMetric, points, provider=None,
                 v_range: tuple | None = None) -> GridData:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    geo = local_geometry(chart, points, provider)
    v_field = config.v
    if config.normalize_v is not None:
        if v_range is None:
            raw = scalar_derivatives(chart, config.v, points, provider)[0]
            v_range = (float(raw.min()), float(raw.max()))
        v_field = normalized_field(config.v, v_range[0], v_range[1], config.normalize_v)
    val, grad, hess = scalar_derivatives(chart, v_field, points, provider)
    return GridData(points, geo, v_field, val, grad, geo.covariant_hessian(grad, hess),
                    geo.norm2(grad), np.asarray(config.u_field(points, geo), dtype=float))


def exponential_ansatz(grid: GridData, N: float) -> ConformalJet:
    """Jet of ``u = e^{Nv}`` from the jet of ``v``."""
    if N <= 0:
        raise InvalidInput(f"N must be positive, got {N}")
    top = N * float(np.max(grid.v))
    if top > EXPONENT_LIMIT:
        raise ExponentOverflow(f"N*max(v) = {top:.4g} exceeds {EXPONENT_LIMIT}; normalize v onto a band")
    e = np.exp(N * grid.v)
    grad = (N * e)[:, None] * grid.dv
    hess = (N * e)[:, None, None] * grid.hess_v + (N * N * e)[:, None, None] * np.einsum(
        "...i,...j->...ij", grid.dv, grid.dv
    )
    return ConformalJet(e, grad, hess, N * N * e * e * grid.norm2_dv)


def _common_terms(config, jet_u: ConformalJet, grid: GridData) -> np.ndarray:
    g = grid.g
    return (
        config.alpha * jet_u.norm2_grad[:, None, None] * g
        - config.beta * jet_u.du_du
        + config.r_term.evaluate(grid.points, jet_u.grad_u, grid.geo)
        + grid.U
    )


def build_V(config: AnsatzConfig, jet_u: ConformalJet, grid: GridData) -> np.ndarray:
    if config.form != "V":
        raise InvalidInput("build_V needs a V-form configuration")
    return jet_u.hess_u + _common_terms(config, jet_u, grid)


def build_W(config: AnsatzConfig, jet_u: ConformalJet, grid: GridData) -> np.ndarray:
    if config.form != "W":
        raise InvalidInput("build_W needs a W-form configuration")
    lap = grid.geo.trace(jet_u.hess_u)
    return lap[:, None, None] * grid.g - config.rho * jet_u.hess_u + _common_terms(config, jet_u, grid)


def build_target(config: AnsatzConfig, jet_u: ConformalJet, grid: GridData) -> np.ndarray:
    return build_V(config, jet_u, grid) if config.form == "V" else build_W(config, jet_u, grid)


def _normalized_eigenvalues(t, g) -> np.ndarray:
    scale = np.abs(t).max(axis=(-1, -2))
    t = t / np.where(scale > 0, scale, 1.0)[:, None, None]
    return generalized_eigenvalues(t, g)


def target_margins(config: AnsatzConfig, grid: GridData, N: float) -> np.ndarray:
    """Cone margin of ``λ(g⁻¹T[e^{Nv}])`` at every grid point."""
    jet_u = exponential_ansatz(grid, N)
    return config.cone.margin(_normalized_eigenvalues(build_target(config, jet_u, grid), grid.g))


def _worst_margin(config, grid: GridData, N: float, threads: int) -> float:
    npts = len(grid.points)
    if threads <= 1 or npts < 2048:
        return float(np.min(target_margins(config, grid, N)))
    exponential_ansatz(grid, N)  # raise overflow before spawning work
    chunks = np.array_split(np.arange(npts), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda idx: np.min(target_margins(config, grid.subset(idx), N)), chunks))
    return float(min(parts))


@dataclass
class MorseCheck:
    min_abs_dv: float
    min_v: float
    ok: bool


def verify_morse(v: Callable, chart: ChartMetric, grid, provider=None, threshold: float = 1e-6) -> MorseCheck:
    """``|dv|_g`` bounded away from zero and ``v ≥ 1`` on the grid."""
    points = np.atleast_2d(np.asarray(grid, dtype=float))
    geo = local_geometry(chart, points, provider)
    val, grad, _ = scalar_derivatives(chart, v, points, provider)
    min_dv = float(np.sqrt(geo.norm2(grad)).min())
    min_v = float(val.min())
    return MorseCheck(min_dv, min_v, bool(min_dv > threshold and min_v >= 1.0 - 1e-12))


@dataclass
class SearchResult:
    N_found: float | None
    margin_profile: list = field(default_factory=list)
    diagnostic: str = ""

    @property
    def success(self) -> bool:
        return self.N_found is not None


def find_min_N(config: AnsatzConfig, chart: ChartMetric, grid, N_max: float = 1e4,
               margin_req: float = 1e-6, provider=None, rel_width: float = 1e-3,
               grid_data: GridData | None = None) -> SearchResult:
    """Smallest ``N`` on a doubling-then-bisection schedule meeting the margin everywhere.

    No monotonicity in ``N`` is assumed: the answer is the smallest successful
    probe of this schedule, not a threshold.
    """
    data = grid_data if grid_data is not None else prepare_grid(config, chart, grid, provider)
    threads = thread_count()
    profile: list[tuple[float, float]] = []

    def probe(N):
        worst = _worst_margin(config, data, N, threads)
        profile.append((N, worst))
        log.debug("N=%.6g worst margin %.3e", N, worst)
        return worst >= margin_req

    N = 1.0
    found = None
    try:
        while N <= N_max:
            if probe(N):
                found = N
                break
            N *= 2.0
    except ExponentOverflow as exc:
        return SearchResult(None, _sorted(profile), f"{exc} (stopped at N={N:g} before N_max={N_max:g})")
    if found is None:
        return SearchResult(None, _sorted(profile), f"no success up to N_max={N_max:g}")
    lo, hi, best = found / 2.0, found, found
    while hi - lo > rel_width * hi:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            hi = mid
            best = min(best, mid)
        else:
            lo = mid
    return SearchResult(best, _sorted(profile), "")


def _sorted(profile):
    return sorted(profile, key=lambda row: row[0])


# --------------------------------------------------------------------------
# theorem pipelines


@dataclass
class VerificationReport:
    task: str
    chart: str
    dim: int
    case: str = ""
    case_reason: str = ""
    N_found: float | None = None
    margin_profile: list = field(default_factory=list)
    point_min_eigenvalues: list = field(default_factory=list)
    sectional_samples: list = field(default_factory=list)
    sectional_summary: dict = field(default_factory=dict)
    weyl_residual: float | None = None
    checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    seed: int = 0
    wall_clock: float = 0.0
    config: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if self.checks and all(self.checks.values()) else "fail"

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "chart": self.chart,
            "dim": self.dim,
            "verdict": self.verdict,
            "case": self.case,
            "case_reason": self.case_reason,
            "N_found": self.N_found,
            "margin_profile": [list(r) for r in self.margin_profile],
            "point_min_eigenvalues": self.point_min_eigenvalues,
            "sectional_summary": self.sectional_summary,
            "sectional_samples": self.sectional_samples,
            "weyl_residual": self.weyl_residual,
            "checks": self.checks,
            "details": self.details,
            "seed": self.seed,
            "wall_clock": self.wall_clock,
            "config": self.config,
        }


def _shifted_exponential(v_field: Callable, N: float, shift: np.ndarray) -> Callable:
    # e^{Nv} − c with c = u at the evaluation points: rescales g_u by the
    # constant e^{−2c}, which keeps e^{2u} finite and preserves curvature signs
    def u(x):
        return jet.exp(N * v_field(x)) - shift

    return u


def negative_sectional_config(chart: ChartMetric, v: Callable, normalize_v: float | None = 0.5) -> AnsatzConfig:
    return AnsatzConfig("V", 0.5, 1.0, ConeSpec.pk(2, chart.dim), v,
                        u_field=minus_schouten_tensor, normalize_v=normalize_v)


def positive_einstein_config(chart: ChartMetric, v: Callable, normalize_v: float | None = 0.5) -> AnsatzConfig:
    n = chart.dim
    return AnsatzConfig("W", (n - 3) / 2, -1.0, ConeSpec.positive_orthant(n), v, rho=1.0,
                        u_field=modified_schouten_tensor(n - 1, 1.0), normalize_v=normalize_v)


def search_stage(report: VerificationReport, config, chart, grid, N_max, margin_req, provider):
    data = prepare_grid(config, chart, grid, provider)
    morse = verify_morse(data.v_field, chart, grid, provider)
    report.details["morse"] = {"min_abs_dv": morse.min_abs_dv, "min_v": morse.min_v}
    report.checks["morse"] = morse.ok
    tag = classify_case(config)
    report.case, report.case_reason = tag.tag, tag.reason
    if tag.tag == "NoCase":
        log.warning("no theorem hypothesis holds: %s", tag.reason)
    result = find_min_N(config, chart, grid, N_max, margin_req, provider, grid_data=data)
    report.N_found = result.N_found
    report.margin_profile = result.margin_profile
    report.checks["N_found"] = result.success
    if result.diagnostic:
        report.details["search"] = result.diagnostic
    if result.success:
        jet_u = exponential_ansatz(data, result.N_found)
        lam = _normalized_eigenvalues(build_target(config, jet_u, data), data.g)
        report.point_min_eigenvalues = lam[:, 0].tolist()
        if tag.tag in ("Case_i", "Case_i_prime"):
            report.details["dominance"] = dominance_check(config, data, result.N_found)
    return data, result


def dominance_check(config: AnsatzConfig, data: GridData, N0: float) -> dict:
    """Whether the worst margin at ``2 N0`` is at least that at ``N0`` (reported, never fatal)."""
    m0 = float(np.min(target_margins(config, data, N0)))
    try:
        m1 = float(np.min(target_margins(config, data, 2 * N0)))
    except ExponentOverflow as exc:
        return {"N0": N0, "margin_N0": m0, "margin_2N0": None, "holds": None, "note": str(exc)}
    holds = bool(m1 >= m0 > 0)
    if not holds:
        log.info("dominance not observed: margin(%g)=%.3e, margin(%g)=%.3e", N0, m0, 2 * N0, m1)
    return {"N0": N0, "margin_N0": m0, "margin_2N0": m1, "holds": holds}


def construct_negative_sectional(chart: ChartMetric, v: Callable, grid, N_max: float = 1e4,
                                 margin_req: float = 1e-6, provider=None, seed: int = 0,
                                 n_points: int = 50, n_planes: int = 100,
                                 normalize_v: float | None = 0.5) -> VerificationReport:
    """Search ``u = e^{Nv}`` with ``λ(−g⁻¹A_{g_u}) ∈ P_2``, then sample ``K_{g_u}`` directly."""
    start = time.perf_counter()
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    report = VerificationReport("thm13", chart.name, chart.dim, seed=seed)
    residual = float(local_geometry(chart, grid, provider).weyl_residual().max())
    report.weyl_residual = residual
    if residual >= WEYL_TOL:
        raise NotLocallyConformallyFlat(f"Weyl residual {residual:.3g} on {chart.name} exceeds {WEYL_TOL}")
    config = negative_sectional_config(chart, v, normalize_v)
    report.config = config.describe()
    data, result = search_stage(report, config, chart, grid, N_max, margin_req, provider)
    if result.success:
        _sample_sectional(report, config, chart, data, result.N_found, provider, seed, n_points, n_planes)
    report.wall_clock = time.perf_counter() - start
    return report


def _sample_sectional(report, config, chart, data, N, provider, seed, n_points, n_planes):
    rng = np.random.default_rng(seed)
    n = chart.dim
    pts = chart.sample_points(n_points, rng)
    sample = prepare_grid(config, chart, pts, provider, v_range=_v_range(config, chart, data, provider))
    jet_u = exponential_ansatz(sample, N)
    in_p2 = config.cone.contains(_normalized_eigenvalues(build_V(config, jet_u, sample), sample.g))

    shift = jet_u.u
    geo_u = local_geometry(conformal_metric(chart, _shifted_exponential(sample.v_field, N, shift)), pts, provider)
    xs = rng.normal(size=(n_planes, n_points, n))
    ys = rng.normal(size=(n_planes, n_points, n))
    k_frame = np.stack([geo_u.sectional(xs[j], ys[j]) for j in range(n_planes)], axis=1)
    k_true = k_frame * np.exp(-2.0 * shift)[:, None]
    direct_negative = np.all(k_frame < 0, axis=1)
    mismatched = np.nonzero(direct_negative != in_p2)[0]

    report.sectional_samples = [float(k) for k in k_true.ravel()]
    report.sectional_summary = {
        "count": int(k_true.size),
        "min": float(k_true.min()),
        "max": float(k_true.max()),
        "max_abs_min": float(np.abs(k_true).min()),
        "frame_max": float(k_frame.max()),
        "frame_min_abs": float(np.abs(k_frame).min()),
        "points": n_points,
        "planes_per_point": n_planes,
    }
    report.details["sample_points_in_P2"] = int(np.sum(in_p2))
    if len(mismatched):
        p = int(mismatched[0])
        worst = int(np.argmax(k_frame[p]))
        report.details["discrepancy"] = {
            "point": pts[p].tolist(),
            "in_P2": bool(in_p2[p]),
            "plane": [xs[worst, p].tolist(), ys[worst, p].tolist()],
            "K": float(k_true[p, worst]),
        }
    report.checks["sectional_negative"] = bool(np.all(k_true < 0) and np.all(np.abs(k_true) > 1e-10))
    report.checks["eigen_direct_agree"] = len(mismatched) == 0


def _v_range(config, chart, data: GridData, provider):
    if config.normalize_v is None:
        return None
    raw = scalar_derivatives(chart, config.v, data.points, provider)[0]
    return float(raw.min()), float(raw.max())


def construct_positive_einstein(chart: ChartMetric, v: Callable, grid, N_max: float = 1e4,
                                margin_req: float = 1e-6, provider=None, seed: int = 0,
                                normalize_v: float | None = 0.5) -> VerificationReport:
    """Search ``u = e^{Nv}`` with ``A^{n−1,1}_{g_u} > 0``, then check ``G_{g_u} > 0`` directly."""
    start = time.perf_counter()
    n = chart.dim
    if n < 3:
        raise InvalidInput("positive Einstein construction needs n >= 3")
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    report = VerificationReport("thm12", chart.name, n, seed=seed)
    config = positive_einstein_config(chart, v, normalize_v)
    report.config = config.describe()
    data, result = search_stage(report, config, chart, grid, N_max, margin_req, provider)
    report.weyl_residual = float(data.geo.weyl_residual().max())
    identity = np.abs(data.U - data.geo.einstein / (n - 2)).max()
    report.details["einstein_identity_error"] = float(identity)
    report.checks["einstein_identity"] = bool(identity <= 1e-8 * max(1.0, np.abs(data.U).max()))
    if result.success:
        N = result.N_found
        jet_u = exponential_ansatz(data, N)
        metric_u = conformal_metric(chart, _shifted_exponential(data.v_field, N, jet_u.u))
        geo_u = local_geometry(metric_u, grid, provider)
        lam = generalized_eigenvalues(geo_u.einstein, geo_u.g)[:, 0]
        lam_true = lam * np.exp(-2.0 * jet_u.u)
        report.details["einstein_min_eigenvalues"] = lam_true.tolist()
        report.details["einstein_min_eigenvalue"] = float(lam_true.min())
        report.details["einstein_min_eigenvalue_frame"] = float(lam.min())
        report.checks["einstein_positive"] = bool(np.all(lam > 0))
    report.wall_clock = time.perf_counter() - start
    return report
