import numpy as np
import pytest

from curvcone import jet
from curvcone.ansatz import (
    AnsatzConfig,
    LowerOrderTerm,
    ZERO_TERM,
    _normalized_eigenvalues,
    build_V,
    build_W,
    build_target,
    classify_case,
    construct_negative_sectional,
    construct_positive_einstein,
    exponential_ansatz,
    find_min_N,
    minus_schouten_tensor,
    negative_sectional_config,
    positive_einstein_config,
    prepare_grid,
    target_margins,
    verify_morse,
)
from curvcone.catalog import euclidean_box, flat_shell, linear_field, make_chart, perturbed_flat, radial_field
from curvcone.cones import ConeSpec
from curvcone.conformal import ConformalJet
from curvcone.errors import ExponentOverflow, InternalInconsistency, InvalidInput, NotLocallyConformallyFlat
from curvcone.geometry import ChartMetric, TaylorProvider, local_geometry


def x1(dim):
    return linear_field([1.0] + [0.0] * (dim - 1))


def trivial_config(n, **kw):
    base = dict(form="V", alpha=1.0, beta=0.0, cone=ConeSpec.positive_orthant(n), v=x1(n), normalize_v=None)
    base.update(kw)
    return AnsatzConfig(**base)


# ---- case classification -----------------------------------------------------

CLASSIFIER_EXAMPLES = [
    ("V", 0.5, 1.0, 0.0, lambda n: ConeSpec.pk(2, n), 3, "Case_ii"),
    ("V", 0.5, 1.0, 0.0, lambda n: ConeSpec.pk(2, n), 5, "Case_ii"),
    ("W", 0.0, -1.0, 1.0, ConeSpec.positive_orthant, 3, "Case_iii_prime"),
    ("W", 0.5, -1.0, 1.0, ConeSpec.positive_orthant, 4, "Case_i_prime"),
    ("V", 1.0, 0.0, 0.0, ConeSpec.positive_orthant, 4, "Case_i"),
    ("W", 1.0, 1.0, 0.5, ConeSpec.positive_orthant, 3, "Case_ii_prime"),
    ("V", 1.0, 4.0, 0.0, ConeSpec.half_space, 3, "NoCase"),
]


@pytest.mark.parametrize("form, alpha, beta, rho, cone, n, expected", CLASSIFIER_EXAMPLES)
def test_classify_examples(form, alpha, beta, rho, cone, n, expected):
    config = AnsatzConfig(form, alpha, beta, cone(n), x1(n), rho=rho)
    assert classify_case(config).tag == expected


@pytest.mark.parametrize("n, expected", [(3, "Case_iii_prime"), (4, "Case_i_prime"), (5, "Case_i_prime"), (6, "Case_i_prime")])
def test_einstein_configuration_dimension_split(n, expected):
    assert classify_case(positive_einstein_config(euclidean_box(n), x1(n))).tag == expected


def test_negative_sectional_configuration_is_case_ii():
    for n in (3, 4, 5):
        assert classify_case(negative_sectional_config(flat_shell(n), radial_field([0.0] * n))).tag == "Case_ii"


def test_linear_term_qualifies_for_subquadratic_case():
    config = trivial_config(3, r_term=LowerOrderTerm("minus_schouten", "linear"))
    assert classify_case(config).tag == "Case_i"


def test_non_positive_alpha_on_boundary_is_no_case():
    config = AnsatzConfig("V", 0.0, 0.0, ConeSpec.positive_orthant(3), x1(3))
    assert classify_case(config).tag == "NoCase"


class _BoundaryCone:
    dim = 3

    def margin(self, lam):
        return 0.0

    def rho(self):
        return 1.0


def test_case_iii_prime_derived_facts_are_enforced():
    with pytest.raises(InternalInconsistency):
        classify_case(AnsatzConfig("W", 2.0, 1.0, _BoundaryCone(), x1(3), rho=1.0))


def test_invalid_form():
    with pytest.raises(InvalidInput):
        AnsatzConfig("Z", 1.0, 0.0, ConeSpec.positive_orthant(3), x1(3))


# ---- lower-order terms --------------------------------------------------------


def test_growth_check(rng):
    chart = make_chart("sphere_band", 3)
    pts = chart.sample_points(5, rng)
    geo = local_geometry(chart, pts)
    assert ZERO_TERM.check_growth(pts, geo)
    schouten_norm = 0.5 * np.sqrt(3)
    assert LowerOrderTerm("minus_schouten", "linear", C=schouten_norm + 1e-9).check_growth(pts, geo)
    assert not LowerOrderTerm("minus_schouten", "linear", C=0.1).check_growth(pts, geo)

    def soft(points, p, g):
        mag = np.sqrt(g.norm2(p))
        return (mag ** 1.5)[:, None, None] * g.g

    # on a flat chart |p|_g is the coordinate norm used by gamma
    flat = euclidean_box(3)
    fpts = flat.grid(3)
    term = LowerOrderTerm("custom", "subquadratic", func=soft,
                          gamma=lambda x, p: np.sqrt(3.0) / (1 + np.linalg.norm(p, axis=1)) ** 0.4)
    assert term.check_growth(fpts, local_geometry(flat, fpts), rng)


# ---- the ansatz and its operators ----------------------------------------------


def test_exponential_jet_on_linear_v():
    n = 3
    chart = euclidean_box(n)
    pts = chart.grid(3)
    data = prepare_grid(trivial_config(n), chart, pts)
    N = 1.7
    j = exponential_ansatz(data, N)
    e = np.exp(N * (1 + pts[:, 0]))
    expected = np.zeros((len(pts), n, n))
    expected[:, 0, 0] = N * N * e
    assert np.allclose(j.hess_u, expected)
    assert np.allclose(j.norm2_grad, (N * e) ** 2)


def test_exponential_jet_matches_direct_differentiation(rng):
    chart = make_chart("sphere_band", 3)
    v = radial_field([0.0, 0.0, 0.0])
    config = AnsatzConfig("V", 0.5, 1.0, ConeSpec.pk(2, 3), v, normalize_v=0.5)
    pts = chart.sample_points(15, rng)
    data = prepare_grid(config, chart, pts)
    N = 3.3
    j = exponential_ansatz(data, N)
    val, grad, hess = TaylorProvider().derivatives(lambda x: jet.exp(N * data.v_field(x)), pts)
    geo = data.geo
    assert np.allclose(j.u, val, rtol=1e-12)
    assert np.allclose(j.grad_u, grad, rtol=1e-9)
    assert np.allclose(j.hess_u, geo.covariant_hessian(grad, hess), rtol=1e-9, atol=1e-12)


def test_small_N_gradient_scales_linearly():
    chart = euclidean_box(3)
    data = prepare_grid(trivial_config(3), chart, chart.grid(3))
    for N in (1e-4, 1e-6):
        j = exponential_ansatz(data, N)
        assert np.allclose(j.grad_u / N, data.dv, rtol=3 * N * data.v.max())


def test_overflow_guard():
    chart = euclidean_box(3)
    data = prepare_grid(trivial_config(3), chart, chart.grid(3))
    with pytest.raises(ExponentOverflow):
        exponential_ansatz(data, 200.0)
    with pytest.raises(InvalidInput):
        exponential_ansatz(data, 0.0)


def test_build_V_examples():
    n = 3
    chart = euclidean_box(n)
    pts = chart.grid(3)
    config = trivial_config(n, u_field=lambda p, geo: 2.0 * geo.g)
    data = prepare_grid(config, chart, pts)
    zero = ConformalJet.zero(n, len(pts))
    assert np.allclose(build_V(config, zero, data), 2.0 * data.g)

    config = trivial_config(n)
    data = prepare_grid(config, chart, pts)
    for N in (0.3, 1.0, 4.0):
        e = np.exp(N * data.v)
        expected = (N * N * e ** 2)[:, None, None] * data.g
        expected[:, 0, 0] += N * N * e
        v_op = build_V(config, exponential_ansatz(data, N), data)
        assert np.allclose(v_op, expected)
        assert np.all(np.linalg.eigvalsh(v_op) > 0)
    with pytest.raises(InvalidInput):
        build_W(config, zero, data)


def test_W_trace_identity(rng):
    n = 4
    chart = perturbed_flat(n)
    v = linear_field([1.0, 0.5, -0.3, 0.2])
    config = AnsatzConfig("W", 0.7, -1.3, ConeSpec.positive_orthant(n), v, rho=1.0,
                          r_term=LowerOrderTerm("minus_schouten", "linear"), u_field=minus_schouten_tensor)
    data = prepare_grid(config, chart, chart.sample_points(12, rng))
    j = exponential_ansatz(data, 2.0)
    w = build_W(config, j, data)
    geo = data.geo
    lap = geo.trace(j.hess_u)
    extra = geo.trace(-2.0 * geo.schouten)
    expected = (n - 1) * lap + n * 0.7 * j.norm2_grad + 1.3 * j.norm2_grad + extra
    assert np.allclose(geo.trace(w), expected, rtol=1e-9, atol=1e-9)


def test_margin_is_scale_invariant(rng):
    n = 3
    chart = make_chart("poincare_shell", n)
    config = negative_sectional_config(chart, radial_field([0.0] * n))
    data = prepare_grid(config, chart, chart.sample_points(20, rng))
    t = build_target(config, exponential_ansatz(data, 2.0), data)
    base = config.cone.margin(_normalized_eigenvalues(t, data.g))
    for s in (1e-3, 7.0, 1e5):
        assert np.allclose(config.cone.margin(_normalized_eigenvalues(s * t, data.g)), base, atol=1e-12)


# ---- morse checks -----------------------------------------------------------------


def test_morse_examples():
    shell = flat_shell(3)
    check = verify_morse(radial_field([0.0] * 3), shell, shell.grid(7))
    assert check.ok
    assert check.min_abs_dv == pytest.approx(1.0)
    assert check.min_v == pytest.approx(1.0)

    box = ChartMetric(3, (-1.0,) * 3, (1.0,) * 3, euclidean_box(3).g)
    assert not verify_morse(lambda x: 1.0 + x[0] ** 2, box, box.grid(5)).ok

    unit = euclidean_box(3)
    check = verify_morse(x1(3), unit, unit.grid(5))
    assert check.ok and check.min_abs_dv == pytest.approx(1.0)


def test_morse_rejects_small_values():
    unit = euclidean_box(3)
    assert not verify_morse(lambda x: 0.5 + x[0], unit, unit.grid(3)).ok


# ---- N search -----------------------------------------------------------------------


def test_trivial_search_succeeds_at_first_probe():
    n = 3
    chart = euclidean_box(n)
    result = find_min_N(trivial_config(n), chart, chart.grid(5))
    assert result.success
    probes = [N for N, _ in result.margin_profile]
    assert max(probes) == 1.0
    assert dict(result.margin_profile)[1.0] >= 1e-6
    assert result.N_found <= 1.0


def test_search_reports_failure_outside_cone():
    n = 3
    chart = euclidean_box(n)
    config = AnsatzConfig("V", 1.0, n + 1.0, ConeSpec.half_space(n), x1(n))
    assert classify_case(config).tag == "NoCase"
    result = find_min_N(config, chart, chart.grid(5), N_max=1e4)
    assert result.N_found is None
    assert "normalize" in result.diagnostic
    assert all(m < 1e-6 for _, m in result.margin_profile)


def test_search_without_success_below_N_max():
    n = 3
    chart = euclidean_box(n)
    config = AnsatzConfig("V", 1.0, n + 1.0, ConeSpec.half_space(n), x1(n))
    result = find_min_N(config, chart, chart.grid(3), N_max=8)
    assert result.N_found is None
    assert "N_max" in result.diagnostic
    assert [N for N, _ in result.margin_profile] == [1.0, 2.0, 4.0, 8.0]


REGRESSION_N_FLAT_SHELL_3 = 0.50048828125


def test_negative_sectional_regression_anchor():
    chart = flat_shell(3)
    grid = chart.grid(9)
    config = negative_sectional_config(chart, radial_field([0.0] * 3))
    data = prepare_grid(config, chart, grid)
    integer_successes = [N for N in range(1, 65) if target_margins(config, data, N).min() >= 1e-6]
    assert integer_successes[0] == 1
    result = find_min_N(config, chart, grid, grid_data=data)
    assert result.N_found == pytest.approx(REGRESSION_N_FLAT_SHELL_3, rel=1e-12)
    assert result.margin_profile == sorted(result.margin_profile)


# ---- pipelines --------------------------------------------------------------------------


def test_non_lcf_metric_is_rejected_by_negative_sectional_pipeline():
    chart = perturbed_flat(4)
    with pytest.raises(NotLocallyConformallyFlat):
        construct_negative_sectional(chart, x1(4), chart.grid(4))


def test_negative_sectional_report_contents():
    chart = make_chart("poincare_shell", 3)
    report = construct_negative_sectional(chart, radial_field([0.0] * 3), chart.grid(7), n_points=10, n_planes=20)
    assert report.verdict == "pass"
    assert report.sectional_summary["count"] == 200
    assert report.sectional_summary["max"] < 0
    assert len(report.point_min_eigenvalues) == len(chart.grid(7))
    assert report.case == "Case_ii"


def test_positive_einstein_report_contents():
    chart = euclidean_box(4)
    report = construct_positive_einstein(chart, x1(4), chart.grid(4))
    assert report.verdict == "pass"
    assert report.case == "Case_i_prime"
    assert report.details["einstein_min_eigenvalue"] > 0
    assert "dominance" in report.details
