"""Closed-form catalog metrics and scalar fields."""

from __future__ import annotations

import numpy as np

from . import jet
from .errors import ConfigError, InvalidInput
from .geometry import ChartMetric

CATALOG = ("euclidean_box", "flat_shell", "sphere_band", "poincare_shell", "perturbed_flat")

# sectional curvature of the catalog space forms
SPACE_FORM_CURVATURE = {"euclidean_box": 0.0, "flat_shell": 0.0, "sphere_band": 1.0, "poincare_shell": -1.0}
LOCALLY_CONFORMALLY_FLAT = ("euclidean_box", "flat_shell", "sphere_band", "poincare_shell")


def _conformally_flat(dim, factor):
    def g(x):
        f = factor(x)
        return [[f if i == j else 0.0 for j in range(dim)] for i in range(dim)]

    return g


def _flat(dim):
    def g(x):
        return [[1.0 if i == j else 0.0 for j in range(dim)] for i in range(dim)]

    return g


def euclidean_box(dim: int) -> ChartMetric:
    return ChartMetric(dim, (0.0,) * dim, (1.0,) * dim, _flat(dim), name="euclidean_box")


def flat_shell(dim: int, r_in: float = 1.0, r_out: float = 2.0) -> ChartMetric:
    return ChartMetric(
        dim, (-r_out,) * dim, (r_out,) * dim, _flat(dim), name="flat_shell",
        shell=(r_in, r_out), params={"r_in": r_in, "r_out": r_out},
    )


def sphere_band(dim: int, r_in: float = 0.5, r_out: float = 1.0) -> ChartMetric:
    """Stereographic chart of the unit sphere restricted to an annulus."""
    g = _conformally_flat(dim, lambda x: 4.0 / (1.0 + jet.norm2(x)) ** 2)
    return ChartMetric(
        dim, (-r_out,) * dim, (r_out,) * dim, g, name="sphere_band",
        shell=(r_in, r_out), params={"r_in": r_in, "r_out": r_out},
    )


def poincare_shell(dim: int, r_in: float = 0.25, r_out: float = 0.5) -> ChartMetric:
    if r_out >= 1.0:
        raise InvalidInput("Poincare shell must lie inside the unit ball")
    g = _conformally_flat(dim, lambda x: 4.0 / (1.0 - jet.norm2(x)) ** 2)
    return ChartMetric(
        dim, (-r_out,) * dim, (r_out,) * dim, g, name="poincare_shell",
        shell=(r_in, r_out), params={"r_in": r_in, "r_out": r_out},
    )


def perturbed_flat(dim: int, amplitude: float = 0.05, seed: int = 0) -> ChartMetric:
    """``δ_ij + a sin(k_ij·x + p_ij)`` on the unit box; SPD by diagonal dominance."""
    if not 0 <= amplitude <= 0.05:
        raise InvalidInput(f"perturbation amplitude must lie in [0, 0.05], got {amplitude}")
    rng = np.random.default_rng(seed)
    waves = {}
    for i in range(dim):
        for j in range(i, dim):
            waves[i, j] = (rng.uniform(-3.0, 3.0, size=dim), rng.uniform(0.0, 2 * np.pi))

    def g(x):
        out = [[None] * dim for _ in range(dim)]
        for (i, j), (k, p) in waves.items():
            phase = p
            for kc, xc in zip(k, x):
                phase = phase + kc * xc
            entry = amplitude * jet.sin(phase) + (1.0 if i == j else 0.0)
            out[i][j] = out[j][i] = entry
        return out

    return ChartMetric(
        dim, (0.0,) * dim, (1.0,) * dim, g, name="perturbed_flat",
        params={"amplitude": amplitude, "seed": seed},
    )


def polar_plane() -> ChartMetric:
    """``dr² + r² dθ²`` on ``[0.5, 2] × [0, π]``."""
    return ChartMetric(2, (0.5, 0.0), (2.0, np.pi), lambda x: [[1.0, 0.0], [0.0, x[0] * x[0]]], name="polar")


def make_chart(name: str, dim: int, **params) -> ChartMetric:
    builders = {
        "euclidean_box": euclidean_box,
        "flat_shell": flat_shell,
        "sphere_band": sphere_band,
        "poincare_shell": poincare_shell,
        "perturbed_flat": perturbed_flat,
    }
    if name not in builders:
        raise ConfigError(f"unknown manifold {name!r}; catalog: {', '.join(CATALOG)}")
    return builders[name](dim, **params)


# --------------------------------------------------------------------------
# scalar fields


def radial_field(center) -> callable:
    c = tuple(float(ci) for ci in center)

    def v(x):
        return jet.sqrt(jet.norm2([xi - ci for xi, ci in zip(x, c)]))

    return v


def linear_field(direction, offset: float = 1.0) -> callable:
    d = tuple(float(di) for di in direction)

    def v(x):
        total = offset
        for di, xi in zip(d, x):
            if di:
                total = total + di * xi
        return total

    return v


def polynomial_field(terms) -> callable:
    """Sum of ``coef * prod x_i^e_i`` over ``terms = [(coef, exponents), ...]``."""
    terms = [(float(c), tuple(int(e) for e in exps)) for c, exps in terms]

    def v(x):
        total = 0.0
        for c, exps in terms:
            mono = c
            for xi, e in zip(x, exps):
                if e:
                    mono = mono * xi**e if e > 1 else mono * xi
            total = total + mono
        return total

    return v


def default_morse_function(chart: ChartMetric):
    """A function without critical points on the chart's closed domain."""
    if chart.shell is not None:
        return radial_field(chart.center)
    return linear_field([1.0] + [0.0] * (chart.dim - 1))


def random_smooth_field(dim: int, rng: np.random.Generator, scale: float = 1.0, center=None):
    """Random quadratic-plus-wave scalar field with O(scale) derivatives."""
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    a0 = rng.normal()
    lin = rng.normal(size=dim) * scale
    quad = rng.normal(size=(dim, dim)) * 0.5 * scale
    quad = 0.5 * (quad + quad.T)
    k = rng.normal(size=dim) * 2.0
    phase = rng.uniform(0, 2 * np.pi)
    amp = 0.3 * scale

    def u(x):
        y = [xi - ci for xi, ci in zip(x, c)]
        total = a0
        for i in range(dim):
            total = total + lin[i] * y[i]
            for j in range(dim):
                total = total + 0.5 * quad[i, j] * y[i] * y[j]
        arg = phase
        for i in range(dim):
            arg = arg + k[i] * y[i]
        return total + amp * jet.sin(arg)

    return u
