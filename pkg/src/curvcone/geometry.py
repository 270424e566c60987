"""Chart-based curvature engine.

Conventions (fixed so the unit round sphere has sectional curvature +1):

* ``R(X, Y)Z = ∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_[X,Y] Z``
* ``Rm[i, j, k, l] = g(R(∂_i, ∂_j) ∂_l, ∂_k)``, so that the round sphere has
  ``Rm = g ⊙ g / 2`` and ``Rm(X, Y, X, Y) = K |X ∧ Y|^2``
* ``Ric[j, k] = g^{il} Rm[i, j, l, k]``, ``R = g^{jk} Ric[j, k]``

Arrays carry a leading batch axis over points; derivative axes come last
(``dg[p, a, b, c] = ∂_c g_ab``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import jet
from .errors import (
    DegenerateParameter,
    DegeneratePlane,
    DimensionMismatch,
    DimensionTooSmall,
    InvalidInput,
)
from .lintensor import kulkarni_nomizu, metric_value

ScalarField = Callable[[Sequence], object]
MetricField = Callable[[Sequence], list]


# --------------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class ChartMetric:
    """A box chart carrying a scalar-generic metric field.

    ``g`` maps a coordinate sequence (floats, arrays or jets) to an ``n x n``
    nested list. ``shell`` optionally restricts the manifold to the closed
    annulus ``r_in <= |x - center| <= r_out`` inside the box, whose two
    spheres are then the manifold boundary.
    """

    dim: int
    lower: tuple
    upper: tuple
    g: MetricField
    name: str = "chart"
    boundary_faces: frozenset = field(default=None)
    shell: tuple | None = None
    center: tuple | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.lower) != self.dim or len(self.upper) != self.dim:
            raise DimensionMismatch("box bounds do not match chart dimension")
        if self.boundary_faces is None:
            faces = frozenset() if self.shell else frozenset(
                (i, s) for i in range(self.dim) for s in (-1, 1)
            )
            object.__setattr__(self, "boundary_faces", faces)
        if self.shell is not None and self.center is None:
            object.__setattr__(self, "center", tuple(0.0 for _ in range(self.dim)))

    def metric(self, points) -> np.ndarray:
        """Metric values ``(P, n, n)`` at plain points."""
        pts = _as_points(points, self.dim)
        x = [pts[:, i] for i in range(self.dim)]
        return jet.stack_values(self.g(x), len(pts))

    def radius(self, points) -> np.ndarray:
        pts = _as_points(points, self.dim)
        return np.linalg.norm(pts - np.asarray(self.center), axis=-1)

    def in_domain(self, points, slack: float = 1e-12) -> np.ndarray:
        pts = _as_points(points, self.dim)
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        ok = np.all((pts >= lo - slack) & (pts <= hi + slack), axis=-1)
        if self.shell is not None:
            r = self.radius(pts)
            ok &= (r >= self.shell[0] - slack) & (r <= self.shell[1] + slack)
        return ok

    def _directions(self, resolution: int) -> np.ndarray:
        # cube-surface lattice projected to the sphere: deterministic, roughly uniform
        m = max(3, resolution // 2 + 1)
        axes = [np.linspace(-1.0, 1.0, m)] * self.dim
        cube = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)
        surface = cube[np.isclose(np.abs(cube).max(axis=1), 1.0)]
        return surface / np.linalg.norm(surface, axis=1, keepdims=True)

    def boundary_grid(self, resolution: int = 9) -> np.ndarray:
        """Deterministic sample of the manifold boundary."""
        if self.shell is not None:
            d = self._directions(resolution)
            c = np.asarray(self.center)
            return np.concatenate([c + self.shell[0] * d, c + self.shell[1] * d])
        pts = self.box_grid(resolution)
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        mask = np.zeros(len(pts), dtype=bool)
        for axis, side in self.boundary_faces:
            mask |= np.isclose(pts[:, axis], lo[axis] if side < 0 else hi[axis])
        return pts[mask]

    def box_grid(self, resolution: int = 9) -> np.ndarray:
        axes = [np.linspace(a, b, resolution) for a, b in zip(self.lower, self.upper)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)

    def grid(self, resolution: int = 9) -> np.ndarray:
        """Uniform grid of the closed domain, boundary included."""
        pts = self.box_grid(resolution)
        if self.shell is None:
            return pts
        r = self.radius(pts)
        inner = pts[(r > self.shell[0]) & (r < self.shell[1])]
        return np.concatenate([inner, self.boundary_grid(resolution)])

    def sample_points(self, count: int, rng: np.random.Generator, boundary_fraction: float = 0.3):
        """Random points of the closed domain; about ``boundary_fraction`` on the boundary."""
        nb = int(round(count * boundary_fraction))
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        out = []
        while sum(len(o) for o in out) < count - nb:
            cand = rng.uniform(lo, hi, size=(4 * count, self.dim))
            out.append(cand[self.in_domain(cand)])
        interior = np.concatenate(out)[: count - nb]
        if self.shell is not None:
            d = rng.normal(size=(nb, self.dim))
            d /= np.linalg.norm(d, axis=1, keepdims=True)
            r = np.where(rng.random(nb) < 0.5, self.shell[0], self.shell[1])
            bnd = np.asarray(self.center) + r[:, None] * d
        else:
            faces = sorted(self.boundary_faces)
            bnd = rng.uniform(lo, hi, size=(nb, self.dim))
            if faces:
                pick = rng.integers(len(faces), size=nb)
                for row, f in enumerate(pick):
                    axis, side = faces[f]
                    bnd[row, axis] = lo[axis] if side < 0 else hi[axis]
        return np.concatenate([interior, bnd])


def _as_points(points, dim: int) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != dim:
        raise DimensionMismatch(f"points of dim {pts.shape[-1]} on a {dim}-dimensional chart")
    if not np.all(np.isfinite(pts)):
        raise InvalidInput("non-finite coordinates")
    return pts


# --------------------------------------------------------------------------
# derivative providers


class TaylorProvider:
    """Exact derivatives by second-order forward Taylor (jet) arithmetic."""

    kind = "taylor"

    def derivatives(self, f, points, box=None):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        npts, dim = pts.shape
        return jet.stack(f(jet.Jet.variables(pts)), npts, dim)

    def __repr__(self) -> str:
        return "TaylorProvider()"


_CENTRAL = {
    4: ((-2, -1, 1, 2), (1 / 12, -8 / 12, 8 / 12, -1 / 12),
        (-2, -1, 0, 1, 2), (-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12)),
    2: ((-1, 1), (-0.5, 0.5), (-1, 0, 1), (1.0, -2.0, 1.0)),
}
_FORWARD = {
    4: ((0, 1, 2, 3, 4), (-25 / 12, 48 / 12, -36 / 12, 16 / 12, -3 / 12),
        (0, 1, 2, 3, 4, 5), (45 / 12, -154 / 12, 214 / 12, -156 / 12, 61 / 12, -10 / 12)),
    2: ((0, 1, 2), (-1.5, 2.0, -0.5), (0, 1, 2, 3), (2.0, -5.0, 4.0, -1.0)),
}


class FiniteDifferenceProvider:
    """Finite-difference derivatives; one-sided stencils where a central one leaves the box."""

    kind = "fd"

    def __init__(self, order: int = 4, step: float = 1e-3):
        if order not in _CENTRAL:
            raise InvalidInput(f"finite-difference order must be 2 or 4, got {order}")
        self.order = order
        self.step = step

    def __repr__(self) -> str:
        return f"FiniteDifferenceProvider(order={self.order}, step={self.step})"

    def _stencils(self, pts, box):
        """Per-axis padded stencils: offsets/weights of shape (P, L)."""
        npts, dim = pts.shape
        c1o, c1w, c2o, c2w = _CENTRAL[self.order]
        f1o, f1w, f2o, f2w = _FORWARD[self.order]
        reach = max(abs(o) for o in c2o) * self.step
        l1, l2 = len(f1o), len(f2o)

        def pad(seq, length):
            return np.array(list(seq) + [0] * (length - len(seq)), dtype=float)

        rows = []
        for axis in range(dim):
            kind = np.zeros(npts, dtype=int)  # 0 central, 1 forward, -1 backward
            if box is not None:
                lo, hi = box[0][axis], box[1][axis]
                kind[pts[:, axis] - reach < lo - 1e-14] = 1
                kind[(pts[:, axis] + reach > hi + 1e-14) & (kind == 0)] = -1
            o1 = np.where((kind == 0)[:, None], pad(c1o, l1), pad(f1o, l1) * np.where(kind == -1, -1, 1)[:, None])
            w1 = np.where((kind == 0)[:, None], pad(c1w, l1), pad(f1w, l1) * np.where(kind == -1, -1, 1)[:, None])
            o2 = np.where((kind == 0)[:, None], pad(c2o, l2), pad(f2o, l2) * np.where(kind == -1, -1, 1)[:, None])
            w2 = np.where((kind == 0)[:, None], pad(c2w, l2), pad(f2w, l2))
            rows.append((o1, w1, o2, w2))
        return rows

    def derivatives(self, f, points, box=None):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        npts, dim = pts.shape
        h = self.step

        def evaluate(shift):
            x = pts + shift
            return jet.stack_values(f([x[:, i] for i in range(dim)]), npts)

        val = evaluate(0.0)
        extra = val.ndim - 1
        wshape = (npts,) + (1,) * extra
        grad = np.zeros(val.shape + (dim,))
        hess = np.zeros(val.shape + (dim, dim))
        st = self._stencils(pts, box)
        eye = np.eye(dim)
        for i in range(dim):
            o1, w1, o2, w2 = st[i]
            for a in range(o1.shape[1]):
                if np.any(w1[:, a]):
                    grad[..., i] += w1[:, a].reshape(wshape) * evaluate(o1[:, a, None] * h * eye[i]) / h
            for a in range(o2.shape[1]):
                if np.any(w2[:, a]):
                    hess[..., i, i] += w2[:, a].reshape(wshape) * evaluate(o2[:, a, None] * h * eye[i]) / h**2
            for j in range(i + 1, dim):
                p1, v1, _, _ = st[j]
                acc = 0.0
                for a in range(o1.shape[1]):
                    for b in range(p1.shape[1]):
                        w = w1[:, a] * v1[:, b]
                        if not np.any(w):
                            continue
                        shift = o1[:, a, None] * h * eye[i] + p1[:, b, None] * h * eye[j]
                        acc = acc + w.reshape(wshape) * evaluate(shift)
                hess[..., i, j] = acc / h**2
                hess[..., j, i] = hess[..., i, j]
        return val, grad, hess


TAYLOR = TaylorProvider()


def get_provider(spec=None):
    """Resolve ``None``/``"taylor"``/``"fd"``/provider instance to a provider."""
    if spec is None or spec == "taylor":
        return TAYLOR
    if spec == "fd":
        return FiniteDifferenceProvider()
    if hasattr(spec, "derivatives"):
        return spec
    raise InvalidInput(f"unknown derivative provider {spec!r}")


# --------------------------------------------------------------------------
# pointwise geometry


class LocalGeometry:
    """Curvature quantities at a batch of points from ``g, ∂g, ∂²g``."""

    def __init__(self, g, dg, ddg):
        self.g = metric_value(g)
        self.dg = np.asarray(dg, dtype=float)
        self.ddg = np.asarray(ddg, dtype=float)
        self.dim = self.g.shape[-1]

    @cached_property
    def ginv(self) -> np.ndarray:
        return np.linalg.inv(self.g)

    @cached_property
    def _gamma_lower(self) -> np.ndarray:
        # Γ_{m,ij} = ½ (∂_i g_jm + ∂_j g_im − ∂_m g_ij)
        dg = self.dg
        return 0.5 * (
            np.einsum("...jmi->...mij", dg)
            + np.einsum("...imj->...mij", dg)
            - np.einsum("...ijm->...mij", dg)
        )

    @cached_property
    def christoffel(self) -> np.ndarray:
        """``Γ[k, i, j] = Γ^k_{ij}``."""
        return np.einsum("...km,...mij->...kij", self.ginv, self._gamma_lower)

    @cached_property
    def _dchristoffel(self) -> np.ndarray:
        # ∂_l Γ^k_{ij}, indexed [k, i, j, l]
        ddg = self.ddg
        dlow = 0.5 * (
            np.einsum("...jmil->...mijl", ddg)
            + np.einsum("...imjl->...mijl", ddg)
            - np.einsum("...ijml->...mijl", ddg)
        )
        dginv = -np.einsum("...kp,...pql,...qm->...kml", self.ginv, self.dg, self.ginv)
        return np.einsum("...kml,...mij->...kijl", dginv, self._gamma_lower) + np.einsum(
            "...km,...mijl->...kijl", self.ginv, dlow
        )

    @cached_property
    def riemann(self) -> np.ndarray:
        gam, dgam = self.christoffel, self._dchristoffel
        # q[i, j, l, m]: ∂_m-component of R(∂_i, ∂_j)∂_l
        first = np.einsum("...mjli->...ijlm", dgam)
        quad = np.einsum("...pjl,...mip->...ijlm", gam, gam)
        q = first - np.einsum("...ijlm->...jilm", first) + quad - np.einsum("...ijlm->...jilm", quad)
        return np.einsum("...ijlm,...mk->...ijkl", q, self.g)

    @cached_property
    def ricci(self) -> np.ndarray:
        ric = np.einsum("...il,...ijlk->...jk", self.ginv, self.riemann)
        return 0.5 * (ric + np.swapaxes(ric, -1, -2))

    @cached_property
    def scalar(self) -> np.ndarray:
        return np.einsum("...jk,...jk->...", self.ginv, self.ricci)

    def _need_dim3(self):
        if self.dim < 3:
            raise DimensionTooSmall(f"needs n >= 3, chart has n = {self.dim}")

    @cached_property
    def schouten(self) -> np.ndarray:
        return self.modified_schouten(1.0, 1.0)

    @cached_property
    def einstein(self) -> np.ndarray:
        return self.ricci - 0.5 * self.scalar[..., None, None] * self.g

    def modified_schouten(self, tau: float, zeta: float) -> np.ndarray:
        self._need_dim3()
        n = self.dim
        return zeta / (n - 2) * (self.ricci - tau / (2 * (n - 1)) * self.scalar[..., None, None] * self.g)

    @cached_property
    def weyl(self) -> np.ndarray:
        self._need_dim3()
        return self.riemann - kulkarni_nomizu(self.schouten, self.g)

    def weyl_residual(self) -> np.ndarray:
        """``‖W‖ / (‖Rm‖ + 1)`` per point (Frobenius norms)."""
        axes = (-4, -3, -2, -1)
        return np.sqrt((self.weyl**2).sum(axis=axes)) / (np.sqrt((self.riemann**2).sum(axis=axes)) + 1.0)

    def covariant_hessian(self, df, ddf) -> np.ndarray:
        """``∇²f_ij = ∂_i∂_j f − Γ^k_ij ∂_k f``."""
        h = np.asarray(ddf) - np.einsum("...kij,...k->...ij", self.christoffel, df)
        return 0.5 * (h + np.swapaxes(h, -1, -2))

    def trace(self, form) -> np.ndarray:
        return np.einsum("...ij,...ij->...", self.ginv, form)

    def norm2(self, covector) -> np.ndarray:
        return np.einsum("...ij,...i,...j->...", self.ginv, covector, covector)

    def sectional(self, x_vec, y_vec) -> np.ndarray:
        """Sectional curvature of the plane spanned by ``X, Y`` (broadcast over points)."""
        x_vec = np.asarray(x_vec, dtype=float)
        y_vec = np.asarray(y_vec, dtype=float)
        g = self.g
        gxx = np.einsum("...ij,...i,...j->...", g, x_vec, x_vec)
        gyy = np.einsum("...ij,...i,...j->...", g, y_vec, y_vec)
        gxy = np.einsum("...ij,...i,...j->...", g, x_vec, y_vec)
        denom = gxx * gyy - gxy**2
        ex = (x_vec**2).sum(axis=-1)
        ey = (y_vec**2).sum(axis=-1)
        if np.any(denom < 1e-14 * ex * ey) or np.any(ex * ey == 0):
            raise DegeneratePlane("sectional plane vectors are linearly dependent")
        num = np.einsum("...ijkl,...i,...j,...k,...l->...", self.riemann, x_vec, y_vec, x_vec, y_vec)
        return num / denom


def local_geometry(chart: ChartMetric, points, provider=None) -> LocalGeometry:
    provider = get_provider(provider)
    pts = _as_points(points, chart.dim)
    g, dg, ddg = provider.derivatives(chart.g, pts, box=(chart.lower, chart.upper))
    return LocalGeometry(g, dg, ddg)


def scalar_derivatives(chart: ChartMetric, f: ScalarField, points, provider=None):
    """Value, coordinate gradient and coordinate Hessian of a scalar field."""
    provider = get_provider(provider)
    pts = _as_points(points, chart.dim)
    return provider.derivatives(f, pts, box=(chart.lower, chart.upper))


def _single(x, out):
    # unbatched input point -> unbatched result
    return out[0] if np.ndim(x) == 1 else out


def christoffel(chart, x, provider=None):
    return _single(x, local_geometry(chart, x, provider).christoffel)


def riemann(chart, x, provider=None):
    return _single(x, local_geometry(chart, x, provider).riemann)


def ricci(chart, x, provider=None):
    return _single(x, local_geometry(chart, x, provider).ricci)


def scalar_curv(chart, x, provider=None):
    return _single(x, local_geometry(chart, x, provider).scalar)


def schouten(chart, x, provider=None):
    return _single(x, local_geometry(chart, x, provider).schouten)


def einstein(chart, x, provider=None):
    return _single(x, local_geometry(chart, x, provider).einstein)


def modified_schouten(chart, x, tau: float, zeta: float, provider=None):
    return _single(x, local_geometry(chart, x, provider).modified_schouten(tau, zeta))


def weyl(chart, x, provider=None):
    return _single(x, local_geometry(chart, x, provider).weyl)


def hessian_of_scalar(chart, x, f: ScalarField, provider=None):
    geo = local_geometry(chart, x, provider)
    _, df, ddf = scalar_derivatives(chart, f, x, provider)
    return _single(x, geo.covariant_hessian(df, ddf))


def laplacian(chart, x, f: ScalarField, provider=None):
    geo = local_geometry(chart, x, provider)
    _, df, ddf = scalar_derivatives(chart, f, x, provider)
    return _single(x, geo.trace(geo.covariant_hessian(df, ddf)))


def bakry_emery(chart, x, phi: ScalarField, n_dim: float, provider=None):
    """``Ric + ∇²φ − dφ⊗dφ / (N − n)``."""
    if n_dim == chart.dim:
        raise DegenerateParameter("N-Ricci curvature needs N != n")
    geo = local_geometry(chart, x, provider)
    _, dphi, ddphi = scalar_derivatives(chart, phi, x, provider)
    out = geo.ricci + geo.covariant_hessian(dphi, ddphi) - np.einsum("...i,...j->...ij", dphi, dphi) / (
        n_dim - chart.dim
    )
    return _single(x, out)


def sectional(chart, x, x_vec, y_vec, provider=None):
    return _single(x, local_geometry(chart, x, provider).sectional(x_vec, y_vec))


def conformal_metric(chart: ChartMetric, u: ScalarField) -> ChartMetric:
    """The chart with metric ``e^{2u} g``; same domain and boundary."""
    base = chart.g

    def g_u(x):
        factor = jet.exp(2.0 * u(x))
        return [[factor * gij for gij in row] for row in base(x)]

    return replace(chart, g=g_u, name=f"{chart.name}[conformal]")
