"""Curvature of ``g_u = e^{2u} g`` from the jet of ``u``.

Every formula is expressed with respect to the background metric ``g``;
eigenvalues relative to ``g_u`` differ by the positive factor ``e^{-2u}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import LocalGeometry, bakry_emery, conformal_metric, local_geometry, scalar_derivatives
from .lintensor import generalized_eigenvalues


@dataclass(frozen=True)
class ConformalJet:
    """``u``, its coordinate gradient, covariant Hessian and ``|∇u|²_g`` (batched)."""

    u: np.ndarray
    grad_u: np.ndarray
    hess_u: np.ndarray
    norm2_grad: np.ndarray

    @property
    def du_du(self) -> np.ndarray:
        return np.einsum("...i,...j->...ij", self.grad_u, self.grad_u)

    @classmethod
    def zero(cls, dim: int, npts: int = 1) -> "ConformalJet":
        return cls(np.zeros(npts), np.zeros((npts, dim)), np.zeros((npts, dim, dim)), np.zeros(npts))

    @classmethod
    def from_derivatives(cls, geo: LocalGeometry, val, grad, hess) -> "ConformalJet":
        return cls(
            np.asarray(val, dtype=float),
            np.asarray(grad, dtype=float),
            geo.covariant_hessian(grad, hess),
            geo.norm2(grad),
        )


def conformal_jet(chart, u, points, provider=None, geo: LocalGeometry | None = None) -> ConformalJet:
    geo = geo if geo is not None else local_geometry(chart, points, provider)
    val, grad, hess = scalar_derivatives(chart, u, points, provider)
    return ConformalJet.from_derivatives(geo, val, grad, hess)


def _laplacian(jet: ConformalJet, g) -> np.ndarray:
    return np.einsum("...ij,...ij->...", np.linalg.inv(g), jet.hess_u)


def minus_schouten_conformal(a_g, jet: ConformalJet, g) -> np.ndarray:
    """``−A_{g_u} = −A_g + ∇²u + ½|∇u|² g − du⊗du``."""
    g = np.asarray(g, dtype=float)
    return -np.asarray(a_g) + jet.hess_u + 0.5 * jet.norm2_grad[..., None, None] * g - jet.du_du


def modified_schouten_conformal(a_tz, jet: ConformalJet, g, tau: float, zeta: float) -> np.ndarray:
    """``A^{τ,ζ}_{g_u}`` from ``A^{τ,ζ}_g`` and the jet of ``u``."""
    g = np.asarray(g, dtype=float)
    n = g.shape[-1]
    lap = _laplacian(jet, g)
    return (
        np.asarray(a_tz)
        + zeta * (tau - 1) / (n - 2) * lap[..., None, None] * g
        - zeta * jet.hess_u
        + zeta * (tau - 2) / 2 * jet.norm2_grad[..., None, None] * g
        + zeta * jet.du_du
    )


def bakry_emery_conformal(ric_nmu_g, jet: ConformalJet, g, grad_phi) -> np.ndarray:
    """``−Ric_{N,μ}(g_u)`` with the potential held fixed under the conformal change."""
    g = np.asarray(g, dtype=float)
    n = g.shape[-1]
    grad_phi = np.asarray(grad_phi, dtype=float)
    ginv = np.linalg.inv(g)
    lap = np.einsum("...ij,...ij->...", ginv, jet.hess_u)
    du_dphi = np.einsum("...i,...j->...ij", jet.grad_u, grad_phi)
    inner = np.einsum("...ij,...i,...j->...", ginv, jet.grad_u, grad_phi)
    return (
        lap[..., None, None] * g
        + (n - 2) * jet.hess_u
        + (n - 2) * (jet.norm2_grad[..., None, None] * g - jet.du_du)
        + du_dphi
        + np.swapaxes(du_dphi, -1, -2)
        - inner[..., None, None] * g
        - np.asarray(ric_nmu_g)
    )


def cone_membership_conformal_invariance(a, u, g, cone):
    """Membership of ``λ(g⁻¹A)`` and of ``λ(g_u⁻¹A)`` for ``g_u = e^{2u} g``."""
    g = np.asarray(g, dtype=float)
    u = np.asarray(u, dtype=float)
    lam_g = generalized_eigenvalues(a, g)
    lam_gu = generalized_eigenvalues(a, np.exp(2 * u)[..., None, None] * g)
    return cone.contains(lam_g), cone.contains(lam_gu)


def relative_frobenius(a, b, floor: float = 1e-12) -> np.ndarray:
    """``‖a − b‖ / ‖b‖`` per point over the trailing two axes."""
    a, b = np.asarray(a), np.asarray(b)
    num = np.sqrt(((a - b) ** 2).sum(axis=(-1, -2)))
    return num / np.maximum(np.sqrt((b**2).sum(axis=(-1, -2))), floor)


def bakry_emery_crosscheck(chart, u, phi, n_dim: float, points, provider=None) -> dict:
    """Compare the conformal N-Ricci formula with direct recomputation on ``g_u``.

    The potential of ``g_u`` is taken two ways: unchanged (``φ_u = φ``), or
    adjusted so the measure ``e^{−φ} dvol`` is unchanged (``φ_u = φ + n u``).
    Returns the worst relative Frobenius residual for each convention.
    """
    n = chart.dim
    geo = local_geometry(chart, points, provider)
    jet = conformal_jet(chart, u, points, provider, geo=geo)
    _, dphi, _ = scalar_derivatives(chart, phi, points, provider)
    formula = bakry_emery_conformal(bakry_emery(chart, points, phi, n_dim, provider), jet, geo.g, dphi)
    chart_u = conformal_metric(chart, u)

    def phi_measure(x):
        return phi(x) + n * u(x)

    out = {}
    for name, potential in (("fixed_potential", phi), ("fixed_measure", phi_measure)):
        direct = -bakry_emery(chart_u, points, potential, n_dim, provider)
        out[name] = float(relative_frobenius(formula, direct).max())
    return out
