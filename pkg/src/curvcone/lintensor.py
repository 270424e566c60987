"""Pointwise multilinear algebra on symmetric forms.

All functions accept a leading batch shape: a symmetric form is an array
``(..., n, n)`` and a 4-tensor is ``(..., n, n, n, n)``.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, InvalidInput, MetricNotSPD

ASYMMETRY_TOL = 1e-12


def sym_form(a, *, tol: float = ASYMMETRY_TOL) -> np.ndarray:
    """Validate and symmetrize a (batch of) symmetric bilinear form(s).

    Round-off asymmetry is removed by ``(A + A^T)/2``; anything larger than
    ``tol`` relative to the entry scale is rejected.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise InvalidInput(f"expected (..., n, n) array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("symmetric form has non-finite entries")
    at = np.swapaxes(a, -1, -2)
    scale = np.maximum(np.abs(a).max(axis=(-1, -2)), 1e-300)
    asym = np.abs(a - at).max(axis=(-1, -2))
    if np.any(asym > tol * scale):
        raise InvalidInput(f"form is not symmetric (relative asymmetry {np.max(asym / scale):.3g})")
    return 0.5 * (a + at)


def metric_value(g) -> np.ndarray:
    """Validate a (batch of) metric value(s): symmetric positive definite."""
    g = sym_form(g)
    _cholesky(g)
    return g


def _cholesky(g: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise MetricNotSPD("metric is not positive definite") from exc


def _whiten(a, g):
    a = np.asarray(a, dtype=float)
    g = np.asarray(g, dtype=float)
    if a.shape[-2:] != g.shape[-2:]:
        raise DimensionMismatch(f"form {a.shape[-2:]} vs metric {g.shape[-2:]}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("NaN or Inf in symmetric form")
    if not np.all(np.isfinite(g)):
        raise InvalidInput("NaN or Inf in metric")
    low = _cholesky(g)
    linv = np.linalg.inv(low)
    m = linv @ a @ np.swapaxes(linv, -1, -2)
    return 0.5 * (m + np.swapaxes(m, -1, -2)), linv


def generalized_eigenvalues(a, g) -> np.ndarray:
    """Roots of ``det(A - lambda g) = 0``, ascending along the last axis."""
    m, _ = _whiten(a, g)
    return np.linalg.eigvalsh(m)


def generalized_eigh(a, g):
    """Eigenvalues (ascending) and ``g``-orthonormal eigenvectors (columns)."""
    m, linv = _whiten(a, g)
    w, q = np.linalg.eigh(m)
    return w, np.swapaxes(linv, -1, -2) @ q


def kulkarni_nomizu(a, b) -> np.ndarray:
    """``(A ⊙ B)_{ijkl} = A_ik B_jl + A_jl B_ik - A_il B_jk - A_jk B_il``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-2:] != b.shape[-2:]:
        raise DimensionMismatch(f"{a.shape[-2:]} vs {b.shape[-2:]}")
    t = np.einsum("...ik,...jl->...ijkl", a, b)
    s = np.einsum("...il,...jk->...ijkl", a, b)
    return t + np.einsum("...ijkl->...jilk", t) - s - np.einsum("...ijkl->...jilk", s)


def elementary_symmetric(lam) -> np.ndarray:
    """All elementary symmetric polynomials ``sigma_0..sigma_n`` (last axis)."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    e = np.zeros(lam.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for i in range(n):
        # RHS is evaluated before assignment, so each lambda_i enters sigma_j once
        e[..., 1 : i + 2] = e[..., 1 : i + 2] + lam[..., i : i + 1] * e[..., 0 : i + 1]
    return e


def sigma_k(lam, k: int):
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not 1 <= k <= n:
        raise InvalidInput(f"k={k} out of range 1..{n}")
    return elementary_symmetric(lam)[..., k]


def curvature_symmetry_residual(rm) -> float:
    """Largest violation of the algebraic curvature-tensor symmetries.

    Measured relative to ``max(1, max|R|)``.
    """
    rm = np.asarray(rm, dtype=float)
    scale = max(float(np.abs(rm).max()), 1.0)
    anti1 = rm + np.einsum("...ijkl->...jikl", rm)
    anti2 = rm + np.einsum("...ijkl->...ijlk", rm)
    pair = rm - np.einsum("...ijkl->...klij", rm)
    bianchi = rm + np.einsum("...ijkl->...iklj", rm) + np.einsum("...ijkl->...iljk", rm)
    worst = max(np.abs(x).max() for x in (anti1, anti2, pair, bianchi))
    return float(worst) / scale
