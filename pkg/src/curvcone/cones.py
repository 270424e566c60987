"""Concrete symmetric convex cones in R^n.

Three families are supported:

* ``gamma_k``: the Garding cone ``{sigma_1 > 0, ..., sigma_k > 0}``;
  ``k = n`` is the positive orthant, ``k = 1`` a half space.
* ``p_k``: every sum of ``k`` distinct components is positive.
* ``sum``: the half space ``sum(lambda) > 0`` (same set as ``gamma_k`` with k=1).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DimensionMismatch, InvalidInput, NoBoundaryFound
from .lintensor import elementary_symmetric

FAMILIES = ("gamma_k", "p_k", "sum")
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class ConeSpec:
    family: str
    dim: int
    k: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInput(f"unknown cone family {self.family!r}; expected one of {FAMILIES}")
        if self.dim < 1:
            raise InvalidInput(f"cone dimension must be positive, got {self.dim}")
        if self.family == "sum":
            object.__setattr__(self, "k", 1)
        elif not 1 <= self.k <= self.dim:
            raise InvalidInput(f"k={self.k} out of range 1..{self.dim}")

    @classmethod
    def gamma(cls, k: int, dim: int) -> "ConeSpec":
        return cls("gamma_k", dim, k)

    @classmethod
    def positive_orthant(cls, dim: int) -> "ConeSpec":
        return cls("gamma_k", dim, dim)

    @classmethod
    def pk(cls, k: int, dim: int) -> "ConeSpec":
        return cls("p_k", dim, k)

    @classmethod
    def half_space(cls, dim: int) -> "ConeSpec":
        return cls("sum", dim)

    @classmethod
    def from_dict(cls, data: dict, dim: int) -> "ConeSpec":
        family = data["family"]
        if family == "sum":
            return cls.half_space(dim)
        return cls(family, dim, int(data["k"]))

    def to_dict(self) -> dict:
        if self.family == "sum":
            return {"family": "sum"}
        return {"family": self.family, "k": self.k}

    def _check(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        if lam.shape[-1] != self.dim:
            raise DimensionMismatch(f"cone of dim {self.dim} given vector of length {lam.shape[-1]}")
        return lam

    def margin(self, lam):
        """Normalized slack of the defining inequalities (batched on the last axis).

        ``lam`` is first scaled to unit max-norm, so the result is invariant under
        positive scaling and under permutations. Positive exactly on the cone.
        """
        lam = self._check(lam)
        scale = np.abs(lam).max(axis=-1, keepdims=True)
        safe = np.where(scale > 0, scale, 1.0)
        unit = lam / safe
        n = self.dim
        if self.family == "p_k":
            out = np.sort(unit, axis=-1)[..., : self.k].sum(axis=-1)
        else:
            sig = elementary_symmetric(unit)
            binoms = np.array([comb(n, j) for j in range(1, self.k + 1)], dtype=float)
            out = (sig[..., 1 : self.k + 1] / binoms).min(axis=-1)
        out = np.where(scale[..., 0] > 0, out, 0.0)
        return out if out.ndim else float(out)

    def contains(self, lam):
        """Strict (open-cone) membership."""
        m = self.margin(lam)
        return np.asarray(m) > BOUNDARY_TOL if np.ndim(m) else bool(m > BOUNDARY_TOL)

    def on_boundary(self, lam, tol: float = BOUNDARY_TOL):
        return np.abs(self.margin(lam)) <= tol

    def rho(self, tol: float = 1e-9) -> float:
        """The ``t > 0`` with ``(1, ..., 1, 1 - t)`` on the cone boundary, by bisection."""
        n = self.dim
        t_max = 4.0 * n

        def ray(t):
            v = np.ones(n)
            v[-1] = 1.0 - t
            return v

        if self.contains(ray(t_max)):
            raise NoBoundaryFound(f"ray stays inside {self} up to t={t_max}")
        lo, hi = 0.0, t_max
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if self.contains(ray(mid)):
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def __str__(self) -> str:
        if self.family == "sum":
            return f"Sum(n={self.dim})"
        name = "Gamma" if self.family == "gamma_k" else "P"
        return f"{name}_{self.k}(n={self.dim})"
