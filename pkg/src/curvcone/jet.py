"""Batched second-order Taylor jets.

A :class:`Jet` carries the value, gradient and Hessian of a scalar function
at a batch of points. Arithmetic on jets propagates all three exactly, so
closed-form metric and scalar fields written with ``+ - * / **`` and the
elementary functions below yield derivatives accurate to round-off.

Fields are written once and evaluated either with plain floats/ndarrays
(finite differences) or with jets (forward Taylor)::

    def f(x):
        return jet.exp(x[0] * x[1]) + x[2] ** 2
"""

from __future__ import annotations

import numpy as np


class Jet:
    """Value, gradient (``..., d``) and Hessian (``..., d, d``) of a scalar."""

    __slots__ = ("val", "grad", "hess")
    __array_ufunc__ = None  # ndarray (op) Jet defers to Jet.__rop__

    def __init__(self, val, grad, hess):
        self.val = np.asarray(val, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)

    @classmethod
    def variables(cls, points) -> list["Jet"]:
        """Seed coordinate jets ``x_i`` at ``points`` of shape ``(P, d)``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        npts, d = points.shape
        eye = np.eye(d)
        hess = np.zeros((npts, d, d))
        return [
            cls(points[:, i], np.broadcast_to(eye[i], (npts, d)).copy(), hess)
            for i in range(d)
        ]

    @property
    def dim(self) -> int:
        return self.grad.shape[-1]

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        c = np.asarray(other, dtype=float)
        val = np.broadcast_to(c, self.val.shape)
        return Jet(val, np.zeros_like(self.grad), np.zeros_like(self.hess))

    def _chain(self, f0, f1, f2) -> "Jet":
        # composition with a univariate function given f, f', f'' at self.val
        g = self.grad
        outer = g[..., :, None] * g[..., None, :]
        return Jet(
            f0,
            f1[..., None] * g,
            f1[..., None, None] * self.hess + f2[..., None, None] * outer,
        )

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.val + np.asarray(other, dtype=float), self.grad, self.hess)
        return Jet(self.val + other.val, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.grad, -self.hess)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=float)
            return Jet(self.val * c, self.grad * c[..., None], self.hess * c[..., None, None])
        a, b = self, other
        cross = a.grad[..., :, None] * b.grad[..., None, :]
        return Jet(
            a.val * b.val,
            a.val[..., None] * b.grad + b.val[..., None] * a.grad,
            a.val[..., None, None] * b.hess
            + b.val[..., None, None] * a.hess
            + cross
            + np.swapaxes(cross, -1, -2),
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        x = self.val
        inv = 1.0 / x
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(p * log(self))
        p = float(p)
        if p == 2.0:
            return self * self
        x = self.val
        return self._chain(x**p, p * x ** (p - 1), p * (p - 1) * x ** (p - 2))

    def __rpow__(self, base):
        return exp(self * np.log(base))

    def __repr__(self) -> str:
        return f"Jet(val={self.val!r}, grad={self.grad!r})"



def exp(x):
    if isinstance(x, Jet):
        e = np.exp(x.val)
        return x._chain(e, e, e)
    return np.exp(x)


def log(x):
    if isinstance(x, Jet):
        inv = 1.0 / x.val
        return x._chain(np.log(x.val), inv, -inv * inv)
    return np.log(x)


def sqrt(x):
    if isinstance(x, Jet):
        s = np.sqrt(x.val)
        return x._chain(s, 0.5 / s, -0.25 / (s * x.val))
    return np.sqrt(x)


def sin(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.val), np.cos(x.val)
        return x._chain(s, c, -s)
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.val), np.cos(x.val)
        return x._chain(c, -s, -c)
    return np.cos(x)


def tanh(x):
    if isinstance(x, Jet):
        t = np.tanh(x.val)
        d = 1.0 - t * t
        return x._chain(t, d, -2.0 * t * d)
    return np.tanh(x)


def norm2(x) -> object:
    """Squared Euclidean norm of a coordinate sequence."""
    total = x[0] * x[0]
    for xi in x[1:]:
        total = total + xi * xi
    return total


def stack(entries, npts: int, dim: int):
    """Split a scalar or nested list of jets/constants into arrays.

    Leaves may be jets, scalars or per-point arrays of shape ``(P,)``;
    nesting is by lists/tuples only. Returns ``(val, grad, hess)`` with the
    entry shape after the batch axis and derivative axes last:
    ``val[P, *S]``, ``grad[P, *S, d]``, ``hess[P, *S, d, d]``.
    """
    shape = _nest_shape(entries)
    val = np.zeros((npts,) + shape)
    grad = np.zeros((npts,) + shape + (dim,))
    hess = np.zeros((npts,) + shape + (dim, dim))
    for idx in np.ndindex(*shape):
        e = entries
        for i in idx:
            e = e[i]
        sl = (slice(None),) + idx
        if isinstance(e, Jet):
            val[sl] = e.val
            grad[sl] = e.grad
            hess[sl] = e.hess
        else:
            val[sl] = e
    return val, grad, hess


def stack_values(entries, npts: int) -> np.ndarray:
    """Like :func:`stack` for plain (non-jet) leaves; returns ``val[P, *S]``."""
    shape = _nest_shape(entries)
    val = np.zeros((npts,) + shape)
    for idx in np.ndindex(*shape):
        e = entries
        for i in idx:
            e = e[i]
        val[(slice(None),) + idx] = e.val if isinstance(e, Jet) else e
    return val


def _nest_shape(entries) -> tuple:
    if isinstance(entries, (list, tuple)):
        return (len(entries),) + (_nest_shape(entries[0]) if entries else ())
    return ()
