import numpy as np
import pytest

from curvcone import jet
from curvcone.jet import Jet
from curvcone.geometry import FiniteDifferenceProvider, TaylorProvider


def _exact(f, points):
    return TaylorProvider().derivatives(f, points)


def test_variables_seed_identity():
    xs = Jet.variables(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert np.allclose(xs[0].val, [1.0, 3.0])
    assert np.allclose(xs[1].grad, [[0.0, 1.0], [0.0, 1.0]])
    assert np.all(xs[0].hess == 0)


def test_product_rule_polynomial():
    pts = np.array([[0.3, -1.2], [2.0, 0.5]])
    val, grad, hess = _exact(lambda x: x[0] ** 3 * x[1] + 2.0 * x[1] ** 2, pts)
    x, y = pts.T
    assert np.allclose(val, x**3 * y + 2 * y**2)
    assert np.allclose(grad, np.stack([3 * x**2 * y, x**3 + 4 * y], axis=1))
    expected = np.array([[[6 * a * b, 3 * a * a], [3 * a * a, 4.0]] for a, b in pts])
    assert np.allclose(hess, expected)


@pytest.mark.parametrize(
    "f, f1, f2",
    [
        (jet.exp, np.exp, np.exp),
        (jet.log, lambda t: 1 / t, lambda t: -1 / t**2),
        (jet.sqrt, lambda t: 0.5 / np.sqrt(t), lambda t: -0.25 * t**-1.5),
        (jet.sin, np.cos, lambda t: -np.sin(t)),
        (jet.cos, lambda t: -np.sin(t), lambda t: -np.cos(t)),
        (jet.tanh, lambda t: 1 - np.tanh(t) ** 2, lambda t: -2 * np.tanh(t) * (1 - np.tanh(t) ** 2)),
    ],
)
def test_univariate_chain_rule(f, f1, f2):
    t = np.array([[0.4], [1.3], [2.2]])
    _, grad, hess = _exact(lambda x: f(x[0]), t)
    assert np.allclose(grad[:, 0], f1(t[:, 0]), rtol=1e-13)
    assert np.allclose(hess[:, 0, 0], f2(t[:, 0]), rtol=1e-12)


def test_division_and_powers_against_finite_differences(rng):
    def f(x):
        return (1.0 + x[0] ** 2) ** -1.5 / (2.0 + x[1]) + 3.0 ** x[2] - 1.0 / (1.0 + x[2] ** 2)

    pts = rng.uniform(-0.5, 0.5, size=(6, 3))
    exact = _exact(f, pts)
    fd = FiniteDifferenceProvider(4, 1e-3).derivatives(f, pts)
    for a, b in zip(exact, fd):
        assert np.allclose(a, b, atol=1e-8)


def test_functions_accept_plain_floats():
    assert jet.exp(0.0) == 1.0
    assert jet.norm2([3.0, 4.0]) == 25.0
    assert np.isclose(jet.sqrt(np.array([4.0]))[0], 2.0)
