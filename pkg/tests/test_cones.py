import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from curvcone.cones import ConeSpec
from curvcone.errors import DimensionMismatch, InvalidInput, NoBoundaryFound
from curvcone.lintensor import sigma_k


def test_membership_examples():
    assert ConeSpec.positive_orthant(3).contains([1.0, 1.0, 1.0])
    assert ConeSpec.pk(2, 3).contains([-0.5, 1.0, 1.0])
    assert not ConeSpec.gamma(2, 3).contains([2.0, 2.0, -1.0])


def test_margin_examples():
    assert ConeSpec.positive_orthant(4).margin(np.ones(4)) == pytest.approx(1.0)
    assert ConeSpec.gamma(2, 3).margin([2.0, 2.0, -1.0]) == pytest.approx(0.0, abs=1e-15)
    assert ConeSpec.gamma(2, 3).on_boundary([2.0, 2.0, -1.0])
    assert ConeSpec.gamma(2, 3).margin(np.zeros(3)) == 0.0


@pytest.mark.parametrize("n", range(1, 7))
def test_rho_gamma_k(n):
    for k in range(1, n + 1):
        assert ConeSpec.gamma(k, n).rho() == pytest.approx(n / k, abs=1e-8)


def test_rho_closed_form_cross_check():
    # σ_k(1,...,1,1−t) = C(n−1,k) + (1−t) C(n−1,k−1) vanishes at t = n/k
    n, k = 4, 2
    t = ConeSpec.gamma(k, n).rho()
    assert sigma_k(np.array([1.0] * (n - 1) + [1.0 - t]), k) == pytest.approx(0.0, abs=1e-7)
    assert t == pytest.approx(1 + (n - k) / k, abs=1e-8)


@pytest.mark.parametrize("n", [2, 3, 5, 6])
def test_rho_pk_and_half_space(n):
    assert ConeSpec.pk(2, n).rho() == pytest.approx(2.0, abs=1e-8)
    assert ConeSpec.half_space(n).rho() == pytest.approx(n, abs=1e-8)
    assert ConeSpec.positive_orthant(n).rho() == pytest.approx(1.0, abs=1e-8)


class _AlwaysInside:
    dim = 2

    def contains(self, lam):
        return True


def test_rho_without_boundary():
    with pytest.raises(NoBoundaryFound):
        ConeSpec.rho(_AlwaysInside())


def test_invalid_parameters():
    with pytest.raises(InvalidInput):
        ConeSpec.gamma(4, 3)
    with pytest.raises(InvalidInput):
        ConeSpec("cube", 3, 1)
    with pytest.raises(DimensionMismatch):
        ConeSpec.gamma(1, 3).margin([1.0, 2.0])


def _cones(n):
    return [ConeSpec.gamma(k, n) for k in range(1, n + 1)] + [ConeSpec.pk(k, n) for k in range(1, n + 1)]


@pytest.mark.parametrize("n", [3, 4, 5])
def test_convexity_spot_check(n, rng):
    for cone in _cones(n):
        pts = rng.normal(size=(6000, n)) + 0.8
        inside = pts[cone.contains(pts)][:2000]
        lam, mu = inside[: len(inside) // 2], inside[len(inside) // 2 : 2 * (len(inside) // 2)]
        assert len(lam) > 100
        assert np.all(cone.contains(0.5 * (lam + mu)))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_orthant_inside_every_cone_and_cone_inside_half_space(n, rng):
    orthant = rng.uniform(0.01, 2.0, size=(500, n))
    for cone in _cones(n):
        assert np.all(cone.contains(orthant))
    pts = rng.normal(size=(3000, n))
    half = ConeSpec.half_space(n)
    for cone in [ConeSpec.gamma(k, n) for k in range(1, n + 1)]:
        assert np.all(half.contains(pts[cone.contains(pts)]))


def test_gamma_k_nested(rng):
    n = 5
    pts = rng.normal(size=(4000, n)) + 0.5
    for k in range(1, n):
        inner = pts[ConeSpec.gamma(k + 1, n).contains(pts)]
        assert np.all(ConeSpec.gamma(k, n).contains(inner))


@settings(max_examples=80, deadline=None)
@given(arrays(np.float64, 4, elements=st.floats(-3, 3)), st.floats(0.01, 100.0))
def test_margin_scale_and_permutation_invariant(lam, t):
    # scaling a vector of subnormals can round it to zero, changing the input itself
    assume(not lam.any() or np.abs(lam).max() > 1e-100)
    for cone in _cones(4):
        m = cone.margin(lam)
        assert cone.margin(t * lam) == pytest.approx(m, abs=1e-12)
        for perm in itertools.islice(itertools.permutations(range(4)), 6):
            assert cone.margin(lam[list(perm)]) == pytest.approx(m, abs=1e-12)


def test_to_dict_round_trip():
    for cone in _cones(3) + [ConeSpec.half_space(3)]:
        assert ConeSpec.from_dict(cone.to_dict(), 3) == cone
