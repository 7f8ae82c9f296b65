import math

import numpy as np
import pytest

from uqpilot.errors import DomainError, SizeError
from uqpilot.sampling.quadrature import (
    clenshaw_curtis,
    gauss_hermite,
    gauss_legendre,
    tensor_grid,
)


def uniform_moment(k: int) -> float:
    # E[x^k] for x ~ uniform(-1, 1)
    return 0.0 if k % 2 else 1.0 / (k + 1)


def normal_moment(k: int) -> float:
    # E[z^k] for z ~ N(0,1): (k-1)!! for even k
    if k % 2:
        return 0.0
    return float(math.prod(range(k - 1, 0, -2))) if k else 1.0


def quad(rule, f):
    return float(np.sum(rule.weights * f(rule.nodes)))


class TestGaussLegendre:
    def test_one_point(self):
        r = gauss_legendre(1)
        assert r.nodes.tolist() == [0.0]
        assert r.weights.tolist() == [1.0]

    def test_two_point_closed_form(self):
        r = gauss_legendre(2)
        assert r.nodes == pytest.approx([-1 / math.sqrt(3), 1 / math.sqrt(3)])
        assert r.weights == pytest.approx([0.5, 0.5])

    def test_degree_eight_monomial(self):
        r = gauss_legendre(5)
        assert quad(r, lambda x: x**8) == pytest.approx(1 / 9, abs=1e-12)

    def test_exactness_through_2n_minus_1(self):
        for n in range(1, 11):
            r = gauss_legendre(n)
            for k in range(2 * n):
                assert quad(r, lambda x: x**k) == pytest.approx(
                    uniform_moment(k), abs=1e-10, rel=1e-10
                ), f"GL n={n} degree {k}"

    def test_invariants(self):
        for n in range(1, 11):
            r = gauss_legendre(n)
            assert np.all(np.diff(r.nodes) > 0)
            assert np.all(r.weights > 0)
            assert abs(r.weights.sum() - 1.0) < 1e-13


class TestGaussHermite:
    def test_one_point(self):
        r = gauss_hermite(1)
        assert r.nodes.tolist() == [0.0]
        assert r.weights.tolist() == [1.0]

    def test_two_point_probabilists(self):
        # degree-2 orthogonality by hand: nodes are roots of x^2 - 1
        r = gauss_hermite(2)
        assert r.nodes == pytest.approx([-1.0, 1.0])
        assert r.weights == pytest.approx([0.5, 0.5])

    def test_fourth_moment(self):
        r = gauss_hermite(4)
        assert quad(r, lambda x: x**4) == pytest.approx(3.0, abs=1e-12)

    def test_exactness_through_2n_minus_1(self):
        for n in range(1, 11):
            r = gauss_hermite(n)
            for k in range(2 * n):
                # summands reach 1e5 for high moments, so scale the
                # tolerance by the absolute-moment magnitude (float64
                # cannot cancel 17th powers to better than that)
                scale = max(1.0, quad(r, lambda x: np.abs(x) ** k))
                assert quad(r, lambda x: x**k) == pytest.approx(
                    normal_moment(k), abs=1e-10 * scale
                ), f"GH n={n} degree {k}"


class TestClenshawCurtis:
    def test_level_zero(self):
        r = clenshaw_curtis(0)
        assert r.nodes.tolist() == [0.0]
        assert r.weights.tolist() == [1.0]

    def test_level_one_nodes(self):
        assert clenshaw_curtis(1).nodes.tolist() == [-1.0, 0.0, 1.0]

    def test_level_three_integrates_x_squared(self):
        r = clenshaw_curtis(3)
        assert r.order == 9
        assert quad(r, lambda x: x**2) == pytest.approx(1 / 3, abs=1e-12)

    def test_growth(self):
        assert [clenshaw_curtis(l).order for l in range(5)] == [1, 3, 5, 9, 17]

    def test_nesting_exact_set_inclusion(self):
        for level in range(5):
            coarse = set(clenshaw_curtis(level).nodes.tolist())
            fine = set(clenshaw_curtis(level + 1).nodes.tolist())
            assert coarse <= fine, f"level {level} not nested in {level + 1}"

    def test_weights_sum_to_one(self):
        for level in range(7):
            assert abs(clenshaw_curtis(level).weights.sum() - 1.0) < 1e-13

    def test_negative_level_rejected(self):
        with pytest.raises(DomainError):
            clenshaw_curtis(-1)


class TestTensorGrid:
    def test_counting(self):
        pts, wts = tensor_grid([gauss_legendre(3), gauss_legendre(3)])
        assert pts.shape == (9, 2)
        assert len(wts) == 9

    def test_single_point_grid(self):
        pts, wts = tensor_grid([gauss_legendre(1), gauss_hermite(1), gauss_legendre(1)])
        assert pts.shape == (1, 3)
        assert pts.tolist() == [[0.0, 0.0, 0.0]]
        assert wts.tolist() == [1.0]

    def test_weight_sum(self):
        _, wts = tensor_grid([gauss_legendre(3), gauss_legendre(3)])
        assert abs(wts.sum() - 1.0) < 1e-13

    def test_weights_are_products(self):
        ra, rb = gauss_legendre(2), gauss_legendre(3)
        pts, wts = tensor_grid([ra, rb])
        k = 0
        for i in range(2):
            for j in range(3):
                assert wts[k] == pytest.approx(ra.weights[i] * rb.weights[j])
                assert pts[k].tolist() == [ra.nodes[i], rb.nodes[j]]
                k += 1

    def test_size_cap(self):
        rules = [gauss_legendre(100)] * 4
        with pytest.raises(SizeError):
            tensor_grid(rules)
