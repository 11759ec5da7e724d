"""Tests for the frozen cosine feature basis."""
from __future__ import annotations

import math

import numpy as np
import pytest

from eigenacs.exceptions import ConfigurationError, UnsupportedOrderError
from eigenacs.features import DerivMultiIndex, build_basis, eval_features, evaluate_field, zero_index


def _fd_derivative(basis, points, orders, h):
    """Central finite difference of the plain features, one axis at a time."""
    stencils = {
        1: ((-1, -0.5), (1, 0.5)),
        2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
        3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
        4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
    }

    def apply(func, axis, order):
        def derived(pts):
            total = 0.0
            for shift, coef in stencils[order]:
                moved = pts.copy()
                moved[:, axis] += shift * h
                total = total + coef * func(moved)
            return total / h ** order
        return derived

    func = lambda pts: eval_features(basis, pts)  # noqa: E731
    for axis, order in enumerate(orders):
        if order:
            func = apply(func, axis, order)
    return func(points)


def _richardson_derivative(basis, points, orders, h):
    """Central differences at h and h/2 with the leading h**2 error removed."""
    coarse = _fd_derivative(basis, points, orders, h)
    fine = _fd_derivative(basis, points, orders, h / 2)
    return (4.0 * fine - coarse) / 3.0


# ---------------------------------------------------------------------------
# Multi-indices
# ---------------------------------------------------------------------------

class TestDerivMultiIndex:
    """Tests for derivative multi-index validation."""

    def test_order_and_dim(self):
        index = DerivMultiIndex.of(2, 1)
        assert index.order == 3
        assert index.dim == 2

    def test_zero_index(self):
        assert zero_index(2) == DerivMultiIndex((0, 0))
        assert zero_index(1).order == 0

    def test_order_above_four_rejected(self):
        with pytest.raises(UnsupportedOrderError, match="exceeds 4"):
            DerivMultiIndex.of(3, 2)

    def test_negative_order_rejected(self):
        with pytest.raises(ConfigurationError, match="negative"):
            DerivMultiIndex.of(-1)

    def test_hashable_for_caching(self):
        cache = {DerivMultiIndex.of(2, 0): 1}
        assert DerivMultiIndex.of(2, 0) in cache


# ---------------------------------------------------------------------------
# build_basis
# ---------------------------------------------------------------------------

class TestBuildBasis:
    """Tests for frequency and phase sampling."""

    def test_shapes_and_range(self):
        basis = build_basis(200, 2, 3.0, seed=7)
        assert basis.frequencies.shape == (200, 2)
        assert basis.phases.shape == (200,)
        assert np.all(np.abs(basis.frequencies) <= 3.0)
        assert np.all(np.abs(basis.phases) <= 3.0)

    def test_same_seed_same_basis(self):
        a = build_basis(50, 1, 1.0, seed=3)
        b = build_basis(50, 1, 1.0, seed=3)
        np.testing.assert_array_equal(a.frequencies, b.frequencies)
        np.testing.assert_array_equal(a.phases, b.phases)

    def test_different_seed_different_basis(self):
        a = build_basis(50, 1, 1.0, seed=3)
        b = build_basis(50, 1, 1.0, seed=4)
        assert not np.array_equal(a.frequencies, b.frequencies)

    def test_arrays_are_read_only(self):
        basis = build_basis(10, 1, 1.0, seed=0)
        with pytest.raises(ValueError):
            basis.frequencies[0, 0] = 0.0

    def test_width_one_2d(self):
        basis = build_basis(1, 2, 1.0, seed=0)
        assert basis.frequencies.shape == (1, 2)

    def test_dimension_three_rejected(self):
        with pytest.raises(ConfigurationError, match="basis.dim"):
            build_basis(10, 3, 1.0, seed=0)

    def test_zero_width_rejected(self):
        with pytest.raises(ConfigurationError, match="basis.width"):
            build_basis(0, 1, 1.0, seed=0)

    def test_non_positive_bandwidth_rejected(self):
        with pytest.raises(ConfigurationError, match="basis.bandwidth"):
            build_basis(10, 1, 0.0, seed=0)

    def test_as_dict(self):
        basis = build_basis(10, 2, 2.5, seed=9)
        assert basis.as_dict() == {"width": 10, "dim": 2, "bandwidth": 2.5, "seed": 9}


# ---------------------------------------------------------------------------
# eval_features
# ---------------------------------------------------------------------------

class TestEvalFeatures:
    """Tests for closed-form feature derivatives."""

    def setup_method(self):
        self.basis_1d = build_basis(40, 1, 2.0, seed=1)
        self.basis_2d = build_basis(40, 2, 2.0, seed=2)
        rng = np.random.default_rng(5)
        self.points_1d = rng.uniform(0.0, 1.0, size=(100, 1))
        self.points_2d = rng.uniform(0.0, 1.0, size=(100, 2))

    def test_plain_features(self):
        expected = np.cos(self.points_2d @ self.basis_2d.frequencies.T + self.basis_2d.phases)
        np.testing.assert_allclose(eval_features(self.basis_2d, self.points_2d), expected)

    def test_zero_point_values(self):
        """At x = 0 every feature equals cos(b_m)."""
        values = eval_features(self.basis_1d, np.zeros((1, 1)))
        np.testing.assert_allclose(values[0], np.cos(self.basis_1d.phases))

    def test_fourth_derivative_1d_closed_form(self):
        values = eval_features(self.basis_1d, self.points_1d, DerivMultiIndex.of(4))
        arg = self.points_1d @ self.basis_1d.frequencies.T + self.basis_1d.phases
        np.testing.assert_allclose(values, self.basis_1d.frequencies[:, 0] ** 4 * np.cos(arg))

    @pytest.mark.parametrize(
        ("orders", "h", "tol"),
        [((1,), 1e-5, 1e-6), ((2,), 1e-4, 1e-6)],
    )
    def test_match_finite_differences_1d(self, orders, h, tol):
        analytic = eval_features(self.basis_1d, self.points_1d, DerivMultiIndex(orders))
        numeric = _fd_derivative(self.basis_1d, self.points_1d, orders, h)
        np.testing.assert_allclose(numeric, analytic, rtol=tol, atol=tol * np.abs(analytic).max())

    @pytest.mark.parametrize("orders", [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)])
    def test_low_orders_match_finite_differences_2d(self, orders):
        analytic = eval_features(self.basis_2d, self.points_2d, DerivMultiIndex(orders))
        numeric = _fd_derivative(self.basis_2d, self.points_2d, orders, 1e-4)
        np.testing.assert_allclose(numeric, analytic, rtol=1e-5, atol=1e-5 * np.abs(analytic).max())

    @pytest.mark.parametrize("orders", [(3,), (4,)])
    def test_high_orders_match_extrapolated_differences_1d(self, orders):
        analytic = eval_features(self.basis_1d, self.points_1d, DerivMultiIndex(orders))
        numeric = _richardson_derivative(self.basis_1d, self.points_1d, orders, 2e-2)
        np.testing.assert_allclose(numeric, analytic, rtol=1e-6, atol=1e-6 * np.abs(analytic).max())

    @pytest.mark.parametrize("orders", [(2, 1), (2, 2), (4, 0), (3, 1), (0, 4)])
    def test_high_orders_match_extrapolated_differences_2d(self, orders):
        analytic = eval_features(self.basis_2d, self.points_2d, DerivMultiIndex(orders))
        numeric = _richardson_derivative(self.basis_2d, self.points_2d, orders, 2e-2)
        np.testing.assert_allclose(numeric, analytic, rtol=1e-6, atol=1e-6 * np.abs(analytic).max())

    @pytest.mark.parametrize("orders", [(0, 0), (1, 0), (0, 2), (2, 1), (1, 3), (2, 2), (0, 4)])
    def test_every_order_is_a_phase_shift(self, orders):
        """Each derivative is the plain feature shifted by a quarter period per order."""
        analytic = eval_features(self.basis_2d, self.points_2d, DerivMultiIndex(orders))
        freqs = self.basis_2d.frequencies
        scale = freqs[:, 0] ** orders[0] * freqs[:, 1] ** orders[1]
        arg = self.points_2d @ freqs.T + self.basis_2d.phases
        expected = scale * np.cos(arg + sum(orders) * math.pi / 2)
        np.testing.assert_allclose(analytic, expected, rtol=1e-6, atol=1e-12)

    def test_mixed_derivative_commutes(self):
        """The closed form depends only on the multi-index, not on the order of differentiation."""
        a = eval_features(self.basis_2d, self.points_2d, DerivMultiIndex.of(1, 2))
        arg = self.points_2d @ self.basis_2d.frequencies.T + self.basis_2d.phases
        scale = self.basis_2d.frequencies[:, 0] * self.basis_2d.frequencies[:, 1] ** 2
        np.testing.assert_allclose(a, scale * np.sin(arg))

    def test_one_dimensional_points_accepted_for_1d_basis(self):
        flat = eval_features(self.basis_1d, self.points_1d[:, 0])
        np.testing.assert_allclose(flat, eval_features(self.basis_1d, self.points_1d))

    def test_wrong_point_dimension_rejected(self):
        with pytest.raises(ConfigurationError, match="points"):
            eval_features(self.basis_2d, self.points_1d)

    def test_multi_index_dimension_mismatch_rejected(self):
        with pytest.raises(ConfigurationError, match="does not match"):
            eval_features(self.basis_2d, self.points_2d, DerivMultiIndex.of(2))


class TestEvaluateField:
    """Tests for network output evaluation."""

    def test_linear_in_weights(self):
        basis = build_basis(30, 1, 1.0, seed=0)
        points = np.linspace(0.0, 1.0, 11)
        w1 = np.arange(30.0)
        w2 = np.ones(30)
        np.testing.assert_allclose(
            evaluate_field(basis, 2 * w1 + w2, points),
            2 * evaluate_field(basis, w1, points) + evaluate_field(basis, w2, points),
        )

    def test_single_feature(self):
        basis = build_basis(1, 1, 1.0, seed=0)
        x = 0.3
        expected = math.cos(basis.frequencies[0, 0] * x + basis.phases[0])
        assert evaluate_field(basis, [1.0], [[x]])[0] == pytest.approx(expected)

    def test_weight_shape_checked(self):
        basis = build_basis(5, 1, 1.0, seed=0)
        with pytest.raises(ConfigurationError, match="weights"):
            evaluate_field(basis, np.ones(4), [[0.5]])
