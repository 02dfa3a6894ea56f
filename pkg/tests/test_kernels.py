"""Kernel evaluation, Gram matrices, PSD checking, feature-space radius."""

import numpy as np
import pytest

from simcert import (
    GramMatrix,
    KernelSpec,
    SampleMatrix,
    ValidationError,
    data_radii,
    feature_space_radius,
    gram,
    kernel_eval,
    psd_check,
)
from simcert.core import DistanceMatrix


def _random_sample(rng, m=6, n=3, scale=1.0):
    return SampleMatrix(rng.normal(size=(m, n)) * scale)


class TestKernelSpec:
    def test_unknown_family_rejected(self):
        with pytest.raises(ValidationError):
            KernelSpec("sigmoid")

    def test_bad_parameters_rejected(self):
        with pytest.raises(ValidationError):
            KernelSpec("rbf", gamma=0.0)
        with pytest.raises(ValidationError):
            KernelSpec("polynomial", degree=0)
        with pytest.raises(ValidationError):
            KernelSpec("polynomial", coef0=-0.1)

    def test_dict_round_trip(self):
        spec = KernelSpec("polynomial", gamma=2.0, degree=3, coef0=0.5)
        assert KernelSpec.from_dict(spec.to_dict()) == spec


class TestKernelEval:
    def test_rbf_self_evaluation_is_one(self):
        spec = KernelSpec("rbf", gamma=0.3)
        rng = np.random.default_rng(0)
        for _ in range(10):
            x = rng.normal(size=4) * rng.uniform(0.1, 100.0)
            assert kernel_eval(spec, x, x) == 1.0

    def test_linear_dot_product(self):
        assert kernel_eval(KernelSpec("linear"), [1.0, 2.0], [3.0, 4.0]) == 11.0

    def test_polynomial_value(self):
        # x . y = 2, (2 + 1)^2 = 9
        spec = KernelSpec("polynomial", degree=2, coef0=1.0)
        assert kernel_eval(spec, [1.0, 2.0], [2.0, 0.0]) == 9.0

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            kernel_eval(KernelSpec("linear"), [1.0], [1.0, 2.0])


class TestGram:
    def test_rbf_unit_diagonal(self):
        s = _random_sample(np.random.default_rng(1), scale=10.0)
        k = gram(KernelSpec("rbf", gamma=0.5), s)
        assert np.all(np.diag(k.values) == 1.0)

    def test_linear_matches_outer_product(self):
        s = _random_sample(np.random.default_rng(2))
        k = gram(KernelSpec("linear"), s)
        np.testing.assert_allclose(k.values, s.values @ s.values.T, atol=1e-12)

    def test_identical_points_rbf(self):
        s = SampleMatrix([[1.0, 2.0], [1.0, 2.0]])
        k = gram(KernelSpec("rbf", gamma=3.0), s)
        assert np.array_equal(k.values, np.ones((2, 2)))

    def test_exactly_symmetric_as_stored(self):
        rng = np.random.default_rng(3)
        for family in ("linear", "rbf", "polynomial"):
            k = gram(KernelSpec(family), _random_sample(rng, m=9, n=4))
            assert np.array_equal(k.values, k.values.T)

    def test_matches_pairwise_eval(self):
        rng = np.random.default_rng(4)
        s = _random_sample(rng, m=5, n=2)
        spec = KernelSpec("polynomial", degree=3, coef0=0.5)
        k = gram(spec, s)
        for i in range(5):
            for j in range(5):
                expected = kernel_eval(spec, s.values[i], s.values[j])
                assert k.values[i, j] == pytest.approx(expected, rel=1e-12)


class TestPsdCheck:
    def test_identity_passes(self):
        res = psd_check(GramMatrix(np.eye(2)), tol=0.0)
        assert res.passed
        assert res.min_eigenvalue == pytest.approx(1.0, abs=1e-12)

    def test_indefinite_matrix_fails(self):
        # eigenvalues 3 and -1
        res = psd_check(GramMatrix([[1.0, 2.0], [2.0, 1.0]]), tol=1e-8)
        assert not res.passed
        assert res.min_eigenvalue == pytest.approx(-1.0, abs=1e-12)

    def test_rbf_gram_on_distinct_points_passes(self):
        for seed in range(5):
            s = _random_sample(np.random.default_rng(seed), m=8, n=3)
            assert psd_check(gram(KernelSpec("rbf", gamma=0.7), s)).passed

    def test_gram_side_squared_distances_nonnegative(self):
        rng = np.random.default_rng(6)
        for family in ("linear", "rbf", "polynomial"):
            k = gram(KernelSpec(family), _random_sample(rng, m=7, n=3)).values
            d = np.diag(k)
            sq = d[:, None] + d[None, :] - 2.0 * k
            assert sq.min() >= -1e-9


class TestFeatureSpaceRadius:
    def test_rbf_radius_is_exactly_one(self):
        rng = np.random.default_rng(7)
        for seed in range(5):
            s = _random_sample(np.random.default_rng(seed), m=6, n=4, scale=50.0)
            q = feature_space_radius(gram(KernelSpec("rbf", gamma=2.0), s))
            assert q == 1.0

    def test_linear_radius_is_max_feature_norm(self):
        # K(x, x) = ||x||^2, so q = max norm = 5 for the 3-4-5 point
        s = SampleMatrix([[3.0, 4.0], [0.0, 1.0]])
        assert feature_space_radius(gram(KernelSpec("linear"), s)) == 5.0

    def test_all_zero_sample_linear_radius_zero(self):
        s = SampleMatrix(np.zeros((3, 2)))
        assert feature_space_radius(gram(KernelSpec("linear"), s)) == 0.0

    def test_linear_radius_matches_data_radii(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            s = _random_sample(rng, m=6, n=3, scale=rng.uniform(0.1, 10.0))
            d = DistanceMatrix(np.zeros((6, 6)))
            q = feature_space_radius(gram(KernelSpec("linear"), s))
            assert q == pytest.approx(data_radii(s, d).r, abs=1e-12)
