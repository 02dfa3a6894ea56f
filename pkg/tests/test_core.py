"""Containers, validation, stress loss, and CSV round trips."""

import numpy as np
import pytest

from simcert import (
    ConfusionMatrix,
    DistanceMatrix,
    SampleMatrix,
    ValidationError,
    confusion_to_distance,
    data_radii,
    empirical_risk,
    pairwise_distances,
    read_matrix_csv,
    validate_distance_matrix,
    write_matrix_csv,
)


class TestSampleMatrix:
    def test_rejects_single_point(self):
        with pytest.raises(ValidationError):
            SampleMatrix([[1.0, 2.0]])

    def test_rejects_non_finite(self):
        with pytest.raises(ValidationError):
            SampleMatrix([[0.0, np.nan], [1.0, 2.0]])

    def test_values_are_immutable(self):
        s = SampleMatrix([[0.0, 1.0], [2.0, 3.0]])
        with pytest.raises(ValueError):
            s.values[0, 0] = 5.0

    def test_shape_accessors(self):
        s = SampleMatrix(np.arange(6.0).reshape(3, 2))
        assert s.m == 3
        assert s.n_features == 2


class TestValidateDistanceMatrix:
    def test_exact_symmetric_metric_passes(self):
        d = validate_distance_matrix([[0.0, 1.0], [1.0, 0.0]], tol=0.0)
        assert np.array_equal(d.values, [[0.0, 1.0], [1.0, 0.0]])

    def test_asymmetry_beyond_tol_rejected(self):
        with pytest.raises(ValidationError, match="asymmetry"):
            validate_distance_matrix([[0.0, 1.0], [0.9, 0.0]], tol=0.01)

    def test_asymmetry_within_tol_averaged(self):
        # averaging rule applied by hand: (1 + (1 + 1e-12)) / 2 both sides
        d = validate_distance_matrix([[0.0, 1.0 + 1e-12], [1.0, 0.0]], tol=1e-9)
        expected = (1.0 + (1.0 + 1e-12)) / 2.0
        assert d.values[0, 1] == expected
        assert d.values[1, 0] == expected

    def test_negative_within_tol_clamped(self):
        d = validate_distance_matrix([[0.0, -1e-12], [-1e-12, 0.0]], tol=1e-9)
        assert d.values[0, 1] == 0.0

    def test_negative_beyond_tol_rejected(self):
        with pytest.raises(ValidationError, match="negative"):
            validate_distance_matrix([[0.0, -0.5], [-0.5, 0.0]], tol=1e-9)

    def test_diagonal_beyond_tol_rejected(self):
        with pytest.raises(ValidationError, match="diagonal"):
            validate_distance_matrix([[0.1, 1.0], [1.0, 0.0]], tol=1e-3)

    def test_diagonal_within_tol_zeroed(self):
        d = validate_distance_matrix([[1e-12, 1.0], [1.0, -1e-12]], tol=1e-9)
        assert np.all(np.diag(d.values) == 0.0)

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            validate_distance_matrix([[0.0, np.inf], [np.inf, 0.0]], tol=1.0)

    def test_non_square_rejected(self):
        with pytest.raises(ValidationError):
            validate_distance_matrix([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0]], tol=0.0)

    def test_negative_tol_rejected(self):
        with pytest.raises(ValidationError):
            validate_distance_matrix([[0.0]], tol=-1.0)


class TestDistanceMatrixInvariants:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValidationError):
            DistanceMatrix([[0.0, 1.0], [2.0, 0.0]])

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(ValidationError):
            DistanceMatrix([[1e-16, 1.0], [1.0, 0.0]])

    def test_rejects_negative(self):
        with pytest.raises(ValidationError):
            DistanceMatrix([[0.0, -1.0], [-1.0, 0.0]])

    def test_triangle_inequality_not_required(self):
        # 0-1 distance far exceeds the 0-2 + 2-1 path; still a valid target
        d = DistanceMatrix([[0.0, 10.0, 1.0], [10.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
        assert d.max_distance == 10.0


class TestConfusionToDistance:
    def test_basic_conversion(self):
        c = ConfusionMatrix([[1.0, 0.8], [0.8, 1.0]])
        d = confusion_to_distance(c)
        assert np.array_equal(d.values, [[0.0, 1.0 - 0.8], [1.0 - 0.8, 0.0]])

    def test_identity_confusion_gives_unit_distances(self):
        c = ConfusionMatrix(np.eye(3))
        d = confusion_to_distance(c)
        expected = np.ones((3, 3)) - np.eye(3)
        assert np.array_equal(d.values, expected)

    def test_max_distance_at_most_one(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            m = rng.integers(2, 6)
            off = rng.random((m, m))
            c_vals = np.triu(off, 1)
            c_vals = c_vals + c_vals.T + np.eye(m)
            d = confusion_to_distance(ConfusionMatrix(c_vals))
            assert d.max_distance <= 1.0

    def test_asymmetric_confusion_rejected(self):
        c = ConfusionMatrix([[1.0, 0.3], [0.4, 1.0]])
        with pytest.raises(ValidationError, match="symmetric"):
            confusion_to_distance(c)

    def test_entries_outside_unit_interval_rejected(self):
        with pytest.raises(ValidationError):
            ConfusionMatrix([[1.0, 1.2], [1.2, 1.0]])

    def test_non_unit_diagonal_rejected(self):
        with pytest.raises(ValidationError):
            ConfusionMatrix([[0.9, 0.1], [0.1, 1.0]])


class TestPairwiseDistances:
    def test_two_points_one_dim(self):
        assert np.array_equal(pairwise_distances([[0.0], [1.0]]), [[0.0, 1.0], [1.0, 0.0]])

    def test_three_four_five_triangle(self):
        d = pairwise_distances([[0.0, 0.0], [3.0, 4.0]])
        assert d[0, 1] == 5.0
        assert d[1, 0] == 5.0

    def test_collinear_points(self):
        d = pairwise_distances([[0.0], [1.0], [3.0]])
        expected = [[0.0, 1.0, 3.0], [1.0, 0.0, 2.0], [3.0, 2.0, 0.0]]
        assert np.array_equal(d, expected)

    def test_output_is_valid_distance_matrix(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            y = rng.normal(size=(rng.integers(2, 8), rng.integers(1, 4)))
            d = pairwise_distances(y)
            DistanceMatrix(d)  # symmetry, zero diagonal, nonnegativity at tol 0

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            pairwise_distances([[np.inf], [0.0]])


class TestEmpiricalRisk:
    def test_perfect_fit_is_zero(self):
        d = DistanceMatrix([[0.0, 2.0], [2.0, 0.0]])
        assert empirical_risk(d.values, d) == 0.0

    def test_two_point_hand_sum(self):
        # residual 0.5 on both ordered pairs: (1/4)(0 + 0.25 + 0.25 + 0)
        pred = np.array([[0.0, 1.0], [1.0, 0.0]])
        target = DistanceMatrix([[0.0, 0.5], [0.5, 0.0]])
        assert empirical_risk(pred, target) == 0.125

    def test_constant_offdiagonal_residual(self):
        # six off-diagonal ordered pairs out of nine contribute c^2 each
        c = 0.5
        target = DistanceMatrix(np.ones((3, 3)) - np.eye(3))
        pred = target.values + c * (np.ones((3, 3)) - np.eye(3))
        assert empirical_risk(pred, target) == pytest.approx(6 * c**2 / 9, abs=1e-15)

    def test_size_mismatch_rejected(self):
        target = DistanceMatrix([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(ValidationError, match="mismatch"):
            empirical_risk(np.zeros((3, 3)), target)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            m = int(rng.integers(3, 8))
            pred = pairwise_distances(rng.normal(size=(m, 2)))
            target = DistanceMatrix(pairwise_distances(rng.normal(size=(m, 2))))
            perm = rng.permutation(m)
            base = empirical_risk(pred, target)
            permuted = empirical_risk(
                pred[np.ix_(perm, perm)],
                DistanceMatrix(target.values[np.ix_(perm, perm)]),
            )
            assert permuted == pytest.approx(base, rel=1e-12)

    def test_self_distances_give_zero_risk(self):
        rng = np.random.default_rng(5)
        y = rng.normal(size=(6, 3))
        d = pairwise_distances(y)
        assert empirical_risk(d, DistanceMatrix(d)) == 0.0


class TestDataRadii:
    def test_max_row_norm(self):
        s = SampleMatrix([[0.0, 0.0], [3.0, 4.0]])
        d = DistanceMatrix(np.zeros((2, 2)))
        assert data_radii(s, d).r == 5.0

    def test_beta_from_confusion_at_most_one(self):
        c = ConfusionMatrix([[1.0, 0.2, 0.9], [0.2, 1.0, 0.5], [0.9, 0.5, 1.0]])
        d = confusion_to_distance(c)
        s = SampleMatrix(np.zeros((3, 2)) + [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
        assert data_radii(s, d).beta <= 1.0

    def test_unit_circle_with_origin(self):
        angles = np.linspace(0.0, 2 * np.pi, 8, endpoint=False)
        pts = np.vstack([[0.0, 0.0], np.column_stack([np.cos(angles), np.sin(angles)])])
        s = SampleMatrix(pts)
        d = DistanceMatrix(np.zeros((9, 9)))
        assert data_radii(s, d).r == pytest.approx(1.0, abs=1e-15)

    def test_size_mismatch_rejected(self):
        s = SampleMatrix([[0.0], [1.0]])
        d = DistanceMatrix(np.zeros((3, 3)))
        with pytest.raises(ValidationError):
            data_radii(s, d)


class TestMatrixCsv:
    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        mat = rng.normal(size=(7, 3)) * 1e3
        path = tmp_path / "mat.csv"
        write_matrix_csv(path, mat)
        assert np.array_equal(read_matrix_csv(path), mat)

    def test_plain_text_format(self, tmp_path):
        path = tmp_path / "mat.csv"
        write_matrix_csv(path, [[1.0, 2.0], [3.0, 4.0]])
        text = path.read_bytes().decode()
        assert "\r" not in text
        lines = text.strip().split("\n")
        assert len(lines) == 2
        assert len(lines[0].split(",")) == 2

    def test_single_row_reads_as_matrix(self, tmp_path):
        path = tmp_path / "row.csv"
        write_matrix_csv(path, [[1.0, 2.0, 3.0]])
        assert read_matrix_csv(path).shape == (1, 3)
