import json

import numpy as np
import pytest

from infoexplain import (
    DimensionMismatch,
    ExperimentConfig,
    GaussianModel,
    GeometryTooLarge,
    ImageGrid,
    InvalidSparsity,
    NeighborhoodGeometry,
    Rect,
    SingularSystem,
    compute_user_summary,
    default_geometry,
    explain_population,
    extract_patches,
    run_experiment,
    support_mask,
    train_predictor,
    write_pgm,
)
from conftest import (
    make_planted_image,
    make_summary_explains_image,
    planted_geometry,
)


class TestGeometry:
    def test_default_shape(self):
        geo = default_geometry()
        assert geo.n == 50
        offsets = geo.feature_offsets()
        assert offsets[0] == (-2, -7)  # raster order starts at rect1 corner
        assert offsets[4] == (-2, -3)
        assert offsets[25] == (-2, 3)  # rect2 follows rect1
        assert (0, 0) not in offsets

    def test_target_inside_rect_rejected(self):
        with pytest.raises(DimensionMismatch):
            NeighborhoodGeometry(Rect(-1, -1, 3, 3), Rect(0, 2, 1, 1))

    def test_empty_rect_rejected(self):
        with pytest.raises(DimensionMismatch):
            NeighborhoodGeometry(Rect(0, -1, 0, 1), Rect(0, 1, 1, 1))


class TestExtractPatches:
    def test_constant_image_centers_to_zero(self):
        image = ImageGrid(np.full((20, 40), 0.5))
        features, labels = extract_patches(image, planted_geometry(), stride=3)
        assert np.all(features == 0.0)
        assert np.all(labels == 0.0)

    def test_horizontal_neighbors_on_3x3(self):
        # geometry fits wherever the target has both side columns in range;
        # on a 3x3 image that is the middle column, all three rows
        geo = NeighborhoodGeometry(Rect(0, -1, 1, 1), Rect(0, 1, 1, 1))
        pixels = np.arange(9, dtype=float).reshape(3, 3) / 10.0
        image = ImageGrid(pixels)
        features, labels = extract_patches(image, geo, stride=1)
        assert features.shape == (3, 2)
        mean = pixels.mean()
        assert features[1, 0] == pytest.approx(pixels[1, 0] - mean)  # left of center
        assert features[1, 1] == pytest.approx(pixels[1, 2] - mean)  # right of center
        assert labels[1] == pytest.approx(pixels[1, 1] - mean)

    def test_single_target_when_both_dims_constrained(self):
        geo = NeighborhoodGeometry(Rect(-1, -1, 1, 1), Rect(1, 1, 1, 1))
        pixels = np.arange(9, dtype=float).reshape(3, 3) / 10.0
        features, labels = extract_patches(ImageGrid(pixels), geo, stride=1)
        assert features.shape == (1, 2)
        mean = pixels.mean()
        assert features[0, 0] == pytest.approx(pixels[0, 0] - mean)
        assert features[0, 1] == pytest.approx(pixels[2, 2] - mean)
        assert labels[0] == pytest.approx(pixels[1, 1] - mean)

    def test_stripe_image_hand_check(self):
        # column-parity stripes: left and right neighbors share the target's
        # opposite parity, so both features equal each other exactly
        geo = NeighborhoodGeometry(Rect(0, -1, 1, 1), Rect(0, 1, 1, 1))
        pixels = np.tile([0.2, 0.8], (3, 2))[:, :3]  # 0.2, 0.8, 0.2 columns
        features, labels = extract_patches(ImageGrid(pixels), geo, stride=1)
        assert np.allclose(features[:, 0], features[:, 1])
        # label has opposite sign around the mean from its neighbors
        assert np.all(np.sign(labels) == -np.sign(features[:, 0]))

    def test_geometry_too_large(self):
        image = ImageGrid(np.full((4, 4), 0.5))
        with pytest.raises(GeometryTooLarge):
            extract_patches(image, default_geometry(), stride=1)

    def test_stride_thins_grid(self):
        image = ImageGrid(np.full((30, 60), 0.25))
        geo = planted_geometry()
        m1 = extract_patches(image, geo, stride=1)[0].shape[0]
        m3 = extract_patches(image, geo, stride=3)[0].shape[0]
        assert m1 > m3 >= m1 // 9


class TestTrainPredictor:
    def test_exact_interpolation(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((50, 4))
        w0 = np.array([1.0, -2.0, 0.5, 3.0])
        w = train_predictor(x, x @ w0, ridge=0.0)
        assert np.allclose(w, w0, atol=1e-8)

    def test_huge_ridge_shrinks_to_zero(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((50, 3))
        y = rng.standard_normal(50)
        w = train_predictor(x, y, ridge=1e12)
        assert np.abs(w).max() < 1e-9

    def test_matches_stacked_least_squares_oracle(self):
        # oracle: augmented least squares [X; sqrt(ridge) I] w ~ [y; 0],
        # solved by an SVD routine rather than the normal equations
        rng = np.random.default_rng(3)
        x = rng.standard_normal((60, 5))
        y = rng.standard_normal(60)
        ridge = 0.37
        aug = np.vstack([x, np.sqrt(ridge) * np.eye(5)])
        target = np.concatenate([y, np.zeros(5)])
        oracle, *_ = np.linalg.lstsq(aug, target, rcond=None)
        assert np.allclose(train_predictor(x, y, ridge), oracle, atol=1e-8)

    def test_singular_system(self):
        x = np.ones((10, 2))  # duplicate columns
        with pytest.raises(SingularSystem):
            train_predictor(x, np.ones(10), ridge=0.0)


class TestUserSummary:
    def test_two_element_mean(self):
        geo = NeighborhoodGeometry(Rect(0, -1, 1, 1), Rect(0, 1, 1, 1))
        u = compute_user_summary(np.array([[0.2, 0.4]]), geo)
        assert u[0] == pytest.approx(0.3)

    def test_equals_linear_map_with_uniform_weights(self):
        geo = planted_geometry()
        rng = np.random.default_rng(4)
        features = rng.standard_normal((10, geo.n))
        u = compute_user_summary(features, geo)
        v = np.full(geo.n, 1.0 / geo.n)
        assert np.allclose(u, features @ v, atol=1e-15)

    def test_column_count_checked(self):
        with pytest.raises(DimensionMismatch):
            compute_user_summary(np.ones((5, 3)), planted_geometry())


class TestConfig:
    def test_sparsity_validated_against_geometry(self):
        with pytest.raises(InvalidSparsity):
            ExperimentConfig(image_path="x.pgm", s=51)

    def test_stride_validated(self):
        with pytest.raises(Exception):
            ExperimentConfig(image_path="x.pgm", s=1, stride=0)


class TestRunExperiment:
    def test_constant_image_degenerate(self, tmp_path):
        path = tmp_path / "flat.pgm"
        write_pgm(np.full((30, 60), 0.5), path)
        config = ExperimentConfig(image_path=str(path), s=2,
                                  geometry=planted_geometry(), stride=3)
        report = run_experiment(config)
        assert report.degenerate
        assert report.support.indices == ()
        assert report.mi.nats == 0.0
        assert report.to_json_dict()["mi_nats"] == 0.0

    @pytest.mark.parametrize("method", ["l0_exhaustive", "omp", "lasso_path"])
    def test_planted_two_pixel_recovery(self, tmp_path, method):
        geo = planted_geometry()
        image, indices = make_planted_image(
            geo, {(0, -2): 0.7, (-1, -7): 0.3}, seed=100
        )
        path = tmp_path / "planted.pgm"
        write_pgm(image.pixels, path, maxval=65535)
        config = ExperimentConfig(image_path=str(path), s=2, geometry=geo,
                                  stride=7, method=method)
        report = run_experiment(config)
        assert report.support.indices == indices
        assert report.support_offsets == ((-1, -7), (0, -2))
        if method == "lasso_path":
            assert len(report.path_summary) == 100

    def test_summary_explains_label_selects_nothing(self, tmp_path):
        # oracle: the population solver on the planted model: with w = v the
        # optimum is the empty set
        geo = planted_geometry()
        planted_model = GaussianModel(
            np.eye(geo.n), np.full(geo.n, 1.0 / geo.n), np.full(geo.n, 1.0 / geo.n)
        )
        assert explain_population(planted_model, 2).indices == ()
        image = make_summary_explains_image(geo, seed=101)
        path = tmp_path / "mean.pgm"
        write_pgm(image.pixels, path, maxval=65535)
        config = ExperimentConfig(image_path=str(path), s=2, geometry=geo,
                                  stride=7)
        report = run_experiment(config)
        assert report.degenerate
        assert report.support.indices == ()
        assert report.mi.nats == 0.0

    def test_selected_offsets_inside_rectangles(self, tmp_path):
        geo = planted_geometry()
        image, _ = make_planted_image(geo, {(0, -2): 0.6, (-1, -7): 0.4}, seed=7)
        path = tmp_path / "p.pgm"
        write_pgm(image.pixels, path, maxval=65535)
        config = ExperimentConfig(image_path=str(path), s=3, geometry=geo,
                                  stride=7, method="omp")
        report = run_experiment(config)
        for dr, dc in report.support_offsets:
            assert geo.rect1.contains(dr, dc) or geo.rect2.contains(dr, dc)

    def test_report_fully_deterministic(self, tmp_path):
        geo = planted_geometry()
        image, _ = make_planted_image(geo, {(0, -2): 0.7, (-1, -7): 0.3}, seed=9)
        path = tmp_path / "p.pgm"
        write_pgm(image.pixels, path, maxval=65535)
        config = ExperimentConfig(image_path=str(path), s=2, geometry=geo,
                                  stride=7, method="lasso_path")
        a = json.dumps(run_experiment(config).to_json_dict(), indent=2)
        b = json.dumps(run_experiment(config).to_json_dict(), indent=2)
        assert a == b

    def test_stage_attribution(self, tmp_path):
        path = tmp_path / "tiny.pgm"
        write_pgm(np.full((3, 3), 0.5), path)
        config = ExperimentConfig(image_path=str(path), s=1,
                                  geometry=default_geometry())
        with pytest.raises(GeometryTooLarge) as err:
            run_experiment(config)
        assert err.value.stage == "extract-patches"

    def test_schema_fields(self, tmp_path):
        geo = planted_geometry()
        image, _ = make_planted_image(geo, {(0, -2): 0.7, (-1, -7): 0.3}, seed=11)
        path = tmp_path / "p.pgm"
        write_pgm(image.pixels, path, maxval=65535)
        config = ExperimentConfig(image_path=str(path), s=2, geometry=geo,
                                  stride=7, method="omp")
        doc = run_experiment(config).to_json_dict()
        assert doc["schema_version"] == 1
        assert doc["config"]["method"] == "omp"
        assert doc["config"]["geometry"]["rect1"] == [-1, -9, 3, 4]
        assert doc["m"] > 0 and doc["n"] == 24


class TestSupportMask:
    def test_mask_marks_selected_pixels(self):
        geo = planted_geometry()
        from infoexplain import ExplanationSupport

        support = ExplanationSupport((3, 19), budget=2)
        mask = support_mask(geo, support)
        offsets = geo.feature_offsets()
        rows = [dr for dr, _ in offsets] + [0]
        cols = [dc for _, dc in offsets] + [0]
        assert mask.shape == (max(rows) - min(rows) + 1,
                              max(cols) - min(cols) + 1)
        assert mask.sum() == 2.0
        dr, dc = offsets[2]  # feature 3
        assert mask[dr - min(rows), dc - min(cols)] == 1.0
