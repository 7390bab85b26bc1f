import math

import numpy as np
import pytest

from conebilliards.errors import DimensionMismatch
from conebilliards.geometry import gram, make_cone, reduce_to_span
from conebilliards.harness import (
    EnsembleRow,
    ExperimentConfig,
    adversarial_search,
    ensemble_run,
    gaussians,
    make_rng,
    random_cone,
    rows_to_csv,
    sphere_sample,
)


class TestRandomCone:
    def test_determinism(self):
        a = random_cone(2, 2, 42)
        b = random_cone(2, 2, 42)
        assert np.array_equal(a.normals, b.normals)
        c = random_cone(2, 2, 43)
        assert not np.array_equal(a.normals, c.normals)

    def test_streams_differ(self):
        a = random_cone(3, 3, 42, stream=0)
        b = random_cone(3, 3, 42, stream=1)
        assert not np.array_equal(a.normals, b.normals)

    def test_conditioning_floor(self):
        for s in range(50):
            cone = random_cone(3, 3, 7, stream=s)
            assert math.sqrt(cone.lambda_min) > 1e-3

    def test_wide_cone_reduces_with_same_gram(self):
        cone = random_cone(2, 5, 1)
        reduced, _ = reduce_to_span(cone.dim, cone.normals)
        np.testing.assert_allclose(
            gram(reduced).entries, gram(cone).entries, atol=1e-12
        )

    def test_rejects_bad_shape(self):
        with pytest.raises(DimensionMismatch):
            random_cone(3, 2, 0)

    def test_degenerate_sampling_surfaces(self, monkeypatch):
        import conebilliards.harness as harness
        from conebilliards.errors import DegenerateSampling

        def dependent(rng, count, dim):
            row = np.zeros(dim)
            row[0] = 1.0
            return np.tile(row, (count, 1))

        monkeypatch.setattr(harness, "sphere_sample", dependent)
        with pytest.raises(DegenerateSampling):
            harness.random_cone(2, 2, 0)


class TestSampling:
    def test_gaussians_deterministic(self):
        z1 = gaussians(make_rng(5, 1), 100)
        z2 = gaussians(make_rng(5, 1), 100)
        np.testing.assert_array_equal(z1, z2)

    def test_sphere_sample_unit_norm(self):
        pts = sphere_sample(make_rng(6, 0), 1000, 4)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)


class TestEnsembleRun:
    def test_small_ensemble_passes(self, tmp_path):
        out = tmp_path / "rows.csv"
        config = ExperimentConfig(
            n_walls=2, dim=2, trials=5, seed=11, output_path=str(out), paths_per_cone=20
        )
        rows = ensemble_run(config)
        assert len(rows) == 5
        for row in rows:
            assert row.all_checks_pass
            assert row.max_observed_N <= row.bound_main
            assert row.zigzag_max_L <= row.lemma1_ceiling + 1e-9
        text = out.read_text()
        assert text.splitlines()[0] == ",".join(EnsembleRow.FIELDS)
        assert len(text.splitlines()) == 6

    def test_byte_identical_reruns(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        for out in (out1, out2):
            ensemble_run(
                ExperimentConfig(
                    n_walls=2, dim=3, trials=3, seed=99, output_path=str(out), paths_per_cone=10
                )
            )
        assert out1.read_bytes() == out2.read_bytes()

    def test_trials_used_for_paths_when_unset(self, tmp_path):
        config = ExperimentConfig(n_walls=2, dim=2, trials=3, seed=1)
        rows = ensemble_run(config)
        assert len(rows) == 3

    def test_csv_17_digit_round_trip(self):
        config = ExperimentConfig(n_walls=2, dim=2, trials=2, seed=5, paths_per_cone=5)
        rows = ensemble_run(config)
        text = rows_to_csv(rows)
        header, *lines = text.strip().splitlines()
        cols = header.split(",")
        for row, line in zip(rows, lines):
            parsed = dict(zip(cols, line.split(",")))
            assert float(parsed["lambda_min"]) == row.lambda_min
            assert float(parsed["d"]) == row.d
            assert int(parsed["max_observed_N"]) == row.max_observed_N

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(n_walls=3, dim=2, trials=1, seed=0)
        with pytest.raises(ValueError):
            ExperimentConfig(n_walls=2, dim=2, trials=0, seed=0)


class TestAdversarialSearch:
    def test_wedge_third_attains_three(self):
        from conebilliards.wedge import wedge_from_angle

        cone = wedge_from_angle(math.pi / 3).cone
        result = adversarial_search(cone, budget=2000, seed=2)
        assert result.best_n == 3

    def test_orthant3_attains_three(self, orthant3):
        result = adversarial_search(orthant3, budget=800, seed=4)
        assert result.best_n == 3

    def test_two_fifths_never_four(self):
        from conebilliards.wedge import wedge_from_angle

        cone = wedge_from_angle(2 * math.pi / 5).cone
        result = adversarial_search(cone, budget=3000, seed=6)
        assert result.best_n == 3

    def test_deterministic_under_seed(self, orthant2):
        r1 = adversarial_search(orthant2, budget=300, seed=9)
        r2 = adversarial_search(orthant2, budget=300, seed=9)
        assert r1.best_n == r2.best_n
        np.testing.assert_array_equal(r1.best_state.q, r2.best_state.q)
        np.testing.assert_array_equal(r1.best_state.v, r2.best_state.v)

    def test_wide_cone_maps_back_to_ambient(self):
        cone = make_cone(4, [(1, 0, 0, 0), (0, 1, 0, 0)])
        result = adversarial_search(cone, budget=300, seed=3)
        assert result.best_state.q.shape == (4,)
        assert result.best_n <= 2
