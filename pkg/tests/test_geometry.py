import itertools
import math

import numpy as np
import pytest

from conebilliards.errors import DegenerateArrangement, DimensionMismatch, ZeroVector
from conebilliards.geometry import (
    contains,
    gram,
    jacobi_eigenvalues,
    make_cone,
    min_eigenvalue,
    reduce_to_span,
)
from conebilliards.harness import make_rng, random_cone, sphere_sample

from conftest import cone_suite


class TestMakeCone:
    def test_orthant(self):
        cone = make_cone(2, [(1, 0), (0, 1)])
        assert cone.n_walls == 2 and cone.dim == 2
        np.testing.assert_allclose(cone.normals, np.eye(2))
        assert not cone.renormalized

    def test_renormalizes_scaled_directions(self):
        cone = make_cone(2, [(2, 0), (0, 3)])
        np.testing.assert_allclose(cone.normals, np.eye(2), atol=1e-15)
        assert cone.renormalized

    def test_repeated_normal_is_degenerate(self):
        with pytest.raises(DegenerateArrangement):
            make_cone(2, [(1, 0), (1, 0)])

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            make_cone(2, [(0, 0), (0, 1)])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            make_cone(3, [(1, 0), (0, 1)])
        with pytest.raises(DimensionMismatch):
            make_cone(2, [(1, 0), (0, 1), (1, 1)])

    def test_unit_norms_within_tolerance(self):
        cone = make_cone(3, [(1, 2, 2), (4, 0, 3), (0, 0, 5)])
        np.testing.assert_allclose(np.linalg.norm(cone.normals, axis=1), 1.0, atol=1e-12)


class TestGram:
    def test_orthant_identity(self, orthant2):
        g = gram(orthant2)
        np.testing.assert_allclose(g.entries, np.eye(2))

    def test_wedge_half(self):
        cone = make_cone(2, [(0, 1), (math.sin(math.pi / 3), -math.cos(math.pi / 3))])
        g = gram(cone)
        np.testing.assert_allclose(g.entries, [[1, -0.5], [-0.5, 1]], atol=1e-15)

    def test_explicit_angle(self):
        a2 = (math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3))
        g = gram(make_cone(2, [(1, 0), a2]))
        assert abs(g.entries[0, 1] - math.cos(2 * math.pi / 3)) < 1e-15
        np.testing.assert_allclose(g.entries, [[1, -0.5], [-0.5, 1]], atol=1e-15)

    def test_symmetric_unit_diagonal(self):
        for cone in cone_suite((2, 3, 4, 5), 5, seed=31):
            g = gram(cone)
            assert np.abs(g.entries - g.entries.T).max() < 1e-14
            assert np.abs(np.diag(g.entries) - 1.0).max() < 1e-12
            assert g.is_positive_definite


class TestMinEigenvalue:
    def test_identity(self):
        assert min_eigenvalue(np.eye(2)) == pytest.approx(1.0, abs=1e-14)

    def test_two_by_two_closed_form(self):
        # eigenvalues of [[1, c], [c, 1]] are 1 +/- c
        assert min_eigenvalue(np.array([[1, -0.5], [-0.5, 1]])) == pytest.approx(
            0.5, abs=1e-13
        )

    def test_quarter_turn_wedge(self):
        c = math.cos(math.pi / 4)
        lam = min_eigenvalue(np.array([[1.0, -c], [-c, 1.0]]))
        assert lam == pytest.approx(1.0 - c, abs=1e-13)
        assert lam == pytest.approx(0.2928932188134524, abs=1e-12)

    def test_matches_numpy_on_random_symmetric(self):
        rng = make_rng(12, 0)
        for n in (2, 3, 5, 8, 12):
            a = rng.standard_normal((n, n))
            s = 0.5 * (a + a.T)
            ours = jacobi_eigenvalues(s)
            ref = np.linalg.eigvalsh(s)
            np.testing.assert_allclose(ours, ref, rtol=1e-10, atol=1e-10)

    def test_eigenvectors_reconstruct(self):
        rng = make_rng(13, 0)
        a = rng.standard_normal((5, 5))
        s = 0.5 * (a + a.T)
        vals, vecs = jacobi_eigenvalues(s, with_vectors=True)
        np.testing.assert_allclose(vecs @ np.diag(vals) @ vecs.T, s, atol=1e-10)


class TestReduceToSpan:
    def test_coordinate_subspace(self):
        reduced, basis = reduce_to_span(3, [(1, 0, 0), (0, 1, 0)])
        assert reduced.dim == 2
        np.testing.assert_allclose(gram(reduced).entries, np.eye(2), atol=1e-12)
        assert basis.shape == (2, 3)

    def test_half_line(self):
        reduced, basis = reduce_to_span(3, [(1, 0, 0)])
        assert reduced.dim == 1 and reduced.n_walls == 1
        np.testing.assert_allclose(np.abs(reduced.normals), [[1.0]])

    def test_gram_preserved_random(self):
        rng = make_rng(14, 0)
        for _ in range(20):
            normals = sphere_sample(rng, 2, 4)
            try:
                cone = make_cone(4, normals)
            except DegenerateArrangement:
                continue
            reduced, basis = reduce_to_span(4, normals)
            np.testing.assert_allclose(
                gram(reduced).entries, gram(cone).entries, atol=1e-12
            )
            # basis rows are orthonormal and reproduce the normals
            np.testing.assert_allclose(basis @ basis.T, np.eye(2), atol=1e-12)
            np.testing.assert_allclose(reduced.normals @ basis, cone.normals, atol=1e-12)


class TestContains:
    def test_inside(self, orthant2):
        assert contains(orthant2, (1, 1), 0.0)

    def test_outside(self, orthant2):
        assert not contains(orthant2, (-1, 1), 0.0)

    def test_tolerance_band(self, orthant2):
        assert contains(orthant2, (-1e-12, 1), 1e-9)

    def test_dimension_check(self, orthant2):
        with pytest.raises(DimensionMismatch):
            contains(orthant2, (1, 1, 1), 0.0)


class TestSpectralInvariants:
    def test_aat_equals_ata_spectrum(self):
        rng = make_rng(15, 0)
        for n in (2, 3, 4, 6):
            a = rng.standard_normal((n, n))
            s1 = jacobi_eigenvalues(a @ a.T)
            s2 = jacobi_eigenvalues(a.T @ a)
            np.testing.assert_allclose(s1, s2, atol=1e-9, rtol=1e-9)

    def test_sign_flip_leaves_spectrum(self):
        for cone in cone_suite((2, 3, 4, 5), 4, seed=32):
            base = np.sort(jacobi_eigenvalues(gram(cone).entries))
            for i in range(cone.n_walls):
                flipped = np.array(cone.normals)
                flipped[i] = -flipped[i]
                other = make_cone(cone.dim, flipped)
                spec = np.sort(jacobi_eigenvalues(gram(other).entries))
                np.testing.assert_allclose(spec, base, atol=1e-12)

    def test_principal_submatrix_monotonicity(self):
        for cone in cone_suite((2, 3, 4, 5, 6), 3, seed=33):
            g = gram(cone).entries
            lam = min_eigenvalue(g)
            n = g.shape[0]
            for k in range(1, n + 1):
                for rows in itertools.combinations(range(n), k):
                    sub = g[np.ix_(rows, rows)]
                    assert min_eigenvalue(sub) >= lam - 1e-12

    def test_variational_characterization(self):
        # The sampled minimum of ||A x||^2 over random unit x can never be
        # below lambda_min (up to tolerance); and on the circle a dense scan
        # pins the value itself.
        rng = make_rng(16, 0)
        for cone in cone_suite((2, 3, 4), 3, seed=34):
            a = cone.matrix
            lam = cone.lambda_min
            x = sphere_sample(rng, 10_000, cone.dim)
            sampled = ((x @ a.T @ a) * x).sum(axis=1).min()
            assert sampled >= lam - 1e-6
        for cone in cone_suite((2,), 5, seed=35):
            a = cone.matrix
            phi = np.linspace(0.0, 2 * np.pi, 100_001)
            x = np.stack([np.cos(phi), np.sin(phi)], axis=1)
            dense = np.linalg.norm(x @ a, axis=1).min() ** 2
            assert abs(dense - cone.lambda_min) < 1e-6


def test_random_cone_determinism():
    c1 = random_cone(2, 2, 42)
    c2 = random_cone(2, 2, 42)
    assert np.array_equal(c1.normals, c2.normals)


def test_random_cone_conditioning():
    cone = random_cone(3, 3, 7)
    assert cone.lambda_min > 0.0
