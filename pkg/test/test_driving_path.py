from unittest import TestCase

import numpy as np
import scipy.stats

from pylevymlmc.driving_path import RngStream, split_stream, sample_jumps, build_grid, realize_pair, \
    realize_level, ROLE_JUMPS
from pylevymlmc.levy_model import LevyModel, TruncatedStable, FiniteActivity


class TestRngStream(TestCase):

    def test_reproducible(self):
        a = RngStream(5, (1, 2)).generator().random(4)
        b = RngStream(5).split(1).split(2).generator().random(4)
        np.testing.assert_array_equal(a, b)

    def test_children_differ(self):
        root = RngStream(5)
        a = split_stream(root, 0).generator().random(4)
        b = split_stream(root, 1).generator().random(4)
        c = RngStream(6).split(0).generator().random(4)
        self.assertFalse(np.array_equal(a, b))
        self.assertFalse(np.array_equal(a, c))

    def test_split_independence(self):
        root = RngStream(11)
        x = np.array([root.split(i).generator().standard_normal() for i in range(2000)])
        y = np.array([root.split(i).split(0).generator().standard_normal() for i in range(2000)])
        self.assertLess(abs(np.corrcoef(x, y)[0, 1]), 0.1)

    def test_large_indices(self):
        stream = RngStream(2 ** 70, (2 ** 63 + 5,))
        self.assertEqual(stream.seed, 2 ** 70 & (2 ** 64 - 1))
        stream.generator().random()


class TestBuildGrid(TestCase):

    def test_pure_stepping(self):
        np.testing.assert_allclose(build_grid([], 0.4).points, [0., 0.4, 0.8, 1.])

    def test_jump(self):
        np.testing.assert_allclose(build_grid([0.5], 0.4).points, [0., 0.4, 0.5, 0.9, 1.])

    def test_jump_on_step(self):
        np.testing.assert_allclose(build_grid([0.8], 0.4).points, [0., 0.4, 0.8, 1.])

    def test_near_tie(self):
        grid = build_grid([0.4 + 1e-15], 0.4)
        self.assertEqual(len(grid), 4)
        self.assertEqual(grid.points[1], 0.4 + 1e-15)

    def test_jump_at_horizon(self):
        np.testing.assert_allclose(build_grid([1.], 0.3).points, [0., 0.3, 0.6, 0.9, 1.])

    def test_properties(self):
        times = np.sort(np.random.default_rng(0).random(50))
        grid = build_grid(times, 0.01)
        self.assertTrue(np.all(np.diff(grid.points) > 0))
        self.assertLessEqual(grid.max_gap(), 0.01 * (1 + 1e-12))
        self.assertTrue(set(times) <= set(grid.points))
        self.assertEqual(grid.points[0], 0.)
        self.assertEqual(grid.points[-1], 1.)

    def test_bad_eps(self):
        self.assertRaises(ValueError, build_grid, [], 0.)


class TestJumps(TestCase):

    def setUp(self):
        self.model = LevyModel(TruncatedStable(1.5, 1.))

    def test_empty_tail(self):
        self.assertEqual(sample_jumps(self.model, 1.5, RngStream(0)), [])

    def test_sorted_and_large(self):
        jumps = sample_jumps(self.model, 0.05, RngStream(3))
        times = [j.time for j in jumps]
        self.assertEqual(times, sorted(times))
        self.assertTrue(all(0 < t <= 1 for t in times))
        self.assertTrue(all(np.linalg.norm(j.size) >= 0.05 for j in jumps))

    def test_mean_count(self):
        root = RngStream(1)
        counts = np.array([len(sample_jumps(self.model, 0.5, root.split(i))) for i in range(20000)])
        se = np.sqrt(2.437902 / len(counts))
        self.assertLess(abs(counts.mean() - 2.437902), 4 * se)
        # Poisson law of the count
        lam = self.model.tail_mass(0.5)
        observed = np.array([np.sum(counts == j) for j in range(7)] + [np.sum(counts >= 7)])
        pmf = scipy.stats.poisson.pmf(np.arange(7), lam)
        expected = len(counts) * np.append(pmf, 1. - pmf.sum())
        self.assertGreater(scipy.stats.chisquare(observed, expected).pvalue, 0.001)


class TestRealizePair(TestCase):

    def setUp(self):
        self.model = LevyModel(TruncatedStable(1.2, 1., dim=2))

    def test_deterministic(self):
        a = realize_pair(self.model, 0.05, 2. ** -6, 0.2, 2. ** -5, RngStream(9, (3, 4)))
        b = realize_pair(self.model, 0.05, 2. ** -6, 0.2, 2. ** -5, RngStream(9, (3, 4)))
        self.assertEqual(a.to_json(), b.to_json())
        np.testing.assert_array_equal(a.wiener_increments, b.wiener_increments)
        np.testing.assert_array_equal(a.correction_increments, b.correction_increments)

    def test_coupled_structure(self):
        r = realize_pair(self.model, 0.05, 2. ** -6, 0.2, 2. ** -5, RngStream(9))
        norms = np.linalg.norm(r.jump_sizes, axis=1)
        self.assertTrue(np.all(norms >= 0.05))
        large = r.jump_times[norms >= 0.2]
        self.assertTrue(set(large) <= set(r.grid_coarse.points))
        self.assertTrue(set(r.jump_times) <= set(r.grid_fine.points))
        np.testing.assert_array_equal(r.union, np.union1d(r.grid_fine.points, r.grid_coarse.points))
        self.assertEqual(r.wiener_increments.shape, (len(r.union) - 1, 2))
        self.assertEqual(len(r.jumps), len(r.jump_times))

    def test_jumps_share_stream(self):
        pair = realize_pair(self.model, 0.05, 2. ** -6, 0.2, 2. ** -5, RngStream(4))
        jumps = sample_jumps(self.model, 0.05, RngStream(4).split(ROLE_JUMPS))
        np.testing.assert_array_equal(pair.jump_times, [j.time for j in jumps])

    def test_level_is_degenerate_pair(self):
        r = realize_level(self.model, 0.1, 0.125, RngStream(2))
        np.testing.assert_array_equal(r.grid_fine.points, r.grid_coarse.points)
        np.testing.assert_array_equal(r.union, r.grid_fine.points)

    def test_refinement_without_jumps(self):
        model = LevyModel(FiniteActivity([[1.]], [1.]))
        r = realize_pair(model, 2., 2. ** -4, 2., 2. ** -2, RngStream(3))
        self.assertEqual(len(r.jump_times), 0)
        np.testing.assert_allclose(r.grid_fine.points, np.linspace(0., 1., 17), atol=1e-15)
        np.testing.assert_allclose(r.grid_coarse.points, np.linspace(0., 1., 5), atol=1e-15)
        np.testing.assert_array_equal(r.union, r.grid_fine.points)
        coarse = np.add.reduceat(r.wiener_increments, np.arange(0, 16, 4), axis=0)
        self.assertEqual(coarse.shape, (4, 1))
        np.testing.assert_allclose(coarse.sum(axis=0), r.wiener_increments.sum(axis=0), rtol=1e-12)

    def test_gaussian_scaling(self):
        model = LevyModel(FiniteActivity([[1.]], [1.]))
        dw = np.concatenate([realize_level(model, 2., 0.25, RngStream(0, (i,))).wiener_increments[:, 0]
                             for i in range(3000)])
        self.assertAlmostEqual(np.var(dw) / 0.25, 1., delta=0.05)

    def test_order_checked(self):
        self.assertRaises(ValueError, realize_pair, self.model, 0.2, 0.1, 0.05, 0.2, RngStream(0))
