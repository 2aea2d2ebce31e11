from unittest import TestCase

import numpy as np

from pylevymlmc.errors import NotConstantCoefficientError
from pylevymlmc.experiment.mlmc import schedule_manual
from pylevymlmc.experiment.oracle import ks_two_sample, closed_form_sf, reference_estimate, \
    mc_small_jump_cov, quad_tail_mass, quad_f_small, quad_bar_g
from pylevymlmc.levy_model import LevyModel, TruncatedStable, FiniteActivity
from pylevymlmc.payoffs import Terminal, Lookback, Constant
from pylevymlmc.scheme import ConstantCoefficient, SineModulatedCoefficient


class TestKolmogorovSmirnov(TestCase):

    def test_identical(self):
        xs = np.random.default_rng(0).standard_normal(500)
        stat, p = ks_two_sample(xs, xs)
        self.assertEqual(stat, 0.)
        self.assertEqual(p, 1.)

    def test_separated(self):
        rng = np.random.default_rng(1)
        stat, p = ks_two_sample(rng.standard_normal(1000), 3. + rng.standard_normal(1000))
        self.assertLess(p, 1e-6)
        self.assertGreater(stat, 0.5)

    def test_size(self):
        rng = np.random.default_rng(2)
        rejections = sum(ks_two_sample(rng.standard_normal(1000), rng.standard_normal(1000))[1] < 0.01
                         for _ in range(100))
        self.assertLessEqual(rejections, 5)

    def test_too_small(self):
        self.assertRaises(ValueError, ks_two_sample, np.zeros(99), np.zeros(200))


class TestClosedForm(TestCase):

    def test_value(self):
        model = LevyModel(TruncatedStable(1.5, 1.), drift=[0.3])
        self.assertAlmostEqual(closed_form_sf(model, ConstantCoefficient([[2.]]), [1.], Terminal()), 1.6)
        self.assertAlmostEqual(closed_form_sf(model, ConstantCoefficient([[0.]]), [1.], Terminal()), 1.)

    def test_centered_driver(self):
        model = LevyModel(TruncatedStable(1.5, 1., dim=2))
        value = closed_form_sf(model, ConstantCoefficient([[1., 2.], [3., 4.]]), [0.5, -1.], Terminal([1., 1.]))
        self.assertAlmostEqual(value, -0.5)

    def test_requirements(self):
        model = LevyModel(TruncatedStable(1.5, 1.))
        self.assertRaises(NotConstantCoefficientError, closed_form_sf, model,
                          SineModulatedCoefficient([[1.]]), [0.], Terminal())
        self.assertRaises(ValueError, closed_form_sf, model, ConstantCoefficient([[1.]]), [0.], Lookback())


class TestReference(TestCase):

    def setUp(self):
        self.model = LevyModel(TruncatedStable(1.5, 1.), drift=[0.3])
        self.coeff = ConstantCoefficient([[2.]])

    def test_constant_payoff(self):
        ref = reference_estimate(self.model, self.coeff, [1.], Constant(2.5), 0.25, 0.25, 1000, 0)
        self.assertEqual(ref.value, 2.5)
        self.assertEqual(ref.stderr, 0.)

    def test_terminal(self):
        ref = reference_estimate(self.model, self.coeff, [1.], Terminal(), 0.125, 0.05, 4000, 1, workers=2)
        self.assertLess(abs(ref.value - 1.6), 4 * ref.stderr)
        schedule = schedule_manual(self.model, [1., 0.5], [0.5, 0.1], [1, 1])
        self.assertTrue(ref.is_finer_than(schedule))
        self.assertFalse(ref.is_finer_than(schedule_manual(self.model, [0.25], [0.05], [1])))

    def test_halved_parameters_agree(self):
        coeff = SineModulatedCoefficient([[1.]])
        coarse = reference_estimate(self.model, coeff, [0.], Terminal(), 0.25, 0.2, 4000, 21)
        fine = reference_estimate(self.model, coeff, [0.], Terminal(), 0.125, 0.1, 4000, 22)
        combined = np.sqrt(coarse.stderr ** 2 + fine.stderr ** 2)
        self.assertGreater(combined, 0.)
        self.assertLess(abs(coarse.value - fine.value), 3 * combined)

    def test_too_few(self):
        self.assertRaises(ValueError, reference_estimate, self.model, self.coeff, [1.], Terminal(),
                          0.1, 0.1, 999, 0)


class TestQuadrature(TestCase):

    def test_finite_activity(self):
        model = LevyModel(FiniteActivity([[1.], [0.2]], [1., 3.]))
        self.assertEqual(quad_tail_mass(model, 0.5), 1.)
        self.assertAlmostEqual(quad_f_small(model, 0.5), 0.12)
        self.assertAlmostEqual(quad_bar_g(model, 0.5), 1. + 3 * 0.16)

    def test_mc_small_jump_cov(self):
        model = LevyModel(TruncatedStable(1.5, 1., dim=2))
        est, se = mc_small_jump_cov(model, 0.3, n=20000, seed=3)
        exact = model.small_jump_cov(0.3)
        self.assertTrue(np.all(np.abs(est - exact) <= 4 * se + 1e-12))
