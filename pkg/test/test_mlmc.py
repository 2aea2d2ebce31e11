from unittest import TestCase
import json
import os

import numpy as np

import pylevymlmc
from pylevymlmc.driving_path import RngStream
from pylevymlmc.errors import TauTooSmallError, ConfigError, NonFiniteStateError, UnsupportedMeasureError
from pylevymlmc.experiment import sample_in_threads
from pylevymlmc.experiment.mlmc import LevelSchedule, GStarSolver, schedule_manual, schedule_case1, \
    schedule_case2, cost, cost_bound, cost_preconditions, rate_exponent, baseline_rate_exponent, \
    envelope, mse_bound_terms, estimate, level_profile, level_samples, MultilevelMonteCarlo
from pylevymlmc.levy_model import LevyModel, TruncatedStable, FiniteActivity
from pylevymlmc.payoffs import Terminal, Constant
from pylevymlmc.scheme import ConstantCoefficient, AffineCoefficient

package_directory = os.path.dirname(os.path.abspath(__file__))


def stable_document():
    with open(os.path.join(package_directory, "..", "configs", "stable_1_5.json"), 'r', encoding='utf-8') as f:
        return json.load(f)


class TestScheduler(TestCase):

    def setUp(self):
        self.model = LevyModel(TruncatedStable(1.5, 1.), drift=[0.3])

    def test_cost_example(self):
        model = LevyModel(FiniteActivity([[1.]], [1.]))
        schedule = schedule_manual(model, [0.5], [0.5], [10])
        self.assertEqual(schedule.tail_masses.tolist(), [1.])
        self.assertEqual(cost(schedule), 40.)
        self.assertEqual(cost_bound(schedule), 60.)

    def test_case1(self):
        schedule = schedule_case1(self.model, 4096)
        self.assertEqual(schedule.m, 10)
        k = np.arange(1, 11)
        np.testing.assert_allclose(schedule.eps, 2. ** -k)
        np.testing.assert_allclose([self.model.g_bound(h) for h in schedule.h], 2. ** k, rtol=1e-12)
        scale = 4096 ** (1. / 3.) * np.log(4096) ** (-2. / 3.)
        expected = np.floor(scale * 2. ** ((10 - k) / 1.5))
        self.assertTrue(np.all(np.abs(schedule.n - expected) <= 1))
        self.assertEqual(schedule.n[-1], 3)
        self.assertTrue(np.all(schedule.tail_masses <= 2. ** k))
        self.assertTrue(cost_preconditions(schedule))
        self.assertEqual(schedule.provenance, {"mode": "case1", "tau": 4096., "C1": 1., "C2": 1.})

    def test_tau_too_small(self):
        with self.assertRaises(TauTooSmallError) as ctx:
            schedule_case1(self.model, 3.)
        minimal = ctx.exception.minimal_tau
        self.assertGreater(minimal, 3.)
        self.assertGreaterEqual(schedule_case1(self.model, minimal).m, 2)
        self.assertRaises(TauTooSmallError, schedule_case1, self.model, 0.99 * minimal)
        self.assertRaises(TauTooSmallError, schedule_case1, self.model, 0.5)

    def test_g_star(self):
        model = LevyModel(TruncatedStable(1.2, 1.), sigma=[[0.5]])
        solver = GStarSolver(model.g_inverse)
        for tau in (1e3, 1e4, 1e7):
            x = solver.solve(tau)
            self.assertLess(abs(solver.phi(x) / tau - 1.), 1e-6)
            self.assertLess(solver.phi(x / (1 + 1e-6)), tau)
        schedule = schedule_case2(model, 1e4)
        self.assertEqual(schedule.m, int(np.floor(np.log2(solver.solve(1e4)))))
        ratios = schedule.n[:-1] / schedule.n[-1]
        self.assertTrue(np.all(np.diff(schedule.n) <= 0))
        self.assertAlmostEqual(ratios[0] / 2. ** ((schedule.m - 1) / 1.2), 1., delta=0.01)

    def test_g_star_slow_decay(self):
        model = LevyModel(TruncatedStable(0.5, 1.))
        solver = GStarSolver(model.g_inverse)
        self.assertEqual(solver.solve(1.), np.e)
        self.assertRaises(UnsupportedMeasureError, solver.solve, 1e6)
        self.assertRaises(UnsupportedMeasureError, schedule_case2, model, 1e6)

    def test_manual_checks(self):
        self.assertRaises(ConfigError, schedule_manual, self.model, [0.25, 0.5], [0.5, 0.5], [1, 1])
        self.assertRaises(ConfigError, schedule_manual, self.model, [0.5], [0.5], [0])
        self.assertRaises(ConfigError, schedule_manual, self.model, [0.5], [0.5, 0.25], [1, 1])
        schedule = schedule_manual(self.model, [2., 1.], [0.5, 0.25], [10, 10])
        self.assertFalse(cost_preconditions(schedule))
        self.assertIsNone(cost_bound(schedule))

    def test_correction_factor(self):
        schedule = schedule_manual(self.model, [0.5, 0.25], [0.5, 0.2], [4, 2])
        factor = schedule.correction_factor
        np.testing.assert_allclose(factor @ factor.T, self.model.small_jump_cov(0.2), rtol=1e-12)
        np.testing.assert_array_equal(schedule.level_params(1).correction_factor, factor)
        plain = schedule_manual(self.model, [0.5, 0.25], [0.5, 0.2], [4, 2], correction=False)
        np.testing.assert_array_equal(plain.correction_factor, [[0.]])
        with self.assertRaises(ValueError):
            schedule.n[0] = 5

    def test_with_samples(self):
        schedule = schedule_case1(self.model, 1024)
        small = schedule.with_samples(np.minimum(schedule.n, 2), self.model)
        self.assertEqual(small.n.max(), 2)
        np.testing.assert_array_equal(small.h, schedule.h)
        self.assertEqual(json.loads(json.dumps(small.to_json()))["m"], schedule.m)

    def test_rate_exponents(self):
        self.assertAlmostEqual(rate_exponent(1.5), 2.5 / 9.)
        self.assertAlmostEqual(rate_exponent(1.2, True), 1.2 / 3.2)
        self.assertAlmostEqual(rate_exponent(1.2, False), 2.8 / 7.2)
        self.assertAlmostEqual(rate_exponent(1.9, True), 2.1 / 11.4)
        self.assertEqual(rate_exponent(0.5, True), 0.5)
        self.assertAlmostEqual(baseline_rate_exponent(1.5), 1. / 6.)
        self.assertEqual(baseline_rate_exponent(0.8), 0.5)
        self.assertGreater(rate_exponent(1.9), baseline_rate_exponent(1.9))


class TestEnvelope(TestCase):

    def setUp(self):
        self.model = LevyModel(TruncatedStable(1.5, 1.), drift=[0.3])
        self.schedule = schedule_case1(self.model, 2. ** 16)

    def test_closed_form(self):
        self.assertAlmostEqual(envelope(self.model, self.schedule, 1), 5., places=9)
        for k in range(2, self.schedule.m + 1):
            eps, h = self.schedule.eps[k - 2], self.schedule.h[k - 2]
            exact = eps * np.log(np.e / eps) + 4. * np.sqrt(min(h, 1.))
            self.assertAlmostEqual(envelope(self.model, self.schedule, k), exact, places=9)

    def test_ratio(self):
        m = self.schedule.m
        ratio = envelope(self.model, self.schedule, m) / envelope(self.model, self.schedule, m - 1)
        self.assertAlmostEqual(ratio, 2. ** (-1. / 3.), delta=0.01)

    def test_mse_terms(self):
        terms = mse_bound_terms(self.model, self.schedule)
        eps, h = self.schedule.eps[-1], self.schedule.h[-1]
        log_term = np.log(np.e / eps)
        self.assertAlmostEqual(terms["bias"], h ** 2 / np.sqrt(eps) * log_term + 0.09 * eps ** 2, places=12)
        self.assertGreater(terms["variance"], 0.)


class TestEstimator(TestCase):

    def setUp(self):
        self.model = LevyModel(TruncatedStable(1.5, 1.), drift=[0.3])
        self.coeff = ConstantCoefficient([[2.]])
        self.schedule = schedule_manual(self.model, [0.5, 0.25, 0.125], [0.5, 0.25, 0.1], [40, 20, 10])

    def test_sample_in_threads(self):
        one = sample_in_threads(lambda i: (i, i * i), 17, 1)
        many = sample_in_threads(lambda i: (i, i * i), 17, 5)
        np.testing.assert_array_equal(one, many)
        self.assertEqual(one.shape, (17, 2))

    def test_sample_in_threads_reports_first_failure(self):
        def sampler(i):
            if i in (5, 14):
                raise NonFiniteStateError("blow-up", 0.5)
            return float(i)
        for workers in (1, 2, 3, 8):
            with self.assertRaises(NonFiniteStateError) as ctx:
                sample_in_threads(sampler, 17, workers)
            self.assertEqual(ctx.exception.sample, 5, msg="workers = %d" % workers)

    def test_constant_payoff(self):
        result = estimate(self.model, self.coeff, [1.], Constant(0.7), self.schedule, 3)
        self.assertEqual(result.estimate, 0.7)
        self.assertEqual(result.stderr, 0.)
        self.assertEqual(result.level_means[1:], [0., 0.])

    def test_workers(self):
        one = estimate(self.model, self.coeff, [1.], Terminal(), self.schedule, 5, workers=1)
        many = estimate(self.model, self.coeff, [1.], Terminal(), self.schedule, 5, workers=3)
        self.assertEqual(one.dumps(), many.dumps())
        other = estimate(self.model, self.coeff, [1.], Terminal(), self.schedule, 6)
        self.assertNotEqual(one.estimate, other.estimate)

    def test_result_fields(self):
        result = estimate(self.model, self.coeff, [1.], Terminal(), self.schedule, 5)
        self.assertEqual(result.cost, cost(self.schedule))
        self.assertEqual(result.model_cost, result.cost)
        self.assertEqual([lv.n for lv in result.levels], [40, 20, 10])
        self.assertEqual(len(result.level_vars), 3)
        self.assertTrue(all(b >= 3 for b in result.empirical_breakpoints))
        self.assertAlmostEqual(result.stderr ** 2, sum(v / n for v, n in zip(result.level_vars, [40, 20, 10])))

    def test_ground_truth(self):
        schedule = schedule_case1(self.model, 1024)
        result = estimate(self.model, self.coeff, [1.], Terminal(), schedule, 11)
        self.assertLess(abs(result.estimate - 1.6), 4 * result.stderr)

    def test_single_sample_level(self):
        schedule = schedule_manual(self.model, [0.5, 0.25], [0.5, 0.25], [5, 1])
        with self.assertLogs("pylevymlmc.experiment.mlmc", level="WARNING"):
            result = estimate(self.model, self.coeff, [1.], Terminal(), schedule, 0)
        self.assertEqual(result.levels[1].var, 0.)

    def test_non_finite(self):
        quiet = LevyModel(TruncatedStable(1.5, 1.), drift=[1.])
        schedule = schedule_manual(quiet, [0.25], [1.], [3])
        with self.assertRaises(NonFiniteStateError) as ctx:
            estimate(quiet, AffineCoefficient([[1.]], [[[1e200]]]), [1.], Terminal(), schedule, 0)
        self.assertEqual(ctx.exception.level, 1)
        self.assertEqual(ctx.exception.sample, 0)

    def test_stream_root(self):
        a = estimate(self.model, self.coeff, [1.], Terminal(), self.schedule, RngStream(9))
        b = estimate(self.model, self.coeff, [1.], Terminal(), self.schedule, 9)
        self.assertEqual(a.estimate, b.estimate)

    def test_level_profile(self):
        profile = level_profile(self.model, self.coeff, [1.], Terminal(), self.schedule, 1, 100)
        self.assertEqual([lv.n for lv in profile], [100, 100, 100])
        self.assertTrue(all(lv.var <= 50 * lv.envelope for lv in profile[1:]))
        self.assertRaises(ValueError, level_profile, self.model, self.coeff, [1.], Terminal(), self.schedule, 1, 99)


class TestMultilevelMonteCarlo(TestCase):

    def setUp(self):
        self.document = stable_document()
        self.document["schedule"] = {"mode": "case1", "tau": 512}

    def test_config_run(self):
        mc = MultilevelMonteCarlo(self.document)
        self.assertEqual(mc.seed, 7)
        result = mc.estimate()
        self.assertEqual(result.to_json(), mc.estimate(workers=2).to_json())
        self.assertEqual(result.estimate, pylevymlmc.compute_estimate(self.document).estimate)
        self.assertNotEqual(result.estimate, mc.estimate(seed=8).estimate)
        self.assertEqual(mc.cost(), cost(mc.schedule))

    def test_keywords(self):
        model = LevyModel(TruncatedStable(1.5, 1.), drift=[0.3])
        schedule = schedule_manual(model, [0.5], [0.5], [5])
        mc = MultilevelMonteCarlo(model=model, coefficient=ConstantCoefficient([[2.]]), y0=1.,
                                  payoff=Terminal(), schedule=schedule, seed=4)
        self.assertIsInstance(mc.schedule, LevelSchedule)
        self.assertEqual(len(mc.estimate().levels), 1)
        self.assertRaises(AttributeError, MultilevelMonteCarlo, model=model, coefficient=ConstantCoefficient([[2.]]),
                          y0=1., payoff=Terminal())


class TestCostModel(TestCase):

    def test_cost_formula(self):
        rng = np.random.default_rng(2024)
        models = [LevyModel(TruncatedStable(1.5, 1.)), LevyModel(TruncatedStable(0.7, 2., dim=2)),
                  LevyModel(FiniteActivity([[0.3], [-1.2]], [2., 0.5]))]
        for trial in range(100):
            model = models[trial % len(models)]
            m = int(rng.integers(1, 7))
            eps = np.sort(rng.uniform(0.01, 1., m))[::-1]
            h = np.sort(rng.uniform(0.01, 1.5, m))[::-1]
            n = rng.integers(1, 200, m)
            schedule = schedule_manual(model, eps, h, n)
            by_hand = sum(int(n[k]) * (model.tail_mass(h[k]) + 1. / eps[k] + 1.) for k in range(m))
            self.assertAlmostEqual(cost(schedule) / by_hand, 1., places=12)
            bound = cost_bound(schedule)
            if bound is not None:
                self.assertLessEqual(cost(schedule), bound * (1 + 1e-12))

    def test_breakpoints_below_model_cost(self):
        model = LevyModel(TruncatedStable(1.5, 1.), drift=[0.3])
        schedule = schedule_case1(model, 1024)
        count = 400
        for k in (1, 4, schedule.m):
            samples = level_samples(model, ConstantCoefficient([[2.]]), [1.], Terminal(), schedule, k, count,
                                    RngStream(13).split(k))
            breakpoints = samples[:, 1]
            mean = breakpoints.mean()
            stderr = breakpoints.std(ddof=1) / np.sqrt(count)
            per_sample = schedule.tail_masses[k - 1] + 1. / schedule.eps[k - 1] + 1.
            self.assertLessEqual(mean, per_sample + 3 * stderr, msg="level %d" % k)
            self.assertTrue(np.all(breakpoints >= 1. / schedule.eps[k - 1] + 1), msg="level %d" % k)
