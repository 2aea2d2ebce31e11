from unittest import TestCase

import numpy as np

from pylevymlmc.errors import ConfigError, DimensionMismatchError
from pylevymlmc.payoffs import Terminal, Lookback, AsianAverage, Custom, Constant, evaluate, \
    payoff_from_json
from pylevymlmc.scheme import PathSkeleton


def skeleton(times, values):
    return PathSkeleton(np.asarray(times, dtype=float), np.asarray(values, dtype=float).reshape(len(times), -1))


class TestPayoffs(TestCase):

    def setUp(self):
        self.two_piece = skeleton([0., 0.5, 1.], [1., 3., 3.])

    def test_two_piece(self):
        self.assertEqual(evaluate(Lookback(), self.two_piece), 3.)
        self.assertEqual(evaluate(AsianAverage(), self.two_piece), 2.)
        self.assertEqual(evaluate(Terminal(), self.two_piece), 3.)

    def test_constant_path(self):
        path = skeleton([0., 0.3, 0.7, 1.], [2.5] * 4)
        for payoff in (Terminal(), Lookback(), AsianAverage()):
            self.assertAlmostEqual(payoff(path), 2.5, places=14)
        self.assertEqual(Constant(-1.25)(path), -1.25)
        self.assertEqual(Constant(1.).lip_const, 0.)

    def test_weights(self):
        path = skeleton([0., 0.5, 1.], [[1., 2.], [3., -1.], [0., 4.]])
        self.assertEqual(Terminal([2., 1.])(path), 4.)
        self.assertEqual(AsianAverage([1., 1.])(path), 0.5 * 3. + 0.5 * 2.)
        self.assertEqual(Lookback(coordinate=1)(path), 4.)
        self.assertAlmostEqual(Terminal([3., 4.]).lip_const, 5.)

    def test_shift_invariance(self):
        path = skeleton([0., 0.2, 1.], [0.5, -1., 2.])
        shifted = skeleton([0., 0.2, 1.], [1.5, 0., 3.])
        for payoff in (Terminal(), Lookback(), AsianAverage()):
            self.assertAlmostEqual(payoff(shifted) - payoff(path), 1., places=12)

    def test_lipschitz(self):
        rng = np.random.default_rng(0)
        times = np.concatenate([[0.], np.sort(rng.random(20)), [1.]])
        for _ in range(50):
            x = skeleton(times, rng.standard_normal((len(times), 2)))
            y = skeleton(times, rng.standard_normal((len(times), 2)))
            sup = np.max(np.linalg.norm(x.values - y.values, axis=1))
            for payoff in (Terminal([0.6, 0.8]), Lookback(1), AsianAverage([1., 0.])):
                self.assertLessEqual(abs(payoff(x) - payoff(y)), payoff.lip_const * sup + 1e-12)

    def test_custom(self):
        payoff = Custom(lambda path: float(path.values[:, 0].min()), 1.)
        self.assertEqual(payoff(self.two_piece), 1.)
        self.assertRaises(ValueError, Custom, len, -1.)

    def test_dimension(self):
        path = skeleton([0., 1.], [[1., 2.], [1., 2.]])
        self.assertRaises(DimensionMismatchError, Terminal([1.]), path)
        self.assertRaises(DimensionMismatchError, Lookback(coordinate=2), path)

    def test_from_json(self):
        self.assertEqual(payoff_from_json({"kind": "terminal"}, 3).weights.tolist(), [1., 0., 0.])
        self.assertEqual(payoff_from_json({"kind": "lookback", "coordinate": 1}).coordinate, 1)
        self.assertEqual(payoff_from_json({"kind": "constant", "value": 2})(self.two_piece), 2.)
        self.assertRaises(ConfigError, payoff_from_json, {"kind": "digital"})
        self.assertRaises(ConfigError, payoff_from_json, {"kind": "terminal", "strike": 1.})
        self.assertRaises(ConfigError, payoff_from_json, {"kind": "constant"})
