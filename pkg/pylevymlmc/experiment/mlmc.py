'''Multilevel Monte Carlo estimator with Gaussian correction and its level scheduler

Levels use eps_k = 2^-k and h_k = g^-1(2^k). The finest level fixes the
correction factor Sigma_m with Sigma_m Sigma_m^T = C(h_m), which every level
shares. Level 1 is sampled directly, level k >= 2 as coupled differences
f(Y^(k)) - f(Y^(k-1)).
'''
import json
import logging

import numpy as np

from . import Experiment, sample_in_threads
from .util.statistics import kahan_sum, stable_mean, sample_variance
from ..driving_path import RngStream
from ..errors import TauTooSmallError, NonFiniteStateError, IndefiniteMatrixError, ConfigError, \
    UnsupportedMeasureError
from ..levy_model import cov_factor, case_advisory
from ..scheme import LevelParams, simulate_level, simulate_pair

logger = logging.getLogger(__name__)


class LevelSchedule(object):
    """Fully instantiated MLMC plan (m, eps_k, h_k, n_k, Sigma_m)

    **Attributes**:
        - *m* = int : number of levels
        - *eps*, *h* = arrays (m,) : step lengths and jump thresholds (nonincreasing)
        - *n* = int array (m,) : samples per level
        - *tail_masses* = array (m,) : nu(B(0, h_k)^c)
        - *correction_factor* = array (dX, dX) : Sigma_m (zero if correction is off)
        - *correction* = bool : Gaussian correction enabled
        - *provenance* = dict : {"mode": "manual"|"case1"|"case2", "tau", "C1", "C2"}
    """

    def __init__(self, model, eps, h, n, provenance, correction=True):
        self.eps = np.array(eps, dtype=float)
        self.h = np.array(h, dtype=float)
        self.n = np.array(n, dtype=np.int64)
        self.m = len(self.eps)
        self.provenance = dict(provenance)
        self.correction = bool(correction)
        self.tail_masses = np.array([model.tail_mass(h) for h in self.h])
        self.f_small = np.array([model.f_small(h) for h in self.h])
        if self.correction:
            cov = model.small_jump_cov(self.h[-1])
            self.correction_factor = cov_factor(cov)
            err = np.linalg.norm(self.correction_factor @ self.correction_factor.T - cov)
            if err > 1e-10 * (1 + np.linalg.norm(cov)):
                raise IndefiniteMatrixError("Correction factor does not reproduce C(h_m) (error %g)" % err)
        else:
            self.correction_factor = np.zeros((model.dim_x, model.dim_x))
        for arr in (self.eps, self.h, self.n, self.tail_masses, self.correction_factor):
            arr.setflags(write=False)

    def __repr__(self):
        return "LevelSchedule(%s, m=%d, n=%s)" % (self.provenance.get("mode"), self.m, self.n.tolist())

    def level_params(self, k):
        """LevelParams of level k (1-based)"""
        return LevelParams(float(self.eps[k - 1]), float(self.h[k - 1]), self.correction_factor)

    def with_samples(self, n, model):
        """Copy of the schedule with other sample sizes"""
        return LevelSchedule(model, self.eps, self.h, n, self.provenance, self.correction)

    def to_json(self):
        return {"m": self.m, "eps": self.eps.tolist(), "h": self.h.tolist(), "n": self.n.tolist(),
                "correction": self.correction, "provenance": self.provenance,
                "correction_factor": self.correction_factor.tolist()}


class GStarSolver(object):
    """g*(tau) = inf{x > 1: x^3 g^-1(x)^2 / log x >= tau} by bisection in log space"""

    def __init__(self, g_inverse, bracket=(np.e, 2. ** 60), rtol=1e-9):
        self.g_inverse = g_inverse
        self.bracket = bracket
        self.rtol = rtol

    def phi(self, x):
        return x ** 3 * self.g_inverse(x) ** 2 / np.log(x)

    def solve(self, tau):
        lo, hi = self.bracket
        if self.phi(lo) >= tau:
            return lo
        if self.phi(hi) <= self.phi(lo):
            raise UnsupportedMeasureError("x^3 g^-1(x)^2 / log x does not increase on [%g, %g]: g decays too "
                                          "slowly (power-law exponent <= 2/3) for a case II schedule at "
                                          "tau = %g" % (lo, hi, tau))
        if self.phi(hi) < tau:
            raise ValueError("tau = %g lies beyond the solver bracket [%g, %g]" % (tau, lo, hi))
        # invariant: phi(lo) < tau <= phi(hi)
        while hi / lo - 1. > self.rtol:
            mid = np.sqrt(lo * hi)
            if self.phi(mid) >= tau:
                hi = mid
            else:
                lo = mid
        return hi


def _check_levels(eps, h, n):
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    h = np.atleast_1d(np.asarray(h, dtype=float))
    n = np.atleast_1d(np.asarray(n))
    if not (len(eps) == len(h) == len(n)) or len(eps) == 0:
        raise ConfigError("eps, h and n must be nonempty lists of equal length")
    if np.any(eps <= 0) or np.any(h <= 0):
        raise ConfigError("eps and h must be positive")
    if np.any(np.diff(eps) > 0) or np.any(np.diff(h) > 0):
        raise ConfigError("eps and h must be nonincreasing in the level")
    if np.any(n < 1) or np.any(n != np.floor(n)):
        raise ConfigError("Sample sizes must be positive integers")
    return eps, h, n.astype(np.int64)


def schedule_manual(model, eps, h, n, correction=True):
    """Schedule from explicit per-level eps, h and n"""
    eps, h, n = _check_levels(eps, h, n)
    return LevelSchedule(model, eps, h, n, {"mode": "manual"}, correction)


def _level_sizes(model, m, scale):
    """Raw n_k = floor(scale * g^-1(2^k) / g^-1(2^m)), k = 1..m"""
    ref = model.g_inverse(2. ** m)
    return np.array([np.floor(scale * model.g_inverse(2. ** k) / ref) for k in range(1, m + 1)])


def _case1_plan(model, tau, C1, C2):
    if not tau > 1:
        return None
    log_tau = np.log(tau)
    m = int(np.floor(np.log2(C1 * (tau * log_tau) ** (2. / 3.))))
    if m < 2:
        return None
    n = _level_sizes(model, m, C2 * tau ** (1. / 3.) * log_tau ** (-2. / 3.))
    if n[-1] < 1:
        return None
    return m, n


def _case2_plan(model, tau, C1, C2):
    if not tau > 1:
        return None
    gs = GStarSolver(model.g_inverse).solve(tau)
    m = int(np.floor(np.log2(C1 * gs)))
    if m < 2:
        return None
    n = _level_sizes(model, m, C2 * gs ** 2 / np.log(gs))
    if n[-1] < 1:
        return None
    return m, n


def _minimal_tau(plan):
    """Smallest admissible tau found by a doubling scan refined by bisection"""
    lo = 1.
    for j in range(1, 200):
        hi = 2. ** j
        if plan(hi) is not None:
            for _ in range(60):
                mid = np.sqrt(lo * hi)
                if plan(mid) is not None:
                    hi = mid
                else:
                    lo = mid
            return hi
        lo = hi
    return None


def _scheduled(model, tau, C1, C2, mode, correction):
    planner = _case1_plan if mode == "case1" else _case2_plan
    plan = planner(model, tau, C1, C2)
    if plan is None:
        minimal = _minimal_tau(lambda t: planner(model, t, C1, C2))
        raise TauTooSmallError("tau = %g too small for %s (need m >= 2 and n_m >= 1)" % (tau, mode),
                               minimal_tau=minimal)
    m, n = plan
    if np.any(n < 1):
        logger.warning("Clamped %d level sample sizes to 1", int(np.sum(n < 1)))
        n = np.maximum(n, 1)
    eps = 2. ** -np.arange(1, m + 1)
    h = np.array([model.g_inverse(2. ** k) for k in range(1, m + 1)])
    if case_advisory(model) != mode:
        logger.warning("Schedule built for %s but the model suggests %s", mode, case_advisory(model))
    schedule = LevelSchedule(model, eps, h, n, {"mode": mode, "tau": float(tau), "C1": float(C1),
                                                "C2": float(C2)}, correction)
    bad = np.flatnonzero(schedule.tail_masses > 1. / schedule.eps * (1 + 1e-12))
    if len(bad):
        logger.warning("nu(B(0, h_k)^c) > 1/eps_k on levels %s: g does not dominate the tail",
                       (bad + 1).tolist())
    return schedule


def schedule_case1(model, tau, C1=1., C2=1., correction=True):
    """Schedule for case I: m = floor(log2 C1 (tau log tau)^(2/3)),
    n_k = floor(C2 tau^(1/3) (log tau)^(-2/3) g^-1(2^k) / g^-1(2^m))

    **Arguments**:
        - *model* = LevyModel : model with a dominating function g
        - *tau* = float : computational budget

    **Optional Keywords**:
        - *C1*, *C2* = float : schedule constants (default: 1)
        - *correction* = bool : use the Gaussian correction (default: True)
    """
    return _scheduled(model, tau, C1, C2, "case1", correction)


def schedule_case2(model, tau, C1=1., C2=1., correction=True):
    """Schedule for case II: m = floor(log2 C1 g*(tau)),
    n_k = floor(C2 g*(tau)^2 / log g*(tau) g^-1(2^k) / g^-1(2^m))"""
    return _scheduled(model, tau, C1, C2, "case2", correction)


def schedule_from_spec(model, spec, **kwds):
    """Build a schedule from a configuration's schedule section

    **Optional Keywords**:
        - *tau* = float : override the budget of a scheduled mode
        - *correction* = bool : override the correction flag
    """
    correction = kwds.get("correction", None)
    if correction is None:
        correction = spec.get("correction", True)
    if spec["mode"] == "manual":
        return schedule_manual(model, spec["eps"], spec["h"], spec["n"], correction)
    tau = kwds.get("tau", None) or spec["tau"]
    builder = schedule_case1 if spec["mode"] == "case1" else schedule_case2
    return builder(model, tau, spec.get("C1", 1.), spec.get("C2", 1.), correction)


def cost(schedule):
    """Model cost sum_k n_k [nu(B(0, h_k)^c) + 1/eps_k + 1]"""
    return float(np.sum(schedule.n * (schedule.tail_masses + 1. / schedule.eps + 1.)))


def cost_preconditions(schedule):
    """eps_1 <= 1 and nu(B(0, h_k)^c) <= 1/eps_k for all k"""
    return bool(schedule.eps[0] <= 1 and np.all(schedule.tail_masses <= 1. / schedule.eps))


def cost_bound(schedule):
    """Simplified bound 3 sum_k n_k / eps_k, or None if its preconditions fail"""
    if not cost_preconditions(schedule):
        return None
    return float(3. * np.sum(schedule.n / schedule.eps))


def rate_exponent(beta, gaussian_part=False):
    """Guaranteed error exponent gamma in err(tau) <~ tau^-gamma with Gaussian correction"""
    if beta < 1:
        return 0.5
    if not gaussian_part or beta >= 4. / 3.:
        return (4. - beta) / (6. * beta)
    return beta / (6. * beta - 4.)


def baseline_rate_exponent(beta):
    """Error exponent of plain truncation without Gaussian correction"""
    if beta < 1:
        return 0.5
    return 1. / beta - 0.5


def _coarser_parameters(model, schedule, k):
    """(eps_{k-1}, h_{k-1}); level 0 extends the dyadic pattern below level 1"""
    if k >= 2:
        return schedule.eps[k - 2], schedule.h[k - 2]
    return 2. * schedule.eps[0], model.g_inverse(model.g_bound(schedule.h[0]) / 2.)


def envelope(model, schedule, k):
    """Level variance envelope eps_{k-1} log(e / eps_{k-1}) + F(h_{k-1})"""
    eps, h = _coarser_parameters(model, schedule, k)
    return float(eps * np.log(np.e / eps) + model.f_small(h))


def mse_bound_terms(model, schedule):
    """Deterministic terms of the mean squared error bound

    **Returns**:
        - dict with "bias" (squared bias proxy of the finest level) and "variance"
          (sum_k envelope_k / n_k)
    """
    eps, h = schedule.eps[-1], schedule.h[-1]
    log_term = np.log(np.e / eps)
    if np.any(model.sigma):
        bias = (h ** 2 / np.sqrt(eps) + eps) * log_term
    else:
        drift = np.linalg.norm(model.drift - model.f_zero(h))
        bias = h ** 2 / np.sqrt(eps) * log_term + drift ** 2 * eps ** 2
    variance = kahan_sum([envelope(model, schedule, k) / schedule.n[k - 1] for k in range(1, schedule.m + 1)])
    return {"bias": float(bias), "variance": float(variance)}


class LevelStatistic(object):
    """Per-level statistics of f(Y^(1)) (k = 1) or f(Y^(k)) - f(Y^(k-1))"""

    def __init__(self, k, n, mean, var, eps, h, envelope, breakpoints):
        self.k = k
        self.n = n
        self.mean = mean
        self.var = var
        self.eps = eps
        self.h = h
        self.envelope = envelope
        self.breakpoints = breakpoints

    def to_json(self):
        return {"k": self.k, "n": self.n, "mean": self.mean, "var": self.var, "eps": self.eps,
                "h": self.h, "envelope": self.envelope, "breakpoints": self.breakpoints}


class MlmcResult(object):
    """Estimate, standard error, model cost and per-level statistics"""

    def __init__(self, estimate, stderr, cost, levels):
        self.estimate = estimate
        self.stderr = stderr
        self.cost = cost
        self.levels = levels

    @property
    def level_means(self):
        return [lv.mean for lv in self.levels]

    @property
    def level_vars(self):
        return [lv.var for lv in self.levels]

    @property
    def model_cost(self):
        return self.cost

    @property
    def empirical_breakpoints(self):
        return [lv.breakpoints for lv in self.levels]

    def to_json(self):
        return {"estimate": self.estimate, "stderr": self.stderr, "cost": self.cost,
                "levels": [lv.to_json() for lv in self.levels]}

    def dumps(self):
        return json.dumps(self.to_json())


def level_samples(model, coeff, y0, payoff, schedule, k, count, stream, workers=1):
    """count samples of level k as array (count, 2): payoff (difference), fine breakpoints

    Sample i uses the stream address stream.split(i).
    """
    params = schedule.level_params(k)
    if k == 1:
        def sampler(i):
            path = simulate_level(model, coeff, y0, params, stream.split(i))
            return payoff.evaluate(path), len(path.breakpoints)
    else:
        coarse = schedule.level_params(k - 1)

        def sampler(i):
            fine_path, coarse_path = simulate_pair(model, coeff, y0, params, coarse, stream.split(i))
            return payoff.evaluate(fine_path) - payoff.evaluate(coarse_path), len(fine_path.breakpoints)
    try:
        return sample_in_threads(sampler, int(count), workers)
    except NonFiniteStateError as e:
        e.level = k
        raise


def _level_statistic(model, schedule, k, samples):
    n = len(samples)
    if n == 1:
        logger.warning("Level %d has a single sample; its variance is reported as 0", k)
    mean = stable_mean(samples[:, 0])
    return LevelStatistic(k, n, float(mean), float(sample_variance(samples[:, 0], mean)),
                          float(schedule.eps[k - 1]), float(schedule.h[k - 1]),
                          envelope(model, schedule, k), float(stable_mean(samples[:, 1])))


def estimate(model, coeff, y0, payoff, schedule, seed, **kwds):
    """Multilevel estimate of E f(Y)

    **Arguments**:
        - *model* = LevyModel
        - *coeff* = CoefficientField
        - *y0* = array (dY,) : initial value
        - *payoff* = Payoff
        - *schedule* = LevelSchedule
        - *seed* = int or RngStream : root; level k, sample i use stream (seed, (k, i))

    **Optional Keywords**:
        - *workers* = int : number of threads; never changes the result (default: 1)
        - *verbose* = bool : log per-level progress (default: False)

    **Returns**:
        - MlmcResult
    """
    workers = kwds.get("workers", 1)
    verbose = kwds.get("verbose", False)
    root = seed if isinstance(seed, RngStream) else RngStream(seed)
    levels = []
    for k in range(1, schedule.m + 1):
        samples = level_samples(model, coeff, y0, payoff, schedule, k, schedule.n[k - 1],
                                root.split(k), workers)
        levels.append(_level_statistic(model, schedule, k, samples))
        if verbose:
            logger.info("Level %d: n = %d, mean = %g, var = %g", k, levels[-1].n, levels[-1].mean,
                        levels[-1].var)
    total = kahan_sum([lv.mean for lv in levels])
    stderr = np.sqrt(kahan_sum([lv.var / lv.n for lv in levels]))
    return MlmcResult(float(total), float(stderr), cost(schedule), levels)


def level_profile(model, coeff, y0, payoff, schedule, seed, n_probe, **kwds):
    """Empirical level statistics with n_probe samples per level, next to the variance envelope

    **Returns**:
        - list of LevelStatistic (n = n_probe on every level)
    """
    if n_probe < 100:
        raise ValueError("level_profile needs n_probe >= 100, got %d" % n_probe)
    workers = kwds.get("workers", 1)
    root = RngStream(seed)
    profile = []
    for k in range(1, schedule.m + 1):
        samples = level_samples(model, coeff, y0, payoff, schedule, k, n_probe, root.split(k), workers)
        profile.append(_level_statistic(model, schedule, k, samples))
    return profile


class MultilevelMonteCarlo(Experiment):
    """Multilevel Monte Carlo experiment on a configured model

    Example::

        mc = MultilevelMonteCarlo("configs/stable_1_5.json", workers=4)
        result = mc.estimate()
        print(result.estimate, result.stderr)
    """

    def __init__(self, config=None, **kwds):
        """Multilevel Monte Carlo experiment

        **Arguments**:
            - *config* = ExperimentConfig, dict or string (filename of a JSON config)

        **Optional Keywords**:
            - *schedule* = LevelSchedule : use instead of the configured schedule
            - further keywords as for Experiment
        """
        super(MultilevelMonteCarlo, self).__init__(config, **kwds)
        if kwds.get("schedule", None) is not None:
            self.schedule = kwds["schedule"]
        elif self.config is not None:
            self.schedule = schedule_from_spec(self.model, self.config.schedule_spec)
        else:
            raise AttributeError("MultilevelMonteCarlo needs a config or a schedule")

    def estimate(self, **kwds):
        """Run the multilevel estimator with the experiment's seed

        **Optional Keywords**:
            - *seed* = int : override the seed
            - *workers* = int : override the number of threads
        """
        seed = kwds.get("seed", None)
        seed = self.seed if seed is None else seed
        self.info("Running %r with seed %s", self.schedule, seed)
        return estimate(self.model, self.coefficient, self.y0, self.payoff, self.schedule, seed,
                        workers=kwds.get("workers", None) or self.workers, verbose=self.verbose)

    def level_profile(self, n_probe, **kwds):
        seed = kwds.get("seed", None)
        seed = self.seed if seed is None else seed
        return level_profile(self.model, self.coefficient, self.y0, self.payoff, self.schedule, seed,
                             n_probe, workers=kwds.get("workers", None) or self.workers)

    def cost(self):
        return cost(self.schedule)
