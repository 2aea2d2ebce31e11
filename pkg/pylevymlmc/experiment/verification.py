# -*- coding: utf-8 -*-
"""
Runs a series of checks on a configured experiment: analytic quantities against
quadrature, domination of the integral by g, uniform ellipticity, the doubling
property, the preconditions of the cost bound, the coupling marginal law and
determinism across worker counts.

Each check reports PASS or FAIL with a short message; a check that raises is a FAIL.
"""
import logging

import numpy as np

from . import Experiment
from .mlmc import schedule_from_spec, estimate, cost_preconditions
from .oracle import quad_tail_mass, quad_f_small, quad_f_zero, quad_bar_g, ks_two_sample
from ..levy_model import FiniteActivity, check_ue, validate_doubling, gamma_star
from ..scheme import simulate_level, simulate_pair

logger = logging.getLogger(__name__)

# relative agreement demanded between closed forms and quadrature
QUAD_AGREEMENT = 1e-7


class CheckResult(object):
    def __init__(self, name, passed, message=""):
        self.name = name
        self.passed = bool(passed)
        self.message = message

    def __str__(self):
        return "%s %s: %s" % ("PASS" if self.passed else "FAIL", self.name, self.message)


def _support_radius(model):
    measure = model.measure
    if isinstance(measure, FiniteActivity):
        return float(measure.norms.max())
    return float(measure.radius)


class Verification(Experiment):
    """Invariant checks of a configured experiment"""

    def __init__(self, config=None, **kwds):
        """Verification suite

        **Optional Keywords**:
            - *ks_samples* = int : samples per side of the coupling KS test (default: 1000)
            - *determinism_samples* = int : cap on n_k for the determinism run (default: 20)
            - further keywords as for Experiment
        """
        super(Verification, self).__init__(config, **kwds)
        self.ks_samples = kwds.get("ks_samples", 1000)
        self.determinism_samples = kwds.get("determinism_samples", 20)
        self.schedule = kwds.get("schedule", None)
        if self.schedule is None:
            self.schedule = schedule_from_spec(self.model, self.config.schedule_spec)
        radius = _support_radius(self.model)
        self.h_grid = np.geomspace(1e-4 * radius, radius, 50)
        self.results = []

    def check_quadrature(self):
        worst = 0.
        for h in self.h_grid[::2]:
            pairs = [(self.model.tail_mass(h), quad_tail_mass(self.model, h)),
                     (self.model.f_small(h), quad_f_small(self.model, h))]
            for exact, quad in pairs:
                worst = max(worst, abs(exact - quad) / max(abs(quad), 1e-300))
            scale = 1 + self.model.second_moment
            worst = max(worst, np.max(np.abs(self.model.f_zero(h) - quad_f_zero(self.model, h))) / scale)
        return CheckResult("quadrature", worst <= QUAD_AGREEMENT, "worst relative deviation %.3g" % worst)

    def check_domination(self):
        violations = [h for h in self.h_grid
                      if quad_bar_g(self.model, h) > self.model.g_bound(h) * (1 + 1e-9)]
        if violations:
            return CheckResult("domination", False, "g below the integral at %d of %d levels (first h = %g)"
                               % (len(violations), len(self.h_grid), violations[0]))
        return CheckResult("domination", True, "g dominates at %d levels" % len(self.h_grid))

    def check_ue(self):
        report = check_ue(self.model, self.h_grid[:-1], 64, seed=self.seed)
        return CheckResult("uniform_ellipticity", report.passed,
                           "theta = %g on a %d-dimensional subspace" % (report.theta, report.subspace_dim))

    def check_doubling(self):
        gs = gamma_star(self.model)
        if not 1 < gs < 2:
            return CheckResult("doubling", False, "no gamma in (1, 2) exists (gamma* = %g)" % gs)
        report = validate_doubling(self.model, gs, self.h_grid)
        return CheckResult("doubling", bool(report), "gamma* = %.6f" % gs)

    def check_cost_preconditions(self):
        ok = cost_preconditions(self.schedule)
        return CheckResult("cost_preconditions", ok, "eps_1 = %g, max nu(B(0,h_k)^c) eps_k = %g"
                           % (self.schedule.eps[0], np.max(self.schedule.tail_masses * self.schedule.eps)))

    def check_coupling(self):
        k = min(2, self.schedule.m)
        fine = self.schedule.level_params(k)
        coarse = self.schedule.level_params(max(k - 1, 1))
        pair_root = self.root_stream.split(1)
        level_root = self.root_stream.split(2)
        n = self.ks_samples
        from_pair = [self.payoff.evaluate(simulate_pair(self.model, self.coefficient, self.y0, fine, coarse,
                                                        pair_root.split(i))[0]) for i in range(n)]
        direct = [self.payoff.evaluate(simulate_level(self.model, self.coefficient, self.y0, fine,
                                                      level_root.split(i))) for i in range(n)]
        stat, p = ks_two_sample(from_pair, direct)
        return CheckResult("coupling_ks", p > 0.01, "level %d: KS statistic %.4f, p = %.3g" % (k, stat, p))

    def check_determinism(self):
        small = self.schedule.with_samples(np.minimum(self.schedule.n, self.determinism_samples), self.model)
        one = estimate(self.model, self.coefficient, self.y0, self.payoff, small, self.seed, workers=1)
        many = estimate(self.model, self.coefficient, self.y0, self.payoff, small, self.seed, workers=4)
        same = one.to_json() == many.to_json()
        return CheckResult("determinism", same, "estimate %r with 1 and 4 workers" % one.estimate)

    def run(self):
        """Run all checks; returns True if every check passed"""
        self.results = []
        for check in (self.check_quadrature, self.check_domination, self.check_ue, self.check_doubling,
                      self.check_cost_preconditions, self.check_coupling, self.check_determinism):
            name = check.__name__[len("check_"):]
            try:
                result = check()
            except Exception as e:
                result = CheckResult(name, False, "%s: %s" % (type(e).__name__, e))
            self.info(str(result))
            self.results.append(result)
        return all(r.passed for r in self.results)
