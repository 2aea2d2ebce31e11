'''Cost versus error sweeps over the budget tau

For each tau the scheduled estimator is repeated with independent seeds, and
the RMS error against the best available reference is recorded next to the
model cost. A log-log fit of error against cost gives the observed exponent,
to be compared with the guaranteed one.
'''
import csv
import logging

import numpy as np

from . import Experiment
from .mlmc import schedule_from_spec, estimate, cost, rate_exponent, baseline_rate_exponent
from .oracle import closed_form_sf, reference_estimate
from .util.statistics import loglog_slope, rms, bootstrap_fraction
from ..errors import ConfigError
from ..payoffs import Terminal

logger = logging.getLogger(__name__)

CSV_HEADER = ["tau", "cost", "abs_error", "stderr", "repetitions"]

# stream branch of the repetitions, apart from the plain estimate's levels
SWEEP_BRANCH = 1 << 32


class SweepRow(object):
    def __init__(self, tau, cost, abs_error, stderr, repetitions):
        self.tau = tau
        self.cost = cost
        self.abs_error = abs_error
        self.stderr = stderr
        self.repetitions = repetitions

    def as_list(self):
        return [self.tau, self.cost, self.abs_error, self.stderr, self.repetitions]


class RateSweep(Experiment):
    """Cost versus RMS error over the configured tau list

    Example::

        sweep = RateSweep("configs/stable_1_5.json")
        sweep.run()
        sweep.write_csv(sys.stdout)
    """

    def __init__(self, config=None, **kwds):
        """Rate sweep

        **Optional Keywords**:
            - *tau_list* = list of floats : budgets (default: config sweep)
            - *repetitions* = int : seeds per budget (default: config sweep or 1)
            - further keywords as for Experiment
        """
        super(RateSweep, self).__init__(config, **kwds)
        sweep = (self.config.sweep if self.config is not None else None) or {}
        self.tau_list = kwds.get("tau_list", None) or sweep.get("tau_list", None)
        if not self.tau_list:
            raise ConfigError("Rate sweep needs a 'sweep' section with 'tau_list'")
        self.repetitions = int(kwds.get("repetitions", None) or sweep.get("repetitions", 1))
        self.schedule_spec = kwds.get("schedule_spec", None) or self.config.schedule_spec
        if self.schedule_spec["mode"] == "manual":
            raise ConfigError("Rate sweeps need a scheduled mode (case1 or case2)")
        self.rows = []
        self._reference = None

    def repetition_stream(self, r):
        """Root stream of repetition r; shared across budgets"""
        return self.root_stream.split(SWEEP_BRANCH).split(r)

    def reference_value(self):
        """Closed form if available, else a configured value, else a fine Monte Carlo reference"""
        if self._reference is not None:
            return self._reference
        reference = (self.config.reference if self.config is not None else None) or {}
        if "value" in reference:
            self._reference = float(reference["value"])
        elif self.coefficient.is_constant and isinstance(self.payoff, Terminal):
            self._reference = closed_form_sf(self.model, self.coefficient, self.y0, self.payoff)
        elif {"eps_ref", "h_ref", "n"} <= set(reference):
            ref = reference_estimate(self.model, self.coefficient, self.y0, self.payoff,
                                     reference["eps_ref"], reference["h_ref"], reference["n"],
                                     reference.get("seed", self.seed + 1), workers=self.workers)
            self.info("Monte Carlo reference %r", ref)
            self._reference = ref.value
        else:
            raise ConfigError("No reference available: give reference.value or eps_ref/h_ref/n")
        return self._reference

    def errors_at(self, tau, **kwds):
        """Errors and reported standard errors of the repetitions at budget tau

        **Optional Keywords**:
            - *correction* = bool : override the schedule's correction flag

        **Returns**:
            - (schedule, errors array, stderr array)
        """
        schedule = schedule_from_spec(self.model, self.schedule_spec, tau=tau,
                                      correction=kwds.get("correction", None))
        reference = self.reference_value()
        errors = np.zeros(self.repetitions)
        stderrs = np.zeros(self.repetitions)
        for r in range(self.repetitions):
            result = estimate(self.model, self.coefficient, self.y0, self.payoff, schedule,
                              self.repetition_stream(r), workers=self.workers)
            errors[r] = result.estimate - reference
            stderrs[r] = result.stderr
        return schedule, errors, stderrs

    def run(self):
        """Fill self.rows with one SweepRow per tau"""
        self.rows = []
        for tau in self.tau_list:
            schedule, errors, stderrs = self.errors_at(tau)
            row = SweepRow(float(tau), cost(schedule), rms(errors, 0.), float(np.sqrt(np.mean(stderrs ** 2))),
                           self.repetitions)
            self.info("tau = %g: cost = %g, RMS error = %g", row.tau, row.cost, row.abs_error)
            self.rows.append(row)
        return self.rows

    def fitted_slope(self):
        """Slope of log RMS error against log cost"""
        if len(self.rows) < 2:
            return float("nan")
        return loglog_slope([r.cost for r in self.rows], [r.abs_error for r in self.rows])

    def theoretical_exponent(self):
        beta = self.model.bg_index()
        if self.schedule_spec.get("correction", True):
            return rate_exponent(beta, bool(np.any(self.model.sigma)))
        return baseline_rate_exponent(beta)

    def write_csv(self, stream):
        """CSV with header tau,cost,abs_error,stderr,repetitions and '#' comment lines"""
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(row.as_list())
        stream.write("# fitted_slope_error_vs_cost = %r\n" % self.fitted_slope())
        stream.write("# theoretical_slope = %r\n" % -self.theoretical_exponent())

    def correction_advantage(self, tau, **kwds):
        """Compare the corrected estimator with plain truncation on the same schedule and seeds

        **Optional Keywords**:
            - *resamples* = int : bootstrap resamples (default: 1000)

        **Returns**:
            - dict with "rms_corrected", "rms_uncorrected" and "agreement" (fraction of
              bootstrap resamples in which the corrected RMS error is smaller)
        """
        _, corrected, _ = self.errors_at(tau, correction=True)
        _, plain, _ = self.errors_at(tau, correction=False)
        return {"tau": float(tau), "rms_corrected": rms(corrected, 0.), "rms_uncorrected": rms(plain, 0.),
                "agreement": bootstrap_fraction(corrected, plain, kwds.get("resamples", 1000), self.seed)}


ORDERS_HEADER = ["beta", "plain", "corrected", "corrected_gaussian"]


def convergence_orders(betas):
    """Guaranteed error exponents against the Blumenthal-Getoor index

    **Arguments**:
        - *betas* = iterable of floats in [0, 2]

    **Returns**:
        - list of (beta, plain truncation, corrected without Wiener part,
          corrected with Wiener part)
    """
    rows = []
    for beta in betas:
        beta = float(beta)
        if not 0 <= beta <= 2:
            raise ValueError("Blumenthal-Getoor index must lie in [0, 2], got %r" % beta)
        rows.append((beta, baseline_rate_exponent(beta), rate_exponent(beta, False), rate_exponent(beta, True)))
    return rows


def write_orders_csv(stream, betas=None, **kwds):
    """CSV of convergence_orders on a grid of beta, for plotting order against index

    **Optional Keywords**:
        - *model* = LevyModel : append its index as a '#' comment line
    """
    if betas is None:
        betas = np.linspace(0., 2., 41)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(ORDERS_HEADER)
    for row in convergence_orders(betas):
        writer.writerow(row)
    model = kwds.get("model", None)
    if model is not None:
        stream.write("# model_bg_index = %r\n" % model.bg_index())
