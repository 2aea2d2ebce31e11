'''Independent reference computations

Adaptive quadrature of the measure integrals (in the log-radial variable, never
through the families' antiderivatives), fine single-level Monte Carlo references,
the constant-coefficient closed form and a two-sample Kolmogorov-Smirnov test.
'''
import logging

import numpy as np
import scipy.integrate
import scipy.stats

import pylevymlmc
from . import sample_in_threads
from .util.statistics import stable_mean, sample_variance
from ..driving_path import RngStream
from ..errors import NotConstantCoefficientError
from ..levy_model import AxisStable, FiniteActivity, cov_factor
from ..payoffs import Terminal
from ..scheme import LevelParams, simulate_level

logger = logging.getLogger(__name__)


def _log_radial_quad(func, lo, hi, breaks=()):
    """int_lo^hi func(r) dr via r = e^u, split at breaks; lo may be 0"""
    if hi <= lo:
        return 0.
    nodes = [lo] + [b for b in sorted(breaks) if lo < b < hi] + [hi]
    total = 0.
    for a, b in zip(nodes[:-1], nodes[1:]):
        ua = -np.inf if a == 0 else np.log(a)
        val, _ = scipy.integrate.quad(lambda u: func(np.exp(u)) * np.exp(u), ua, np.log(b),
                                      epsrel=pylevymlmc.quad_rel_tol, epsabs=pylevymlmc.quad_abs_tol,
                                      limit=200)
        total += val
    return total


def _radial_law(model):
    """(radial density of |x| under nu, support radius, breakpoints) for continuous families"""
    measure = model.measure
    if isinstance(measure, AxisStable):
        weight = float(np.sum(measure.intensity_positive + measure.intensity_negative))
        alpha = measure.alpha
        return (lambda r: weight * r ** (-1. - alpha)), measure.radius, ()
    return measure.radial_density, measure.radius, measure.breakpoints()


def quad_tail_mass(model, h):
    """nu(B(0, h)^c) by quadrature"""
    measure = model.measure
    if isinstance(measure, FiniteActivity):
        return float(sum(mass for x, mass in zip(measure.atoms, measure.masses) if np.linalg.norm(x) >= h))
    density, radius, breaks = _radial_law(model)
    return _log_radial_quad(density, h, radius, breaks)


def quad_f_small(model, h):
    """F(h) = int_{B(0,h)} |x|^2 nu(dx) by quadrature"""
    measure = model.measure
    if isinstance(measure, FiniteActivity):
        return float(sum(mass * np.dot(x, x) for x, mass in zip(measure.atoms, measure.masses)
                         if np.linalg.norm(x) < h))
    density, radius, breaks = _radial_law(model)
    return _log_radial_quad(lambda r: r ** 2 * density(r), 0., min(h, radius), breaks)


def quad_f_zero(model, h):
    """F_0(h) = int_{B(0,h)^c} x nu(dx) by quadrature (zero for isotropic families)"""
    measure = model.measure
    out = np.zeros(model.dim_x)
    if isinstance(measure, FiniteActivity):
        for x, mass in zip(measure.atoms, measure.masses):
            if np.linalg.norm(x) >= h:
                out += mass * x
        return out
    if isinstance(measure, AxisStable):
        first = _log_radial_quad(lambda r: r ** (-measure.alpha), h, measure.radius)
        return (measure.intensity_positive - measure.intensity_negative) * first
    return out


def quad_bar_g(model, h):
    """int (|x|^2 / h^2 ^ 1) nu(dx) by quadrature"""
    measure = model.measure
    if isinstance(measure, FiniteActivity):
        return float(sum(mass * min(np.dot(x, x) / h ** 2, 1.) for x, mass in
                         zip(measure.atoms, measure.masses)))
    density, radius, breaks = _radial_law(model)
    small = _log_radial_quad(lambda r: r ** 2 / h ** 2 * density(r), 0., min(h, radius), breaks)
    return small + _log_radial_quad(density, h, radius, breaks)


def mc_small_jump_cov(model, h, n=20000, seed=0):
    """Monte Carlo estimate of C(h) for isotropic families: F(h) E[u u^T] over uniform directions u

    **Returns**:
        - (estimate, standard error) arrays of shape (dX, dX)
    """
    d = model.dim_x
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((n, d))
    u /= np.linalg.norm(u, axis=1)[:, None]
    outer = np.einsum("ni,nj->nij", u, u)
    F = quad_f_small(model, h)
    return F * outer.mean(axis=0), F * outer.std(axis=0, ddof=1) / np.sqrt(n)


class ReferenceEstimate(object):
    """Plain Monte Carlo reference value at fine parameters (eps_ref, h_ref)"""

    def __init__(self, value, stderr, n, eps_ref, h_ref):
        self.value = value
        self.stderr = stderr
        self.n = n
        self.eps_ref = eps_ref
        self.h_ref = h_ref

    def __repr__(self):
        return "ReferenceEstimate(%g +- %g, n=%d, eps_ref=%g, h_ref=%g)" % \
               (self.value, self.stderr, self.n, self.eps_ref, self.h_ref)

    def is_finer_than(self, schedule):
        """eps_ref <= eps_m / 4 and h_ref <= h_m / 2"""
        return bool(self.eps_ref <= schedule.eps[-1] / 4. and self.h_ref <= schedule.h[-1] / 2.)


def reference_estimate(model, coeff, y0, payoff, eps_ref, h_ref, n, seed, **kwds):
    """Single-level Monte Carlo reference of E f(Y) at fine parameters

    **Arguments**:
        - *eps_ref*, *h_ref* = float : step length and jump threshold
        - *n* = int : number of samples (at least 1000)
        - *seed* = int : root seed

    **Optional Keywords**:
        - *workers* = int : number of threads (default: 1)
        - *correction* = bool : Gaussian correction at h_ref (default: True)
    """
    if n < 1000:
        raise ValueError("reference_estimate needs n >= 1000, got %d" % n)
    if kwds.get("correction", True):
        factor = cov_factor(model.small_jump_cov(h_ref))
    else:
        factor = np.zeros((model.dim_x, model.dim_x))
    params = LevelParams(float(eps_ref), float(h_ref), factor)
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    stream = RngStream(seed)
    values = sample_in_threads(lambda i: payoff.evaluate(simulate_level(model, coeff, y0, params,
                                                                        stream.split(i))),
                               int(n), kwds.get("workers", 1))
    mean = stable_mean(values)
    stderr = np.sqrt(sample_variance(values, mean) / n)
    return ReferenceEstimate(float(mean), float(stderr), int(n), float(eps_ref), float(h_ref))


def ks_two_sample(xs, ys):
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value

    **Returns**:
        - (statistic, p_value)
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 100 or len(ys) < 100:
        raise ValueError("KS test needs at least 100 samples per side")
    result = scipy.stats.ks_2samp(xs, ys, method="asymp")
    return float(result.statistic), float(result.pvalue)


def closed_form_sf(model, coeff, y0, payoff):
    """<w, y0 + A b>, the exact value of a terminal payoff for a constant coefficient A"""
    if not coeff.is_constant:
        raise NotConstantCoefficientError("Closed form needs a constant coefficient, got %s" % coeff.kind)
    if not isinstance(payoff, Terminal):
        raise ValueError("Closed form is only available for terminal payoffs")
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    return float(payoff.weights @ (y0 + coeff.evaluate(y0) @ model.drift))

