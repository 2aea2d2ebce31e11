# -*- coding: utf-8 -*-
"""
Summation and regression helpers shared by the estimators and the rate harness.

Sums are formed in index order with compensated (Kahan) summation, so that the
reduction gives the same bits whatever the worker layout.
"""

import numpy as np


def kahan_sum(values):
    """Compensated sum of values in index order"""
    total = 0.
    comp = 0.
    for v in np.asarray(values, dtype=float).ravel():
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def stable_mean(values):
    """Mean as x_0 + sum(x - x_0) / n; a constant sample returns the constant exactly"""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("Mean of an empty sample")
    return x[0] + kahan_sum(x - x[0]) / x.size


def sample_variance(values, mean=None):
    """Unbiased variance (ddof = 1); 0 for a single sample"""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        return 0.
    if mean is None:
        mean = stable_mean(x)
    return kahan_sum((x - mean) ** 2) / (x.size - 1)


def loglog_slope(x, y):
    """Least squares slope of log y against log x"""
    return float(np.polyfit(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)), 1)[0])


def rms(values, reference):
    """Root mean squared deviation of values from reference"""
    x = np.asarray(values, dtype=float)
    return float(np.sqrt(np.mean((x - reference) ** 2)))


def bootstrap_fraction(errors_a, errors_b, resamples=1000, seed=0):
    """Fraction of paired bootstrap resamples in which RMS(errors_a) < RMS(errors_b)

    **Arguments**:
        - *errors_a*, *errors_b* = arrays of equal length : errors of two estimators
          on the same repetitions

    **Optional Keywords**:
        - *resamples* = int : number of bootstrap resamples (default: 1000)
        - *seed* = int : seed of the resampling (default: 0)
    """
    a = np.asarray(errors_a, dtype=float) ** 2
    b = np.asarray(errors_b, dtype=float) ** 2
    if a.shape != b.shape:
        raise ValueError("Paired bootstrap needs errors of equal length")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(a), size=(resamples, len(a)))
    return float(np.mean(a[idx].mean(axis=1) < b[idx].mean(axis=1)))
