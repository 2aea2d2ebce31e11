"""Package initialization file for pylevymlmc

Multilevel Monte Carlo with Gaussian correction for Levy-driven SDEs.
"""
import os.path

# save this module path for relative paths
package_directory = os.path.dirname(os.path.abspath(__file__))

# global tolerances
quad_rel_tol = 1e-8  # relative tolerance of adaptive quadrature
quad_abs_tol = 1e-14  # absolute floor of adaptive quadrature
sym_tol = 1e-10  # allowed asymmetry of covariance matrices (relative)
eig_tol = 1e-12  # eigenvalues below -eig_tol * |cov| are an error

from .errors import PyLevyMlmcError  # noqa: E402


def compute_estimate(config, **kwds):
    """Run the multilevel estimator defined in a configuration

    **Arguments**:
        - *config* = string or dict : filename of JSON configuration, or the parsed document

    **Optional Keywords**:
        - *seed* = int : override the configured seed
        - *workers* = int : number of worker threads (does not change the result)
        - *verbose* = bool : log progress (default: False)

    **Returns**:
        - MlmcResult of the run
    """
    from .experiment.mlmc import MultilevelMonteCarlo

    experiment = MultilevelMonteCarlo(config, **kwds)
    return experiment.estimate(**kwds)
