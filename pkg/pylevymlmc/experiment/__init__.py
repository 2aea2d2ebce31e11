'''
Base class from which pylevymlmc experiments should inherit.

Holds the configuration (model, coefficient, initial value, payoff), the root
random stream and the worker pool used to fill per-sample result slots.
'''
import logging
import threading

import numpy as np

from ..config import load_config
from ..driving_path import RngStream
from ..errors import NonFiniteStateError

logger = logging.getLogger(__name__)


def sample_in_threads(sampler, count, workers=1):
    """Evaluate sampler(i) for i in range(count) into a result array

    Each worker fills a contiguous block of slots; the result does not depend on
    the number of workers as long as sampler(i) is a pure function of i.

    **Arguments**:
        - *sampler* = callable : i -> float or tuple of floats
        - *count* = int : number of samples
        - *workers* = int : number of threads (default: 1)

    **Returns**:
        - array of shape (count,) or (count, k)
    """
    slots = [None] * count
    errors = []

    def work(start, stop):
        for i in range(start, stop):
            try:
                slots[i] = sampler(i)
            except NonFiniteStateError as e:
                e.sample = i
                errors.append((i, e))
                return
            except Exception as e:
                errors.append((i, e))
                return

    workers = max(1, min(int(workers), count))
    if workers == 1:
        work(0, count)
    else:
        bounds = np.linspace(0, count, workers + 1).astype(int)
        thread_list = []
        for t in range(workers):
            thread = threading.Thread(target=work, args=(bounds[t], bounds[t + 1]))
            thread_list.append(thread)
            thread.start()
        # now wait for threads to finish
        for thread in thread_list:
            thread.join()
    if errors:
        # lowest failing index, independent of the worker split
        raise min(errors, key=lambda item: item[0])[1]
    return np.array(slots, dtype=float)


class Experiment(object):
    '''Randomized experiment container for a Levy-driven SDE and a payoff
    '''

    def __init__(self, config=None, **kwds):
        """Experiment on a configured model

        **Arguments**:
            - *config* = ExperimentConfig, dict or string (filename of a JSON config)

        **Optional Keywords**:
            - *model*, *coefficient*, *y0*, *payoff* : set directly instead of a config
            - *seed* = int : random seed (default: config seed or 0)
            - *workers* = int : number of worker threads (default: config value or 1)
            - *verbose* = bool : log progress at INFO level (default: False)
        """
        self.verbose = kwds.get("verbose", False)
        self.config = None
        if config is not None:
            self.load_config(config)
        for key in ("model", "coefficient", "y0", "payoff"):
            if key in kwds:
                setattr(self, key, kwds[key])
        if not hasattr(self, "model"):
            raise AttributeError("Experiment needs a config or model/coefficient/y0/payoff keywords")
        self.y0 = np.atleast_1d(np.asarray(self.y0, dtype=float))
        self.workers = kwds.get("workers", None) or (self.config.workers if self.config else 1)
        seed = kwds.get("seed", None)
        if seed is None:
            seed = self.config.seed if self.config else 0
        self.set_random_seed(seed)

    def load_config(self, config):
        """Load model, coefficient, initial value and payoff from a configuration"""
        self.config = load_config(config)
        self.model = self.config.model
        self.coefficient = self.config.coefficient
        self.y0 = self.config.y0
        self.payoff = self.config.payoff

    def set_random_seed(self, random_seed):
        """Set random seed for reproducible experiments

        **Arguments**:
            - *random_seed* = int : define seed
        """
        self.seed = int(random_seed)
        self.root_stream = RngStream(self.seed)

    def info(self, message, *args):
        if self.verbose:
            logger.info(message, *args)
