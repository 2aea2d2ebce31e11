'''Experiment configuration: JSON documents validated section by section

A configuration file looks like::

    {"model": {...}, "coefficient": {...}, "y0": [1.0],
     "payoff": {"kind": "terminal"},
     "schedule": {"mode": "case1", "tau": 4096, "C1": 1.0, "C2": 1.0},
     "seed": 7, "workers": 1,
     "sweep": {"tau_list": [1024, 4096], "repetitions": 20},
     "reference": {"eps_ref": 0.001, "h_ref": 0.0001, "n": 100000}}

Unknown keys are rejected everywhere.
'''
import json
import logging
import os

import numpy as np

from .errors import ConfigError, PyLevyMlmcError
from .levy_model import model_from_json
from .payoffs import payoff_from_json
from .scheme import coefficient_from_json

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {"model", "coefficient", "y0", "payoff", "schedule", "seed", "workers",
                  "sweep", "reference"}
REQUIRED_KEYS = {"model", "coefficient", "y0", "payoff", "schedule"}
SCHEDULE_KEYS = {
    "manual": {"mode", "eps", "h", "n", "correction"},
    "case1": {"mode", "tau", "C1", "C2", "correction"},
    "case2": {"mode", "tau", "C1", "C2", "correction"},
}
SWEEP_KEYS = {"tau_list", "repetitions"}
REFERENCE_KEYS = {"value", "eps_ref", "h_ref", "n", "seed"}


def _is_integer(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _check_keys(section, allowed, name):
    if not isinstance(section, dict):
        raise ConfigError("Section '%s' must be a JSON object" % name)
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError("Unknown keys in %s: %s" % (name, ", ".join(sorted(unknown))))


class ExperimentConfig(object):
    """Validated experiment configuration

    **Attributes**:
        - *model* = LevyModel
        - *coefficient* = CoefficientField
        - *y0* = array (dY,)
        - *payoff* = Payoff
        - *schedule_spec* = dict : schedule section (built by mlmc.schedule_from_spec)
        - *seed* = int
        - *workers* = int
        - *sweep* = dict or None
        - *reference* = dict or None
    """

    def __init__(self, document, **kwds):
        """Validate and build a configuration from a parsed JSON document

        **Optional Keywords**:
            - *filename* = string : origin of the document, used in messages
        """
        self.filename = kwds.get("filename", None)
        self.document = document
        _check_keys(document, TOP_LEVEL_KEYS, "configuration")
        missing = REQUIRED_KEYS - set(document)
        if missing:
            raise ConfigError("Missing configuration sections: %s" % ", ".join(sorted(missing)))
        try:
            self.model = model_from_json(document["model"])
            self.coefficient = coefficient_from_json(document["coefficient"])
            self.y0 = np.atleast_1d(np.asarray(document["y0"], dtype=float))
            self.payoff = payoff_from_json(document["payoff"], len(self.y0))
        except ConfigError:
            raise
        except (PyLevyMlmcError, ValueError, TypeError) as e:
            raise ConfigError("Invalid configuration: %s" % e)
        if self.y0.shape != (self.coefficient.dim_y,):
            raise ConfigError("y0 has length %d but the coefficient has %d rows"
                              % (len(self.y0), self.coefficient.dim_y))
        if self.coefficient.dim_x != self.model.dim_x:
            raise ConfigError("Coefficient has %d columns but dim_x = %d"
                              % (self.coefficient.dim_x, self.model.dim_x))
        self.schedule_spec = self._check_schedule(document["schedule"])
        self.seed = document.get("seed", 0)
        if not _is_integer(self.seed) or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        self.workers = document.get("workers", 1)
        if not _is_integer(self.workers) or self.workers < 1:
            raise ConfigError("workers must be a positive integer")
        self.sweep = document.get("sweep", None)
        if self.sweep is not None:
            _check_keys(self.sweep, SWEEP_KEYS, "sweep")
            if not self.sweep.get("tau_list"):
                raise ConfigError("sweep needs a nonempty 'tau_list'")
            repetitions = self.sweep.get("repetitions", 1)
            if not _is_integer(repetitions) or repetitions < 1:
                raise ConfigError("sweep repetitions must be a positive integer")
        self.reference = document.get("reference", None)
        if self.reference is not None:
            _check_keys(self.reference, REFERENCE_KEYS, "reference")

    @staticmethod
    def _check_schedule(spec):
        if not isinstance(spec, dict) or "mode" not in spec:
            raise ConfigError("schedule needs a 'mode' field")
        mode = spec["mode"]
        if mode not in SCHEDULE_KEYS:
            raise ConfigError("Unknown schedule mode '%s' (manual, case1 or case2)" % mode)
        _check_keys(spec, SCHEDULE_KEYS[mode], "schedule")
        if mode == "manual":
            for key in ("eps", "h", "n"):
                if key not in spec:
                    raise ConfigError("Manual schedule needs '%s'" % key)
        elif "tau" not in spec:
            raise ConfigError("Scheduled mode %s needs 'tau'" % mode)
        if "correction" in spec and not isinstance(spec["correction"], bool):
            raise ConfigError("schedule 'correction' must be true or false")
        return dict(spec)

    @classmethod
    def from_file(cls, filename):
        """Load and validate a JSON configuration file"""
        if not os.path.exists(filename):
            raise ConfigError("Configuration file %s not found" % filename)
        with open(filename, 'r', encoding='utf-8') as f:
            try:
                document = json.load(f)
            except ValueError as e:
                raise ConfigError("Malformed JSON in %s: %s" % (filename, e))
        return cls(document, filename=filename)

    @classmethod
    def from_string(cls, text):
        try:
            document = json.loads(text)
        except ValueError as e:
            raise ConfigError("Malformed JSON: %s" % e)
        return cls(document)


def load_config(config):
    """Return an ExperimentConfig from a filename, a parsed dict or an ExperimentConfig"""
    if isinstance(config, ExperimentConfig):
        return config
    if isinstance(config, dict):
        return ExperimentConfig(config)
    return ExperimentConfig.from_file(config)
