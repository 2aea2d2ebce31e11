'''Lipschitz path functionals evaluated exactly on piecewise-constant skeletons'''
import numpy as np

from .errors import ConfigError, DimensionMismatchError


class Payoff(object):
    """Functional f: D[0,1] -> R with |f(x) - f(y)| <= lip_const sup_t |x_t - y_t|"""
    kind = None
    dim_y = None

    def __init__(self, lip_const):
        if lip_const < 0:
            raise ValueError("Lipschitz constant must be nonnegative")
        self.lip_const = float(lip_const)

    def __call__(self, path):
        return self.evaluate(path)

    def check_dimension(self, path):
        if self.dim_y is not None and path.dim_y != self.dim_y:
            raise DimensionMismatchError("%s payoff expects dim_y = %d, path has %d"
                                         % (self.kind, self.dim_y, path.dim_y))

    def evaluate(self, path):
        raise NotImplementedError


def _weights(weights, dim_y):
    if weights is None:
        w = np.zeros(dim_y or 1)
        w[0] = 1.
        return w
    return np.atleast_1d(np.asarray(weights, dtype=float))


class Terminal(Payoff):
    """f(x) = <w, x_1>"""
    kind = "terminal"

    def __init__(self, weights=None, dim_y=None):
        self.weights = _weights(weights, dim_y)
        self.dim_y = len(self.weights)
        super(Terminal, self).__init__(np.linalg.norm(self.weights))

    def evaluate(self, path):
        self.check_dimension(path)
        return float(self.weights @ path.values[-1])


class Lookback(Payoff):
    """f(x) = sup_t x_t[coordinate]; the sup over a step path is the max over its pieces"""
    kind = "lookback"

    def __init__(self, coordinate=0):
        self.coordinate = int(coordinate)
        super(Lookback, self).__init__(1.)

    def evaluate(self, path):
        if not 0 <= self.coordinate < path.dim_y:
            raise DimensionMismatchError("Coordinate %d outside path dimension %d"
                                         % (self.coordinate, path.dim_y))
        return float(np.max(path.values[:, self.coordinate]))


class AsianAverage(Payoff):
    """f(x) = int_0^1 <w, x_t> dt, an exact Riemann sum over the pieces"""
    kind = "asian"

    def __init__(self, weights=None, dim_y=None):
        self.weights = _weights(weights, dim_y)
        self.dim_y = len(self.weights)
        super(AsianAverage, self).__init__(np.linalg.norm(self.weights))

    def evaluate(self, path):
        self.check_dimension(path)
        gaps = np.diff(path.breakpoints)
        return float(gaps @ (path.values[:-1] @ self.weights))


class Custom(Payoff):
    """User callable with a declared (unverified) Lipschitz constant"""
    kind = "custom"

    def __init__(self, func, lip_const):
        self.func = func
        super(Custom, self).__init__(lip_const)

    def evaluate(self, path):
        return float(self.func(path))


class Constant(Custom):
    """f = c"""
    kind = "constant"

    def __init__(self, value):
        self.value = float(value)
        super(Constant, self).__init__(lambda path: self.value, 0.)


def evaluate(payoff, path):
    """f(path) for a PathSkeleton"""
    return payoff.evaluate(path)


def payoff_from_json(spec, dim_y=None):
    """Payoff from {"kind": "terminal"|"lookback"|"asian"|"constant", "weights", "coordinate", "value"}"""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("Payoff needs a 'kind' field")
    fields = {"terminal": {"kind", "weights"}, "asian": {"kind", "weights"},
              "lookback": {"kind", "coordinate"}, "constant": {"kind", "value"}}
    kind = spec["kind"]
    if kind not in fields:
        raise ConfigError("Unknown payoff kind '%s'" % kind)
    unknown = set(spec) - fields[kind]
    if unknown:
        raise ConfigError("Unknown keys in payoff: %s" % ", ".join(sorted(unknown)))
    if kind == "terminal":
        return Terminal(spec.get("weights"), dim_y)
    if kind == "asian":
        return AsianAverage(spec.get("weights"), dim_y)
    if kind == "lookback":
        return Lookback(spec.get("coordinate", 0))
    if "value" not in spec:
        raise ConfigError("Constant payoff needs a 'value'")
    return Constant(spec["value"])
