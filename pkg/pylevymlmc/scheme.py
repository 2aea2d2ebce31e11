'''Jump-adapted Euler scheme with Gaussian correction

Advances Y across a grid by Y_t = Y_s + a(Y_s) (X_t - X_s), where the driving
increment is

    X_t - X_s = Sigma dW + Sigma_m dB + (jumps >= h in (s, t]) - F_0(h) (t - s) + b (t - s)

and returns the piecewise-constant path skeleton.
'''
import json
import logging
from dataclasses import dataclass

import numpy as np

from .driving_path import realize_level, realize_pair
from .errors import ConfigError, DimensionMismatchError, NonFiniteStateError

logger = logging.getLogger(__name__)


class CoefficientField(object):
    """Lipschitz coefficient a: R^dY -> R^(dY x dX)

    **Attributes**:
        - *dim_y*, *dim_x* = int : shape of a(y)
        - *lipschitz_const* = float : constant K with |a(y) - a(y')| <= K |y - y'|
        - *is_constant* = bool : a does not depend on y (closed-form reference available)
    """
    kind = None
    is_constant = False

    def __init__(self, dim_y, dim_x, lipschitz_const):
        self.dim_y = dim_y
        self.dim_x = dim_x
        self.lipschitz_const = float(lipschitz_const)

    def __call__(self, y):
        return self.evaluate(y)

    def evaluate(self, y):
        raise NotImplementedError

    def spot_check_lipschitz(self, rng, pairs=100, scale=3.):
        """Largest observed ratio |a(y) - a(y')| / |y - y'| over random pairs"""
        worst = 0.
        for _ in range(pairs):
            y1 = scale * rng.standard_normal(self.dim_y)
            y2 = scale * rng.standard_normal(self.dim_y)
            dist = np.linalg.norm(y1 - y2)
            if dist > 0:
                worst = max(worst, np.linalg.norm(self.evaluate(y1) - self.evaluate(y2)) / dist)
        return worst


class ConstantCoefficient(CoefficientField):
    """a(y) = A"""
    kind = "constant"
    is_constant = True

    def __init__(self, matrix):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        dim_y, dim_x = self.matrix.shape
        super(ConstantCoefficient, self).__init__(dim_y, dim_x, np.linalg.norm(self.matrix))

    def evaluate(self, y):
        return self.matrix

    def to_json(self):
        return {"kind": self.kind, "matrix": self.matrix.tolist()}


class AffineCoefficient(CoefficientField):
    """a(y) = A_0 + sum_j y_j A_j"""
    kind = "affine"

    def __init__(self, offset, slopes):
        self.offset = np.atleast_2d(np.asarray(offset, dtype=float))
        dim_y, dim_x = self.offset.shape
        self.slopes = np.asarray(slopes, dtype=float).reshape(dim_y, dim_y, dim_x)
        # Cauchy-Schwarz over the coordinates of y
        lip = np.sqrt(np.sum(self.slopes ** 2))
        super(AffineCoefficient, self).__init__(dim_y, dim_x, max(lip, np.linalg.norm(self.offset)))

    def evaluate(self, y):
        return self.offset + np.tensordot(y, self.slopes, axes=1)

    def to_json(self):
        return {"kind": self.kind, "offset": self.offset.tolist(), "slopes": self.slopes.tolist()}


class SineModulatedCoefficient(CoefficientField):
    """Nonlinear test map a(y)_ij = A_ij (1 + sin(y_i) / 2)"""
    kind = "sine_modulated"

    def __init__(self, matrix):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        dim_y, dim_x = self.matrix.shape
        rows = np.linalg.norm(self.matrix, axis=1)
        K = max(0.5 * rows.max(), 1.5 * np.linalg.norm(self.matrix))
        super(SineModulatedCoefficient, self).__init__(dim_y, dim_x, K)

    def evaluate(self, y):
        return self.matrix * (1. + 0.5 * np.sin(y))[:, None]

    def to_json(self):
        return {"kind": self.kind, "matrix": self.matrix.tolist()}


def coefficient_from_json(spec):
    """CoefficientField from {"kind": "constant"|"affine"|"sine_modulated", ...}"""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("Coefficient needs a 'kind' field")
    fields = {"constant": {"kind", "matrix"}, "affine": {"kind", "offset", "slopes"},
              "sine_modulated": {"kind", "matrix"}}
    kind = spec["kind"]
    if kind not in fields:
        raise ConfigError("Unknown coefficient kind '%s'" % kind)
    unknown = set(spec) - fields[kind]
    if unknown:
        raise ConfigError("Unknown keys in coefficient: %s" % ", ".join(sorted(unknown)))
    try:
        if kind == "constant":
            return ConstantCoefficient(spec["matrix"])
        if kind == "affine":
            return AffineCoefficient(spec["offset"], spec["slopes"])
        return SineModulatedCoefficient(spec["matrix"])
    except KeyError as e:
        raise ConfigError("Missing field %s in %s coefficient" % (e, kind))


@dataclass(frozen=True, eq=False)
class PathSkeleton(object):
    """Cadlag piecewise-constant path: values[i] holds on [breakpoints[i], breakpoints[i+1])"""
    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.breakpoints) != len(self.values):
            raise DimensionMismatchError("Need one value per breakpoint")

    @property
    def dim_y(self):
        return self.values.shape[1]

    @property
    def terminal(self):
        return self.values[-1]

    def value_at(self, t):
        """Value at time t (last breakpoint <= t)"""
        return self.values[np.searchsorted(self.breakpoints, t, side="right") - 1]

    def to_json(self):
        return json.dumps({"t": self.breakpoints.tolist(), "y": self.values.tolist()})


@dataclass(frozen=True, eq=False)
class LevelParams(object):
    """Step length, jump threshold and the schedule-wide correction factor Sigma_m"""
    eps: float
    h: float
    correction_factor: np.ndarray


def _interval_sums(increments, union, grid):
    """Sum per-interval increments of the union grid over the intervals of a subgrid"""
    if len(union) == len(grid):
        return increments
    starts = np.searchsorted(union, grid[:-1])
    return np.add.reduceat(increments, starts, axis=0)


def driving_increments(model, params, realization, which):
    """Increments of the level's driving process X^(k) over its own grid intervals

    **Returns**:
        - (grid points, array (n - 1, dX) of increments)
    """
    grid = realization.grid(which).points
    union = realization.union
    dt = np.diff(grid)
    dW = _interval_sums(realization.wiener_increments, union, grid)
    dB = _interval_sums(realization.correction_increments, union, grid)
    dX = dW @ model.sigma.T + dB @ np.asarray(params.correction_factor).T
    # jumps >= h in (s, t] belong to the interval ending at t
    sel = np.linalg.norm(realization.jump_sizes, axis=1) >= params.h
    if np.any(sel):
        idx = np.searchsorted(grid, realization.jump_times[sel], side="left") - 1
        np.add.at(dX, idx, realization.jump_sizes[sel])
    dX += np.outer(dt, model.drift - model.f_zero(params.h))
    return grid, dX


def advance(model, coeff, y0, params, realization, which="fine"):
    """Run the Euler-type scheme along the fine or coarse grid of a realization

    **Arguments**:
        - *model* = LevyModel
        - *coeff* = CoefficientField
        - *y0* = array (dY,) : initial value
        - *params* = LevelParams : parameters matching the chosen role
        - *realization* = DrivingRealization
        - *which* = 'fine' or 'coarse'

    **Returns**:
        - PathSkeleton with the grid as breakpoints
    """
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    if y0.shape != (coeff.dim_y,) or coeff.dim_x != model.dim_x:
        raise DimensionMismatchError("Coefficient of shape (%d, %d) does not fit y0 %s and dim_x = %d"
                                     % (coeff.dim_y, coeff.dim_x, y0.shape, model.dim_x))
    grid, dX = driving_increments(model, params, realization, which)
    if coeff.is_constant:
        # telescoping: Y_t = y0 + A X_t
        steps = dX @ coeff.evaluate(y0).T
        values = np.vstack([y0, y0 + np.cumsum(steps, axis=0)])
        bad = ~np.all(np.isfinite(values), axis=1)
        if np.any(bad):
            raise NonFiniteStateError("Non-finite state", time=float(grid[np.argmax(bad)]))
    else:
        values = np.empty((len(grid), coeff.dim_y))
        values[0] = y0
        y = y0
        for j in range(len(dX)):
            y = y + coeff.evaluate(y) @ dX[j]
            if not np.all(np.isfinite(y)):
                raise NonFiniteStateError("Non-finite state", time=float(grid[j + 1]))
            values[j + 1] = y
    return PathSkeleton(grid, values)


def simulate_level(model, coeff, y0, params, stream):
    """One path of the single-level approximation for the given parameters and stream"""
    realization = realize_level(model, params.h, params.eps, stream)
    return advance(model, coeff, y0, params, realization, "fine")


def simulate_pair(model, coeff, y0, params_fine, params_coarse, stream):
    """Coupled (fine, coarse) paths driven by one DrivingRealization

    **Arguments**:
        - *params_fine*, *params_coarse* = LevelParams : must share the correction factor

    **Returns**:
        - (fine PathSkeleton, coarse PathSkeleton)
    """
    if not np.array_equal(params_fine.correction_factor, params_coarse.correction_factor):
        raise ValueError("Coupled levels must share the schedule's correction factor")
    realization = realize_pair(model, params_fine.h, params_fine.eps,
                               params_coarse.h, params_coarse.eps, stream)
    return (advance(model, coeff, y0, params_fine, realization, "fine"),
            advance(model, coeff, y0, params_coarse, realization, "coarse"))
