'''Random inputs of one level or one coupled level pair

Large jumps, the jump-adapted grids and the raw Gaussian increments are all
drawn from hierarchical RNG streams, so that any (level, sample, role) address
reproduces the same numbers regardless of which worker draws them.
'''
import json
import logging
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1

# stream roles below a sample address
ROLE_JUMPS = 0
ROLE_WIENER = 1
ROLE_CORRECTION = 2

# relative slack below which an eps-step coincides with the next anchor
TIE_SLACK = 1e-12


@dataclass(frozen=True)
class RngStream(object):
    """Splittable stream address (seed, path) backed by a counter-based Philox generator"""
    seed: int
    path: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & MASK64)
        object.__setattr__(self, "path", tuple(int(p) & MASK64 for p in self.path))

    def split(self, index):
        """Child stream with the path extended by index"""
        return RngStream(self.seed, self.path + (index,))

    def generator(self):
        """Fresh numpy Generator positioned at the start of this stream"""
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seq))


def split_stream(stream, index):
    """Child stream of stream at index; distinct indices give independent sequences"""
    return stream.split(index)


@dataclass(frozen=True, eq=False)
class JumpRecord(object):
    time: float
    size: np.ndarray


@dataclass(frozen=True, eq=False)
class TimeGrid(object):
    """Strictly increasing breakpoints from 0 to 1"""
    points: np.ndarray

    def __len__(self):
        return len(self.points)

    def max_gap(self):
        return float(np.max(np.diff(self.points))) if len(self.points) > 1 else 0.


@dataclass(frozen=True, eq=False)
class DrivingRealization(object):
    """Shared randomness of a coupled level pair

    Jumps are stored as arrays (jump_times, jump_sizes); the Gaussian increments
    live on the union of both grids and have covariance (t - s) I.
    """
    jump_times: np.ndarray
    jump_sizes: np.ndarray
    grid_fine: TimeGrid
    grid_coarse: TimeGrid
    union: np.ndarray
    wiener_increments: np.ndarray
    correction_increments: np.ndarray
    h_fine: float = field(default=np.inf)
    h_coarse: float = field(default=np.inf)

    @property
    def jumps(self):
        return [JumpRecord(float(t), x) for t, x in zip(self.jump_times, self.jump_sizes)]

    def grid(self, which):
        if which == "fine":
            return self.grid_fine
        if which == "coarse":
            return self.grid_coarse
        raise ValueError("which must be 'fine' or 'coarse', got %r" % which)

    def to_json(self):
        """Debug dump for test fixtures"""
        return json.dumps({"jumps": [{"t": float(t), "x": x.tolist()} for t, x in
                                     zip(self.jump_times, self.jump_sizes)],
                           "grid_fine": self.grid_fine.points.tolist(),
                           "grid_coarse": self.grid_coarse.points.tolist()})


def _jump_arrays(model, h, rng):
    lam = model.tail_mass(h)
    count = rng.poisson(lam) if lam > 0 else 0
    if count == 0:
        return np.zeros(0), np.zeros((0, model.dim_x))
    # uniform on (0, 1]
    times = np.sort(1. - rng.random(count))
    sizes = model.sample_tail_jumps(h, rng, count)
    return times, sizes


def sample_jumps(model, h, stream):
    """All jumps of size at least h on (0, 1], sorted in time

    **Arguments**:
        - *model* = LevyModel
        - *h* = float : jump size threshold
        - *stream* = RngStream : random source (the same stream gives the same list)

    **Returns**:
        - list of JumpRecord
    """
    times, sizes = _jump_arrays(model, h, stream.generator())
    return [JumpRecord(float(t), x) for t, x in zip(times, sizes)]


def build_grid(jump_times, eps):
    """Jump-adapted grid: next point = min(next jump, previous point + eps), truncated at 1

    **Arguments**:
        - *jump_times* = sorted array in (0, 1]
        - *eps* = float : maximal step length

    **Returns**:
        - TimeGrid containing 0, every jump time and 1
    """
    if not eps > 0:
        raise ValueError("Step length eps must be positive, got %r" % eps)
    times = np.asarray(jump_times, dtype=float)
    anchors = np.concatenate([[0.], times[times < 1.]])
    ends = np.concatenate([anchors[1:], [1.]])
    counts = np.ceil((ends - anchors) / eps).astype(int) + 1
    seg = np.repeat(np.arange(len(anchors)), counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    pts = anchors[seg] + eps * offsets
    keep = (offsets == 0) | (pts < ends[seg] - TIE_SLACK * eps)
    return TimeGrid(np.unique(np.concatenate([pts[keep], [1.]])))


def _gaussian_increments(stream, dt, dim):
    rng = stream.generator()
    return rng.standard_normal((len(dt), dim)) * np.sqrt(dt)[:, None]


def realize_pair(model, h_fine, eps_fine, h_coarse, eps_coarse, stream):
    """Driving randomness of the coupled pair (coarse level, fine level)

    Jumps are sampled once at threshold h_fine; the coarse grid only sees jumps of
    size at least h_coarse. Wiener and correction increments are drawn once on the
    union grid, so both levels share the same Gaussian paths.

    **Arguments**:
        - *model* = LevyModel
        - *h_fine*, *eps_fine* = float : parameters of the fine level
        - *h_coarse*, *eps_coarse* = float : parameters of the coarse level
        - *stream* = RngStream : sample address

    **Returns**:
        - DrivingRealization
    """
    if h_fine > h_coarse or eps_fine > eps_coarse:
        raise ValueError("Fine level must satisfy h_fine <= h_coarse and eps_fine <= eps_coarse")
    times, sizes = _jump_arrays(model, h_fine, stream.split(ROLE_JUMPS).generator())
    norms = np.linalg.norm(sizes, axis=1)
    grid_fine = build_grid(times, eps_fine)
    grid_coarse = build_grid(times[norms >= h_coarse], eps_coarse)
    union = np.union1d(grid_fine.points, grid_coarse.points)
    dt = np.diff(union)
    times.setflags(write=False)
    sizes.setflags(write=False)
    return DrivingRealization(times, sizes, grid_fine, grid_coarse, union,
                              _gaussian_increments(stream.split(ROLE_WIENER), dt, model.dim_x),
                              _gaussian_increments(stream.split(ROLE_CORRECTION), dt, model.dim_x),
                              float(h_fine), float(h_coarse))


def realize_level(model, h, eps, stream):
    """Driving randomness of a single level (a degenerate pair)"""
    return realize_pair(model, h, eps, h, eps, stream)
